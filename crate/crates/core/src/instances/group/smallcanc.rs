//! Marked small-cancellation groups: presentations on a set of letters whose
//! relators satisfy C'(1/6), with maps that send letters to letters.
//!
//! Only the slice needed for non-uniqueness is modelled. A model `m` sits
//! strongly inside `n` when its letters are letters of `n` and its relators
//! are exactly the relators of `n` that use no other letter. Dehn's algorithm
//! decides the word problem, which separates a free product from its
//! quotients.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::word::{gen_of, w, Letter, Word};
use crate::class::{
    is_commutative_square, AmalgamDiagram, ClassInstance, Diagram, IsoVerdict, KEmbedding, SpanOf,
};
use crate::error::{Error, Result};
use crate::notion::Notion;
use crate::uniqueness::{NonUniquenessWitness, Separation, Witness};

/// A relator over letters `a, b` with all pieces of length at most 3.
pub const TEMPLATE_RELATOR: &str = "abABABBAAAABaBBBABa";

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SCPresentation {
    pub generators: BTreeSet<usize>,
    pub relators: BTreeSet<Word>,
}

/// Representative of the cyclic class of `r` and its inverse.
pub fn canonical_relator(r: &Word) -> Word {
    let c = r.cyclically_reduced();
    c.rotations()
        .into_iter()
        .chain(c.inverse().rotations())
        .min()
        .unwrap_or_default()
}

impl SCPresentation {
    pub fn new(generators: impl IntoIterator<Item = usize>, relators: &[Word]) -> Self {
        let relators = relators
            .iter()
            .map(canonical_relator)
            .filter(|r| !r.is_empty())
            .collect();
        SCPresentation {
            generators: generators.into_iter().collect(),
            relators,
        }
    }

    /// The free group on `generators`.
    pub fn free(generators: impl IntoIterator<Item = usize>) -> Self {
        Self::new(generators, &[])
    }

    /// Cyclic permutations of every relator and its inverse.
    pub fn symmetrized(&self) -> BTreeSet<Word> {
        self.relators
            .iter()
            .flat_map(|r| {
                let c = r.cyclically_reduced();
                let mut v = c.rotations();
                v.extend(c.inverse().rotations());
                v
            })
            .collect()
    }

    /// Relators using only letters in `letters`.
    fn restricted(&self, letters: &BTreeSet<usize>) -> BTreeSet<Word> {
        self.relators
            .iter()
            .filter(|r| r.support().iter().all(|g| letters.contains(g)))
            .cloned()
            .collect()
    }

    fn sub(&self, letters: BTreeSet<usize>) -> SCPresentation {
        let relators = self.restricted(&letters);
        SCPresentation {
            generators: letters,
            relators,
        }
    }
}

fn common_prefix(u: &[Letter], v: &[Letter]) -> usize {
    u.iter().zip(v).take_while(|(x, y)| x == y).count()
}

/// Longest piece found, with the two symmetrized words sharing it.
pub fn longest_piece(pres: &SCPresentation) -> Option<(usize, Word, Word)> {
    let sym: Vec<Word> = pres.symmetrized().into_iter().collect();
    let mut best: Option<(usize, Word, Word)> = None;
    for (i, u) in sym.iter().enumerate() {
        for v in &sym[i + 1..] {
            let l = common_prefix(u.letters(), v.letters());
            if best.as_ref().is_none_or(|b| l > b.0) {
                best = Some((l, u.clone(), v.clone()));
            }
        }
    }
    best
}

/// Every piece is shorter than a sixth of each relator containing it.
pub fn check_c16(pres: &SCPresentation) -> bool {
    let sym: Vec<Word> = pres.symmetrized().into_iter().collect();
    sym.iter().enumerate().all(|(i, u)| {
        sym[i + 1..].iter().all(|v| {
            let l = common_prefix(u.letters(), v.letters());
            6 * l < u.len() && 6 * l < v.len()
        })
    })
}

/// Word problem by Dehn's algorithm.
pub fn dehn_trivial(word: &Word, pres: &SCPresentation) -> Result<bool> {
    if !check_c16(pres) {
        return Err(Error::NotSmallCancellation);
    }
    Ok(dehn_reduce(word, &pres.symmetrized()).is_empty())
}

/// Replace any subword forming more than half of a symmetrized relator by the
/// inverse of the rest of that relator, until none is left.
pub fn dehn_reduce(word: &Word, sym: &BTreeSet<Word>) -> Word {
    let mut cur = word.clone();
    'outer: loop {
        let ls = cur.letters().to_vec();
        for r in sym {
            let rl = r.letters();
            let half = rl.len() / 2 + 1;
            for start in 0..ls.len() {
                let l = common_prefix(&ls[start..], rl);
                if l >= half {
                    let rest = Word::new(rl[l..].iter().copied()).inverse();
                    let next: Vec<Letter> = ls[..start]
                        .iter()
                        .copied()
                        .chain(rest.letters().iter().copied())
                        .chain(ls[start + l..].iter().copied())
                        .collect();
                    cur = Word::new(next);
                    continue 'outer;
                }
            }
        }
        return cur;
    }
}

/// Marked C'(1/6) groups with letter-to-letter maps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SmallCancellation;

impl SmallCancellation {
    fn letter_images(dom: &SCPresentation, images: &[Word]) -> Vec<Word> {
        let size = dom.generators.iter().max().map_or(0, |&g| g + 1);
        let mut full: Vec<Word> = (0..size).map(Word::gen).collect();
        for (&g, img) in dom.generators.iter().zip(images) {
            full[g] = img.clone();
        }
        full
    }

    fn map_word(dom: &SCPresentation, images: &[Word], x: &Word) -> Word {
        x.substitute(&Self::letter_images(dom, images))
    }

    /// Equality of two words in the group `n`.
    pub fn equal_in(n: &SCPresentation, x: &Word, y: &Word) -> bool {
        dehn_reduce(&x.mul(&y.inverse()), &n.symmetrized()).is_empty()
    }

    /// The relabelled presentation and image list, when every image is a single
    /// letter and distinct generators go to distinct letters.
    fn as_letter_map(dom: &SCPresentation, images: &[Word]) -> Option<Vec<usize>> {
        if images.len() != dom.generators.len() || images.iter().any(|w| w.len() != 1) {
            return None;
        }
        let targets: Vec<usize> = images.iter().map(|w| gen_of(w.letters()[0])).collect();
        let distinct: BTreeSet<usize> = targets.iter().copied().collect();
        (distinct.len() == targets.len()).then_some(targets)
    }

    fn pushforward(dom: &SCPresentation, images: &[Word]) -> BTreeSet<Word> {
        dom.relators
            .iter()
            .map(|r| canonical_relator(&Self::map_word(dom, images, r)))
            .collect()
    }

    /// Signed letter maps from `m` into `n` honouring `pinned` as group equalities.
    fn letter_maps(
        &self,
        m: &SCPresentation,
        n: &SCPresentation,
        pinned: &[(Word, Word)],
        bijective: bool,
        bound: usize,
        mut keep: impl FnMut(&[Word]) -> bool,
    ) -> Vec<Vec<Word>> {
        let src: Vec<usize> = m.generators.iter().copied().collect();
        let dst: Vec<usize> = n.generators.iter().copied().collect();
        if src.len() > dst.len() || bijective && src.len() != dst.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur: Vec<Word> = Vec::new();
        fn go(
            k: usize,
            src: &[usize],
            dst: &[usize],
            cur: &mut Vec<Word>,
            out: &mut Vec<Vec<Word>>,
            bound: usize,
            keep: &mut dyn FnMut(&[Word]) -> bool,
        ) {
            if out.len() >= bound {
                return;
            }
            if k == src.len() {
                if keep(cur) {
                    out.push(cur.clone());
                }
                return;
            }
            for &t in dst {
                if cur.iter().any(|w| gen_of(w.letters()[0]) == t) {
                    continue;
                }
                for img in [Word::gen(t), Word::gen(t).inverse()] {
                    cur.push(img);
                    go(k + 1, src, dst, cur, out, bound, keep);
                    cur.pop();
                }
            }
        }
        let mut filter = |images: &[Word]| {
            pinned
                .iter()
                .all(|(x, y)| Self::equal_in(n, &Self::map_word(m, images, x), y))
                && keep(images)
        };
        go(0, &src, &dst, &mut cur, &mut out, bound, &mut filter);
        out
    }

    /// A reason the letter map `images: m -> n` fails to be an isomorphism, if any.
    fn iso_obstruction(m: &SCPresentation, n: &SCPresentation, images: &[Word]) -> Option<String> {
        let n_sym = n.symmetrized();
        for r in &m.relators {
            if !dehn_reduce(&Self::map_word(m, images, r), &n_sym).is_empty() {
                return Some(format!("relator {r} is trivial in the source but its image is nontrivial in the target"));
            }
        }
        let targets = Self::as_letter_map(m, images)?;
        let mut back: Vec<Word> = (0..n.generators.iter().max().map_or(0, |&g| g + 1))
            .map(Word::gen)
            .collect();
        for (&g, (t, img)) in m.generators.iter().zip(targets.iter().zip(images)) {
            let sign = img.letters()[0] > 0;
            back[*t] = if sign {
                Word::gen(g)
            } else {
                Word::gen(g).inverse()
            };
        }
        let m_sym = m.symmetrized();
        for s in &n.relators {
            if !dehn_reduce(&s.substitute(&back), &m_sym).is_empty() {
                return Some(format!("relator {s} is trivial in the target but its preimage is nontrivial in the source"));
            }
        }
        None
    }

    fn relabel(m: &SCPresentation, images: &[Word]) -> SCPresentation {
        let targets = Self::as_letter_map(m, images).expect("letter map");
        SCPresentation {
            generators: targets.into_iter().collect(),
            relators: Self::pushforward(m, images),
        }
    }
}

impl ClassInstance for SmallCancellation {
    type Model = SCPresentation;
    type Element = Word;

    fn tag(&self) -> String {
        "small-cancellation".into()
    }

    fn size(&self, m: &SCPresentation) -> usize {
        m.generators.len()
    }

    fn generators(&self, m: &SCPresentation) -> Vec<Word> {
        m.generators.iter().map(|&g| Word::gen(g)).collect()
    }

    fn contains(&self, m: &SCPresentation, x: &Word) -> bool {
        x.support().iter().all(|g| m.generators.contains(g))
    }

    fn elements(&self, m: &SCPresentation, bound: usize) -> Vec<Word> {
        let letters: Vec<Letter> = m
            .generators
            .iter()
            .flat_map(|&g| [g as Letter + 1, -(g as Letter + 1)])
            .collect();
        let mut out = vec![Word::identity()];
        let mut layer = out.clone();
        while out.len() < bound && !letters.is_empty() {
            let next: Vec<Word> = layer
                .iter()
                .flat_map(|x| {
                    letters
                        .iter()
                        .filter(move |&&l| x.letters().last() != Some(&-l))
                        .map(move |&l| x.mul(&Word::new([l])))
                })
                .collect();
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.truncate(bound);
        out
    }

    fn is_subset(&self, m: &SCPresentation, n: &SCPresentation) -> bool {
        m.generators.is_subset(&n.generators)
    }

    fn is_strong_sub(&self, m: &SCPresentation, n: &SCPresentation) -> bool {
        m.generators.is_subset(&n.generators) && n.restricted(&m.generators) == m.relators
    }

    /// The marked substructure on the letters occurring in `a`.
    fn span_in(&self, n: &SCPresentation, a: &[Word]) -> Result<SCPresentation> {
        let letters: BTreeSet<usize> = a.iter().flat_map(|x| x.support()).collect();
        if !letters.is_subset(&n.generators) {
            return Err(Error::PreconditionViolated(
                "generators outside the ambient model".into(),
            ));
        }
        Ok(n.sub(letters))
    }

    fn generated_sub(&self, _n: &SCPresentation, _a: &[Word]) -> Result<SCPresentation> {
        Err(Error::NotSupported("closure in small-cancellation groups"))
    }

    fn substructures(
        &self,
        n: &SCPresentation,
        containing: &SCPresentation,
    ) -> Result<Vec<SCPresentation>> {
        if !self.is_strong_sub(containing, n) {
            return Ok(Vec::new());
        }
        let free: Vec<usize> = n
            .generators
            .difference(&containing.generators)
            .copied()
            .collect();
        if free.len() > 12 {
            return Err(Error::TooLarge {
                size: 1 << free.len(),
                limit: 1 << 12,
            });
        }
        let mut out: Vec<SCPresentation> = (0u32..1 << free.len())
            .map(|mask| {
                let mut letters = containing.generators.clone();
                letters.extend(
                    free.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &g)| g),
                );
                n.sub(letters)
            })
            .collect();
        out.sort();
        Ok(out)
    }

    fn intersect(&self, _a: &SCPresentation, _b: &SCPresentation) -> Option<SCPresentation> {
        None
    }

    fn apply(&self, e: &KEmbedding<SCPresentation, Word>, x: &Word) -> Word {
        Self::map_word(&e.dom, &e.images, x)
    }

    fn is_valid_map(&self, dom: &SCPresentation, cod: &SCPresentation, images: &[Word]) -> bool {
        let Some(targets) = Self::as_letter_map(dom, images) else {
            return false;
        };
        let letters: BTreeSet<usize> = targets.into_iter().collect();
        letters.is_subset(&cod.generators)
            && cod.restricted(&letters) == Self::pushforward(dom, images)
    }

    fn embeddings(
        &self,
        m: &SCPresentation,
        n: &SCPresentation,
        pinned: &[(Word, Word)],
        bound: usize,
    ) -> Vec<Vec<Word>> {
        self.letter_maps(m, n, pinned, false, bound, |images| {
            self.is_valid_map(m, n, images)
        })
    }

    /// Letter bijections first; when the pins fix every letter, the Dehn
    /// obstruction of the forced map certifies absence.
    fn iso_search(
        &self,
        m: &SCPresentation,
        n: &SCPresentation,
        pinned: &[(Word, Word)],
    ) -> IsoVerdict<Word> {
        let candidates = self.letter_maps(m, n, pinned, true, usize::MAX, |_| true);
        let mut reasons = Vec::new();
        for images in &candidates {
            match Self::iso_obstruction(m, n, images) {
                None => return IsoVerdict::Found(images.clone()),
                Some(r) => reasons.push(r),
            }
        }
        let pinned_letters: BTreeSet<usize> = pinned
            .iter()
            .filter(|p| p.0.len() == 1)
            .map(|p| gen_of(p.0.letters()[0]))
            .collect();
        if candidates.len() == 1 && pinned_letters == m.generators {
            return IsoVerdict::Absent {
                reason: reasons.swap_remove(0),
            };
        }
        if m.generators.len() != n.generators.len()
            && m.relators.is_empty()
            && n.relators.is_empty()
        {
            return IsoVerdict::Absent {
                reason: format!(
                    "free of rank {} vs {}",
                    m.generators.len(),
                    n.generators.len()
                ),
            };
        }
        IsoVerdict::Unknown {
            bound: candidates.len(),
        }
    }

    fn isomorphisms_from(
        &self,
        m: &SCPresentation,
        bound: usize,
        seed: u64,
    ) -> Vec<KEmbedding<SCPresentation, Word>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![KEmbedding {
            dom: m.clone(),
            cod: m.clone(),
            images: self.generators(m),
        }];
        let pool: Vec<usize> = (0..m.generators.iter().max().map_or(0, |&g| g + 1) + 2).collect();
        for _ in 0..bound * 4 {
            if out.len() >= bound {
                break;
            }
            let mut targets = pool.clone();
            targets.shuffle(&mut rng);
            let images: Vec<Word> = targets[..m.generators.len()]
                .iter()
                .map(|&t| {
                    if rng.gen_bool(0.5) {
                        Word::gen(t)
                    } else {
                        Word::gen(t).inverse()
                    }
                })
                .collect();
            let cod = Self::relabel(m, &images);
            let e = KEmbedding {
                dom: m.clone(),
                cod,
                images,
            };
            if !out.contains(&e) {
                out.push(e);
            }
        }
        out
    }

    fn superstructures(&self, n: &SCPresentation) -> Vec<SCPresentation> {
        let fresh = (0..)
            .find(|g| !n.generators.contains(g))
            .expect("unbounded letters");
        let mut bigger = n.clone();
        bigger.generators.insert(fresh);
        vec![n.clone(), bigger]
    }

    fn prime_minimal(&self, _ambient: &SCPresentation) -> Option<SCPresentation> {
        Some(SCPresentation::default())
    }

    fn describe(&self, m: &SCPresentation) -> String {
        let rs: Vec<String> = m.relators.iter().map(Word::to_string).collect();
        format!("letters={} relators=[{}]", m.generators.len(), rs.join(","))
    }
}

fn shift_word(x: &Word, keep: &BTreeSet<usize>, offset: usize) -> Word {
    Word::new(x.letters().iter().map(|&l| {
        let g = gen_of(l);
        if keep.contains(&g) {
            l
        } else {
            l.signum() * (g + offset + 1) as Letter
        }
    }))
}

fn shift_model(m: &SCPresentation, keep: &BTreeSet<usize>, offset: usize) -> SCPresentation {
    SCPresentation {
        generators: m
            .generators
            .iter()
            .map(|&g| if keep.contains(&g) { g } else { g + offset })
            .collect(),
        relators: m
            .relators
            .iter()
            .map(|r| canonical_relator(&shift_word(r, keep, offset)))
            .collect(),
    }
}

fn shift_diagram(
    d: &Diagram<SmallCancellation>,
    keep: &BTreeSet<usize>,
    offset: usize,
) -> Diagram<SmallCancellation> {
    let sm = |m: &SCPresentation| shift_model(m, keep, offset);
    let se = |e: &KEmbedding<SCPresentation, Word>| KEmbedding {
        dom: sm(&e.dom),
        cod: sm(&e.cod),
        images: e
            .images
            .iter()
            .map(|x| shift_word(x, keep, offset))
            .collect(),
    };
    let s = &d.span;
    AmalgamDiagram {
        span: SpanOf::<SmallCancellation> {
            m0: sm(&s.m0),
            m1: sm(&s.m1),
            m2: sm(&s.m2),
            f: se(&s.f),
        },
        n: sm(&d.n),
        g1: se(&d.g1),
        g2: se(&d.g2),
    }
}

/// Relators present in the second apex only.
fn extra_relators(w: &Witness<SmallCancellation>) -> Vec<Word> {
    w.second
        .n
        .relators
        .difference(&w.first.n.relators)
        .cloned()
        .collect()
}

impl Separation for SmallCancellation {
    /// With both diagrams placing the sides identically, an isomorphism over the
    /// span fixes every letter, so a relator trivial on one side only separates.
    fn separate(&self, d1: &Diagram<Self>, d2: &Diagram<Self>) -> Option<String> {
        if d1.g1.images != d2.g1.images
            || d1.g2.images != d2.g2.images
            || !check_c16(&d1.n)
            || !check_c16(&d2.n)
        {
            return None;
        }
        let (s1, s2) = (d1.n.symmetrized(), d2.n.symmetrized());
        if let Some(r) =
            d2.n.relators
                .iter()
                .find(|r| !dehn_reduce(r, &s1).is_empty())
        {
            return Some(format!(
                "relator {r} trivial in second apex, nontrivial in first"
            ));
        }
        d1.n.relators
            .iter()
            .find(|r| !dehn_reduce(r, &s2).is_empty())
            .map(|r| format!("relator {r} trivial in first apex, nontrivial in second"))
    }

    /// Shifts every letter outside the base by a multiple of the witness's width.
    fn disjoint_copy(&self, w: &Witness<Self>, index: usize) -> Result<Witness<Self>> {
        let keep = w.span().m0.generators.clone();
        let fixes_base = |e: &KEmbedding<SCPresentation, Word>| {
            keep.iter().all(|&g| {
                Self::map_word(&e.dom, &e.images, &Word::gen(g))
                    .support()
                    .iter()
                    .all(|h| keep.contains(h))
            })
        };
        if !fixes_base(&w.span().f) || !fixes_base(&w.first.g1) || !fixes_base(&w.second.g1) {
            return Err(Error::PreconditionViolated(
                "witness maps move the base letters".into(),
            ));
        }
        let width = w
            .first
            .n
            .generators
            .iter()
            .chain(&w.second.n.generators)
            .max()
            .map_or(0, |&g| g + 1);
        let offset = index * width;
        Ok(NonUniquenessWitness {
            first: shift_diagram(&w.first, &keep, offset),
            second: shift_diagram(&w.second, &keep, offset),
            distinguisher: w.distinguisher.clone(),
        })
    }

    /// Every relator that only the second apex carries is trivial in `m`.
    fn invariant(&self, w: &Witness<Self>, m: &SCPresentation) -> Result<bool> {
        let extra = extra_relators(w);
        if extra.is_empty() {
            return Err(Error::DistinguisherUnavailable);
        }
        for r in &extra {
            if !r.support().iter().all(|g| m.generators.contains(g)) || !dehn_trivial(r, m)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The relator obtained from `template` by renaming `a, b` to `u, v`.
pub fn instantiate(template: &Word, u: usize, v: usize) -> Word {
    template.substitute(&[Word::gen(u), Word::gen(v)])
}

/// Amalgams whose apex is the free product of the sides over the base,
/// optionally with one copy of a template relator tying a new letter of each
/// side together. The choice set for a single pair of new letters is
/// `{∅, {r}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateQuotients {
    pub template: Word,
}

impl Default for TemplateQuotients {
    fn default() -> Self {
        TemplateQuotients {
            template: w(TEMPLATE_RELATOR),
        }
    }
}

impl TemplateQuotients {
    fn side_letters(
        d: &Diagram<SmallCancellation>,
    ) -> (BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>) {
        let letters = |images: &[Word]| {
            images
                .iter()
                .flat_map(|x| x.support())
                .collect::<BTreeSet<usize>>()
        };
        let l1 = letters(&d.g1.images);
        let l2 = letters(&d.g2.images);
        let l0: BTreeSet<usize> = d
            .span
            .m0
            .generators
            .iter()
            .flat_map(|&g| {
                SmallCancellation::map_word(&d.span.m1, &d.g1.images, &Word::gen(g)).support()
            })
            .collect();
        (l0, l1, l2)
    }

    fn allowed_extra(&self, r: &Word, new1: &BTreeSet<usize>, new2: &BTreeSet<usize>) -> bool {
        new1.iter().any(|&u| {
            new2.iter().any(|&v| {
                let c = canonical_relator(r);
                c == canonical_relator(&instantiate(&self.template, u, v))
                    || c == canonical_relator(&instantiate(&self.template, v, u))
            })
        })
    }
}

impl Notion<SmallCancellation> for TemplateQuotients {
    fn name(&self) -> String {
        format!("template-quotient[{}]", self.template)
    }

    fn is_amalgam(&self, inst: &SmallCancellation, d: &Diagram<SmallCancellation>) -> bool {
        if !is_commutative_square(inst, d) || !check_c16(&d.n) {
            return false;
        }
        let (l0, l1, l2) = Self::side_letters(d);
        let meet: BTreeSet<usize> = l1.intersection(&l2).copied().collect();
        let join: BTreeSet<usize> = l1.union(&l2).copied().collect();
        if meet != l0 || join != d.n.generators {
            return false;
        }
        let known: BTreeSet<Word> = SmallCancellation::pushforward(&d.span.m1, &d.g1.images)
            .union(&SmallCancellation::pushforward(&d.span.m2, &d.g2.images))
            .cloned()
            .collect();
        let extra: Vec<&Word> = d.n.relators.difference(&known).collect();
        let new1: BTreeSet<usize> = l1.difference(&l0).copied().collect();
        let new2: BTreeSet<usize> = l2.difference(&l0).copied().collect();
        let mut seen = BTreeSet::new();
        let disjoint = extra
            .iter()
            .all(|r| r.support().into_iter().all(|g| seen.insert(g)));
        disjoint && extra.iter().all(|r| self.allowed_extra(r, &new1, &new2))
    }

    /// The free product: `m1` keeps its letters, new letters of `m2` keep theirs
    /// when free and otherwise move to the least unused letter.
    fn construct(
        &self,
        inst: &SmallCancellation,
        s: &SpanOf<SmallCancellation>,
    ) -> Result<Diagram<SmallCancellation>> {
        if !inst.is_valid_map(&s.m0, &s.m2, &s.f.images) || !inst.is_strong_sub(&s.m0, &s.m1) {
            return Err(Error::PreconditionViolated("malformed span".into()));
        }
        let mut used: BTreeSet<usize> = s.m1.generators.clone();
        let mut images = Vec::new();
        for &y in &s.m2.generators {
            let from_base =
                s.m0.generators
                    .iter()
                    .zip(&s.f.images)
                    .find(|(_, img)| gen_of(img.letters()[0]) == y);
            let img = match from_base {
                Some((&x, fx)) => {
                    if fx.letters()[0] > 0 {
                        Word::gen(x)
                    } else {
                        Word::gen(x).inverse()
                    }
                }
                None => {
                    let t = if used.contains(&y) {
                        (0..)
                            .find(|g| !used.contains(g))
                            .expect("unbounded letters")
                    } else {
                        y
                    };
                    used.insert(t);
                    Word::gen(t)
                }
            };
            images.push(img);
        }
        let mut relators = s.m1.relators.clone();
        relators.extend(SmallCancellation::pushforward(&s.m2, &images));
        let n = SCPresentation {
            generators: used,
            relators,
        };
        let g1 = KEmbedding {
            dom: s.m1.clone(),
            cod: n.clone(),
            images: inst.generators(&s.m1),
        };
        let g2 = KEmbedding {
            dom: s.m2.clone(),
            cod: n.clone(),
            images,
        };
        Ok(AmalgamDiagram {
            span: s.clone(),
            n,
            g1,
            g2,
        })
    }

    /// The free product followed by each single-relator quotient on a pair of
    /// new letters.
    fn enumerate_amalgams(
        &self,
        inst: &SmallCancellation,
        s: &SpanOf<SmallCancellation>,
        bound: usize,
    ) -> Result<Vec<Diagram<SmallCancellation>>> {
        let base = self.construct(inst, s)?;
        let (l0, l1, l2) = Self::side_letters(&base);
        let mut out = vec![base.clone()];
        for &u in l1.difference(&l0) {
            for &v in l2.difference(&l0) {
                if out.len() >= bound {
                    return Ok(out);
                }
                let mut n = base.n.clone();
                n.relators
                    .insert(canonical_relator(&instantiate(&self.template, u, v)));
                if !check_c16(&n) {
                    continue;
                }
                out.push(AmalgamDiagram {
                    span: s.clone(),
                    g1: KEmbedding {
                        cod: n.clone(),
                        ..base.g1.clone()
                    },
                    g2: KEmbedding {
                        cod: n.clone(),
                        ..base.g2.clone()
                    },
                    n,
                });
            }
        }
        Ok(out)
    }
}
