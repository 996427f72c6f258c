//! Finitely generated subgroups of free groups, ordered by "free factor of".
//!
//! A model is a subgroup of `F_n` stored by the free basis read off its
//! canonical folded graph, so equal subgroups are equal values. When the
//! subgroup is a free factor of `F_n` the model also carries a basis
//! completion certificate.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::fold::{rewrite, FoldedGraph};
use super::whitehead::{
    is_free_factor, whitehead_moves, FactorCertificate, FactorVerdict, WhiteheadBounds,
};
use super::word::{Letter, Word};
use crate::class::{
    check_embedding, image, is_commutative_square, restrict, AmalgamDiagram, ClassInstance,
    Diagram, IsoVerdict, KEmbedding, SpanOf,
};
use crate::error::{Error, Result};
use crate::notion::Notion;
use crate::pregeom::ClosureSystem;
use crate::uniqueness::Separation;

/// Largest number of models a single substructure enumeration may return.
const FAMILY_LIMIT: usize = 1 << 10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeFactor {
    pub ambient: usize,
    pub basis: Vec<Word>,
    pub certificate: Option<FactorCertificate>,
}

impl FreeFactor {
    pub fn new(ambient: usize, gens: &[Word]) -> Self {
        let basis = FoldedGraph::canonical(gens).schreier_basis();
        let certificate = is_free_factor(&basis, ambient, WhiteheadBounds::default()).certificate();
        FreeFactor {
            ambient,
            basis,
            certificate,
        }
    }

    /// The subgroup generated by the listed standard generators.
    pub fn standard(ambient: usize, subset: &[usize]) -> Self {
        let gens: Vec<Word> = subset.iter().map(|&i| Word::gen(i)).collect();
        FreeFactor {
            ambient,
            basis: FoldedGraph::canonical(&gens).schreier_basis(),
            certificate: Some(FactorCertificate::standard(ambient, subset)),
        }
    }

    pub fn whole(ambient: usize) -> Self {
        Self::standard(ambient, &(0..ambient).collect::<Vec<_>>())
    }

    /// The image under the automorphism sending generator `i` to `phi[i]`.
    pub fn twisted(&self, phi: &[Word]) -> Self {
        let gens: Vec<Word> = self.basis.iter().map(|w| w.substitute(phi)).collect();
        FreeFactor::new(self.ambient, &gens)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn graph(&self) -> FoldedGraph {
        FoldedGraph::canonical(&self.basis)
    }

    /// Coordinates of `w` in the canonical basis.
    pub fn coords(&self, w: &Word) -> Option<Word> {
        self.graph().trace(w)
    }
}

impl PartialEq for FreeFactor {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis
    }
}

impl Eq for FreeFactor {}

impl Hash for FreeFactor {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.ambient.hash(h);
        self.basis.hash(h);
    }
}

impl PartialOrd for FreeFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FreeFactor {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient, self.rank(), &self.basis).cmp(&(other.ambient, other.rank(), &other.basis))
    }
}

/// Subgroups of free groups with `m <= n` when `m` is a free factor of `n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FreeFactors {
    pub bounds: WhiteheadBounds,
}

impl FreeFactors {
    /// Whether `m` is a free factor of `n`, with the certificate expressed in
    /// the coordinates of `n`'s basis.
    pub fn factor_verdict(&self, m: &FreeFactor, n: &FreeFactor) -> FactorVerdict {
        let coords: Option<Vec<Word>> = m.basis.iter().map(|x| n.coords(x)).collect();
        match coords {
            Some(c) if m.ambient == n.ambient => is_free_factor(&c, n.rank(), self.bounds),
            _ => FactorVerdict::No {
                core_edges: usize::MAX,
                rank: m.rank(),
            },
        }
    }

    /// A basis of `n` whose leading part is a basis of `m`, in ambient words.
    pub fn completion(&self, m: &FreeFactor, n: &FreeFactor) -> Result<(Vec<Word>, Vec<Word>)> {
        match self.factor_verdict(m, n) {
            FactorVerdict::Yes(c) => {
                let lift = |ws: &[Word]| {
                    ws.iter()
                        .map(|w| w.substitute(&n.basis))
                        .collect::<Vec<_>>()
                };
                Ok((lift(c.factor()), lift(c.complement())))
            }
            FactorVerdict::No { .. } => Err(Error::PreconditionViolated(format!(
                "{} is not a free factor of {}",
                show(m),
                show(n)
            ))),
            FactorVerdict::Unknown { bound } => Err(Error::SearchBoundExceeded(bound)),
        }
    }

    /// Images of `dom`'s basis under the map sending each `src[i]` to `dst[i]`,
    /// when `src` generates `dom`.
    fn images_via(&self, dom: &FreeFactor, src: &[Word], dst: &[Word]) -> Option<Vec<Word>> {
        dom.basis
            .iter()
            .map(|b| rewrite(src, b).map(|c| c.substitute(dst)))
            .collect()
    }

    fn pins_consistent(&self, m: &FreeFactor, images: &[Word], pinned: &[(Word, Word)]) -> bool {
        pinned
            .iter()
            .all(|(x, y)| m.coords(x).is_some_and(|c| &c.substitute(images) == y))
    }

    fn pins_generate(&self, m: &FreeFactor, pinned: &[(Word, Word)]) -> bool {
        let xs: Vec<Word> = pinned.iter().map(|p| p.0.clone()).collect();
        FoldedGraph::canonical(&xs) == m.graph()
    }

    /// Injective signed assignments of `m`'s basis into `n`'s basis.
    fn basis_injections(
        &self,
        m: &FreeFactor,
        n: &FreeFactor,
        bound: usize,
        mut keep: impl FnMut(&[Word]) -> bool,
    ) -> Vec<Vec<Word>> {
        let (k, r) = (m.rank(), n.rank());
        let mut out = Vec::new();
        if k > r {
            return out;
        }
        let mut choice: Vec<(usize, bool)> = Vec::with_capacity(k);
        fn go(
            k: usize,
            r: usize,
            n: &FreeFactor,
            choice: &mut Vec<(usize, bool)>,
            out: &mut Vec<Vec<Word>>,
            bound: usize,
            keep: &mut dyn FnMut(&[Word]) -> bool,
        ) {
            if out.len() >= bound {
                return;
            }
            if choice.len() == k {
                let images: Vec<Word> = choice
                    .iter()
                    .map(|&(j, inv)| {
                        if inv {
                            n.basis[j].inverse()
                        } else {
                            n.basis[j].clone()
                        }
                    })
                    .collect();
                if keep(&images) {
                    out.push(images);
                }
                return;
            }
            for j in 0..r {
                if choice.iter().any(|c| c.0 == j) {
                    continue;
                }
                for inv in [false, true] {
                    choice.push((j, inv));
                    go(k, r, n, choice, out, bound, keep);
                    choice.pop();
                }
            }
        }
        go(k, r, n, &mut choice, &mut out, bound, &mut keep);
        out
    }
}

fn show(m: &FreeFactor) -> String {
    let ws: Vec<String> = m.basis.iter().map(Word::to_string).collect();
    format!("<{}> in F{}", ws.join(","), m.ambient)
}

impl ClassInstance for FreeFactors {
    type Model = FreeFactor;
    type Element = Word;

    fn tag(&self) -> String {
        "free-factor".into()
    }

    fn size(&self, m: &FreeFactor) -> usize {
        m.rank()
    }

    fn generators(&self, m: &FreeFactor) -> Vec<Word> {
        m.basis.clone()
    }

    fn contains(&self, m: &FreeFactor, x: &Word) -> bool {
        m.graph().contains(x)
    }

    /// Shortlex enumeration of coordinate words, evaluated in the basis.
    fn elements(&self, m: &FreeFactor, bound: usize) -> Vec<Word> {
        let letters: Vec<Letter> = (0..m.rank())
            .flat_map(|i| [i as Letter + 1, -(i as Letter + 1)])
            .collect();
        let mut layer = vec![Word::identity()];
        let mut out = vec![Word::identity()];
        while out.len() < bound && !letters.is_empty() {
            let mut next = Vec::new();
            for c in &layer {
                for &l in &letters {
                    if c.letters().last() == Some(&-l) {
                        continue;
                    }
                    let d = c.mul(&Word::new([l]));
                    out.push(d.substitute(&m.basis));
                    next.push(d);
                    if out.len() >= bound {
                        return out;
                    }
                }
            }
            layer = next;
        }
        out.truncate(bound);
        out
    }

    fn is_subset(&self, m: &FreeFactor, n: &FreeFactor) -> bool {
        m.ambient == n.ambient && {
            let g = n.graph();
            m.basis.iter().all(|x| g.contains(x))
        }
    }

    fn is_strong_sub(&self, m: &FreeFactor, n: &FreeFactor) -> bool {
        self.factor_verdict(m, n).is_yes()
    }

    fn span_in(&self, n: &FreeFactor, a: &[Word]) -> Result<FreeFactor> {
        let g = n.graph();
        if !a.iter().all(|x| g.contains(x)) {
            return Err(Error::PreconditionViolated(
                "generators outside the ambient model".into(),
            ));
        }
        Ok(FreeFactor::new(n.ambient, a))
    }

    /// Free factors generated by a basis of `containing` together with a
    /// subset of one fixed complement in `n`.
    fn substructures(&self, n: &FreeFactor, containing: &FreeFactor) -> Result<Vec<FreeFactor>> {
        let (base, rest) = match self.completion(containing, n) {
            Ok(c) => c,
            Err(Error::PreconditionViolated(_)) => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        if rest.len() >= 10 || 1usize << rest.len() > FAMILY_LIMIT {
            return Err(Error::TooLarge {
                size: 1 << rest.len().min(63),
                limit: FAMILY_LIMIT as u64,
            });
        }
        let mut out: Vec<FreeFactor> = (0u32..1 << rest.len())
            .map(|mask| {
                let mut gens = base.clone();
                gens.extend(
                    rest.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, w)| w.clone()),
                );
                FreeFactor::new(n.ambient, &gens)
            })
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn intersect(&self, a: &FreeFactor, b: &FreeFactor) -> Option<FreeFactor> {
        if a.ambient != b.ambient {
            return None;
        }
        let basis = a.graph().intersect(&b.graph()).schreier_basis();
        Some(FreeFactor::new(a.ambient, &basis))
    }

    fn apply(&self, e: &KEmbedding<FreeFactor, Word>, x: &Word) -> Word {
        e.dom
            .coords(x)
            .expect("argument lies in the domain")
            .substitute(&e.images)
    }

    fn is_valid_map(&self, dom: &FreeFactor, cod: &FreeFactor, images: &[Word]) -> bool {
        if images.len() != dom.rank() {
            return false;
        }
        match self.span_in(cod, images) {
            // A generating set of size equal to the rank is a basis, so the map is injective.
            Ok(img) => img.rank() == images.len() && self.is_strong_sub(&img, cod),
            Err(_) => false,
        }
    }

    fn embeddings(
        &self,
        m: &FreeFactor,
        n: &FreeFactor,
        pinned: &[(Word, Word)],
        bound: usize,
    ) -> Vec<Vec<Word>> {
        if bound == 0 {
            return Vec::new();
        }
        if self.pins_generate(m, pinned) {
            let (xs, ys): (Vec<Word>, Vec<Word>) = pinned.iter().cloned().unzip();
            return match self.images_via(m, &xs, &ys) {
                Some(images)
                    if self.pins_consistent(m, &images, pinned)
                        && self.is_valid_map(m, n, &images) =>
                {
                    vec![images]
                }
                _ => Vec::new(),
            };
        }
        self.basis_injections(m, n, bound, |images| {
            self.pins_consistent(m, images, pinned)
        })
    }

    fn iso_search(
        &self,
        m: &FreeFactor,
        n: &FreeFactor,
        pinned: &[(Word, Word)],
    ) -> IsoVerdict<Word> {
        if m.rank() != n.rank() {
            return IsoVerdict::Absent {
                reason: format!("rank {} vs {}", m.rank(), n.rank()),
            };
        }
        if self.pins_generate(m, pinned) {
            let (xs, ys): (Vec<Word>, Vec<Word>) = pinned.iter().cloned().unzip();
            return match self.images_via(m, &xs, &ys) {
                None => IsoVerdict::Absent {
                    reason: "pinned sources do not generate".into(),
                },
                Some(images) if !self.pins_consistent(m, &images, pinned) => IsoVerdict::Absent {
                    reason: "pinned values are not a homomorphism".into(),
                },
                Some(images)
                    if FreeFactor::new(n.ambient, &images) == *n
                        && self.is_valid_map(m, n, &images) =>
                {
                    IsoVerdict::Found(images)
                }
                Some(_) => IsoVerdict::Absent {
                    reason: "forced map is not onto".into(),
                },
            };
        }
        let found =
            self.basis_injections(m, n, 1, |images| self.pins_consistent(m, images, pinned));
        match found.into_iter().next() {
            Some(images) => IsoVerdict::Found(images),
            None if pinned.is_empty() => unreachable!("equal ranks admit a basis bijection"),
            None => IsoVerdict::Unknown {
                bound: 1 << (2 * m.rank()),
            },
        }
    }

    fn isomorphisms_from(
        &self,
        m: &FreeFactor,
        bound: usize,
        seed: u64,
    ) -> Vec<KEmbedding<FreeFactor, Word>> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![KEmbedding {
            dom: m.clone(),
            cod: m.clone(),
            images: m.basis.clone(),
        }];
        let wider = FreeFactor::new(m.ambient + 1, &m.basis);
        out.push(KEmbedding {
            dom: m.clone(),
            cod: wider,
            images: m.basis.clone(),
        });
        let mut attempts = 0;
        while out.len() < bound && attempts < 8 * bound {
            attempts += 1;
            let phi = random_automorphism(m.ambient, &mut rng, 2);
            let images: Vec<Word> = m.basis.iter().map(|b| b.substitute(&phi)).collect();
            let cod = FreeFactor::new(m.ambient, &images);
            let e = KEmbedding {
                dom: m.clone(),
                cod,
                images,
            };
            if !out.contains(&e) {
                out.push(e);
            }
        }
        out.truncate(bound.max(1));
        out
    }

    fn superstructures(&self, n: &FreeFactor) -> Vec<FreeFactor> {
        self.substructures(&FreeFactor::whole(n.ambient), n)
            .ok()
            .filter(|v| !v.is_empty())
            .unwrap_or_else(|| vec![n.clone()])
    }

    fn prime_minimal(&self, ambient: &FreeFactor) -> Option<FreeFactor> {
        Some(FreeFactor::standard(ambient.ambient, &[]))
    }

    fn describe(&self, m: &FreeFactor) -> String {
        format!("rank={} in F{}", m.rank(), m.ambient)
    }
}

/// An automorphism of `F_rank` as generator images: a random signed
/// permutation followed by `moves` random Whitehead moves.
pub fn random_automorphism(rank: usize, rng: &mut impl Rng, moves: usize) -> Vec<Word> {
    let mut perm: Vec<usize> = (0..rank).collect();
    perm.shuffle(rng);
    let mut phi: Vec<Word> = perm
        .iter()
        .map(|&j| {
            if rng.gen_bool(0.5) {
                Word::gen(j).inverse()
            } else {
                Word::gen(j)
            }
        })
        .collect();
    let all = whitehead_moves(rank);
    for _ in 0..moves {
        if let Some(m) = all.choose(rng) {
            phi = phi.iter().map(|w| w.substitute(&m.images)).collect();
        }
    }
    phi
}

/// The image of a standard free factor of rank `k` under a random automorphism.
pub fn random_factor(ambient: usize, k: usize, rng: &mut impl Rng, moves: usize) -> FreeFactor {
    let phi = random_automorphism(ambient, rng, moves);
    let gens: Vec<Word> = phi[..k.min(ambient)].to_vec();
    let cert = FactorCertificate {
        ambient,
        basis: phi.clone(),
        factor_rank: k.min(ambient),
    };
    FreeFactor {
        ambient,
        basis: FoldedGraph::canonical(&gens).schreier_basis(),
        certificate: Some(cert),
    }
}

/// Amalgams that are free products with amalgamation realised inside the apex:
/// the images meet in the image of the base, generate the apex, and ranks add up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FreeAmalgam;

impl FreeAmalgam {
    fn images(
        inst: &FreeFactors,
        d: &Diagram<FreeFactors>,
    ) -> Option<(FreeFactor, FreeFactor, FreeFactor)> {
        let a0 = image(inst, &restrict(inst, &d.g1, &d.span.m0)).ok()?;
        let a1 = image(inst, &d.g1).ok()?;
        let a2 = image(inst, &d.g2).ok()?;
        Some((a0, a1, a2))
    }
}

impl Notion<FreeFactors> for FreeAmalgam {
    fn name(&self) -> String {
        "free-amalgam".into()
    }

    fn is_amalgam(&self, inst: &FreeFactors, d: &Diagram<FreeFactors>) -> bool {
        if !is_commutative_square(inst, d) {
            return false;
        }
        let Some((a0, a1, a2)) = Self::images(inst, d) else {
            return false;
        };
        let joint: Vec<Word> = a1.basis.iter().chain(&a2.basis).cloned().collect();
        inst.intersect(&a1, &a2).as_ref() == Some(&a0)
            && FreeFactor::new(d.n.ambient, &joint) == d.n
            && d.n.rank() + a0.rank() == a1.rank() + a2.rank()
    }

    /// The apex is `F_r` with `r = rank m1 + rank m2 - rank m0`: the base goes
    /// to the first generators, the two complements to the remaining ones.
    fn construct(
        &self,
        inst: &FreeFactors,
        s: &SpanOf<FreeFactors>,
    ) -> Result<Diagram<FreeFactors>> {
        if !check_embedding(inst, &s.f)? || s.f.dom != s.m0 || s.f.cod != s.m2 {
            return Err(Error::PreconditionViolated("malformed span".into()));
        }
        let (b0, c1) = inst.completion(&s.m0, &s.m1)?;
        let fb0: Vec<Word> = b0.iter().map(|x| inst.apply(&s.f, x)).collect();
        let f_img = FreeFactor::new(s.m2.ambient, &fb0);
        let (_, c2) = inst.completion(&f_img, &s.m2)?;
        let (k, r1) = (b0.len(), s.m1.rank());
        let r = r1 + s.m2.rank() - k;
        let n = FreeFactor::whole(r);
        let src1: Vec<Word> = b0.iter().chain(&c1).cloned().collect();
        let dst1: Vec<Word> = (0..r1).map(Word::gen).collect();
        let src2: Vec<Word> = fb0.iter().chain(&c2).cloned().collect();
        let dst2: Vec<Word> = (0..k).chain(r1..r).map(Word::gen).collect();
        let fail = || Error::VerificationFailed("completion does not generate".into());
        let g1 = KEmbedding {
            dom: s.m1.clone(),
            cod: n.clone(),
            images: inst.images_via(&s.m1, &src1, &dst1).ok_or_else(fail)?,
        };
        let g2 = KEmbedding {
            dom: s.m2.clone(),
            cod: n.clone(),
            images: inst.images_via(&s.m2, &src2, &dst2).ok_or_else(fail)?,
        };
        Ok(AmalgamDiagram {
            span: s.clone(),
            n,
            g1,
            g2,
        })
    }

    fn inclusion_candidate(
        &self,
        _inst: &FreeFactors,
        _m0: &FreeFactor,
        m1: &FreeFactor,
        m2: &FreeFactor,
        n: &FreeFactor,
    ) -> Option<FreeFactor> {
        let joint: Vec<Word> = m1.basis.iter().chain(&m2.basis).cloned().collect();
        Some(FreeFactor::new(n.ambient, &joint))
    }
}

impl Separation for FreeFactors {}

/// Word support: the standard factor on the letters occurring in `a`, cut down
/// to `m`. A pregeometry only on standard factors of one ambient basis.
impl ClosureSystem for FreeFactors {
    fn closure(&self, m: &FreeFactor, a: &[Word]) -> Result<FreeFactor> {
        let mut letters: Vec<usize> = a.iter().flat_map(|w| w.support()).collect();
        letters.sort_unstable();
        letters.dedup();
        self.intersect(m, &FreeFactor::standard(m.ambient, &letters))
            .ok_or_else(|| Error::AmbientMismatch("closure across ambients".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::word::w;
    use super::*;
    use crate::class::{by_inclusion, span_by_inclusion};

    #[test]
    fn square_generator_is_not_a_factor() {
        let f = FreeFactors::default();
        let fa = FreeFactor::standard(1, &[0]);
        assert!(!f.is_valid_map(&fa, &fa, &[w("aa")]));
        assert!(f.is_valid_map(&fa, &fa, &[w("A")]));
    }

    #[test]
    fn coordinate_factors_amalgamate_freely() {
        let f = FreeFactors::default();
        let one = FreeFactor::standard(2, &[]);
        let a = FreeFactor::standard(2, &[0]);
        let b = FreeFactor::standard(2, &[1]);
        let ab = FreeFactor::whole(2);
        assert!(FreeAmalgam.is_amalgam(&f, &by_inclusion(&f, &one, &a, &b, &ab)));
        assert!(!FreeAmalgam.is_amalgam(&f, &by_inclusion(&f, &one, &a, &a, &ab)));
        let d = FreeAmalgam
            .construct(&f, &span_by_inclusion(&f, &one, &a, &b))
            .unwrap();
        assert!(FreeAmalgam.is_amalgam(&f, &d));
        assert_eq!(d.n.rank(), 2);
    }

    #[test]
    fn construct_over_a_twisted_base() {
        let f = FreeFactors::default();
        let m0 = FreeFactor::new(3, &[w("abb")]);
        let m1 = FreeFactor::new(3, &[w("abb"), w("c")]);
        let m2 = FreeFactor::new(3, &[w("abb"), w("b")]);
        assert!(f.is_strong_sub(&m0, &m1) && f.is_strong_sub(&m0, &m2));
        let d = FreeAmalgam
            .construct(&f, &span_by_inclusion(&f, &m0, &m1, &m2))
            .unwrap();
        assert!(FreeAmalgam.is_amalgam(&f, &d));
        assert_eq!(d.n.rank(), 3);
    }
}
