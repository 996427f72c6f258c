//! The independence relation induced by a notion of amalgamation, Galois
//! types of finite tuples, and the axiom suite for both.

use std::collections::HashMap;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::json;

use crate::class::{apply, compose, ClassInstance, Span};
use crate::error::{Error, Result};
use crate::notion::{oplus, Notion};
use crate::report::{to_value, PropertyReport, Tally};
use crate::seqamal::{assemble_inside, decompose_into_small, mu_witness, piece_images};

/// `A ⫝^N_M B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct IndepQuery<M, E> {
    pub a: Vec<E>,
    pub m: M,
    pub b: Vec<E>,
    pub n: M,
}

/// Models `m1 ⊇ A ∪ M`, `m2 ⊇ B ∪ M` inside `N` whose sub-amalgam exists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WitnessPair<M> {
    pub m1: M,
    pub m2: M,
    pub sub_amalgam: M,
}

/// The Galois type of `tuple` over `base`, computed in `ambient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct GaloisType<M, E> {
    pub tuple: Vec<E>,
    pub base: M,
    pub ambient: M,
}

pub type Query<I> = IndepQuery<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;
pub type TypeOf<I> = GaloisType<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

/// Submodels of `n` that contain the set `a` and the model `m`.
fn candidates<I: ClassInstance>(
    inst: &I,
    a: &[I::Element],
    m: &I::Model,
    n: &I::Model,
) -> Result<Vec<I::Model>> {
    Ok(inst
        .substructures(n, m)?
        .into_iter()
        .filter(|c| a.iter().all(|x| inst.contains(c, x)))
        .collect())
}

/// Search for a witness pair. With `exact`, the candidate enumerator is taken to
/// list every submodel and an empty search means "forks"; otherwise an empty
/// search is [`Error::GeneratorExhaustedInexact`].
pub fn nonforks<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    q: &Query<I>,
    exact: bool,
) -> Result<Option<WitnessPair<I::Model>>> {
    if !inst.is_strong_sub(&q.m, &q.n) || !q.a.iter().chain(&q.b).all(|x| inst.contains(&q.n, x)) {
        return Err(Error::PreconditionViolated(
            "query sets must lie in the ambient".into(),
        ));
    }
    // the least candidates first; any verified pair is a witness
    let least = |set: &[I::Element]| {
        let mut g = set.to_vec();
        g.extend(inst.generators(&q.m));
        inst.generated_sub(&q.n, &g).ok()
    };
    if let (Some(m1), Some(m2)) = (least(&q.a), least(&q.b)) {
        if let Some(sub) = oplus(inst, notion, &m1, &m2, &q.m, &q.n)? {
            return Ok(Some(WitnessPair {
                m1,
                m2,
                sub_amalgam: sub,
            }));
        }
    }
    let left = candidates(inst, &q.a, &q.m, &q.n)?;
    let right = candidates(inst, &q.b, &q.m, &q.n)?;
    for m1 in &left {
        for m2 in &right {
            if let Some(sub) = oplus(inst, notion, m1, m2, &q.m, &q.n)? {
                return Ok(Some(WitnessPair {
                    m1: m1.clone(),
                    m2: m2.clone(),
                    sub_amalgam: sub,
                }));
            }
        }
    }
    if exact {
        Ok(None)
    } else {
        Err(Error::GeneratorExhaustedInexact(left.len() * right.len()))
    }
}

/// Galois-type equality, with an exact override where the instance has one.
pub trait GaloisTypes: ClassInstance + Sized {
    fn gtype_equal(&self, p: &TypeOf<Self>, q: &TypeOf<Self>) -> Result<bool> {
        gtype_equal_by_search(self, p, q)
    }
}

fn type_pre<I: ClassInstance>(p: &TypeOf<I>, q: &TypeOf<I>) -> Result<()> {
    if p.base != q.base || p.tuple.len() != q.tuple.len() {
        return Err(Error::PreconditionViolated(
            "types must share base and length".into(),
        ));
    }
    Ok(())
}

/// Bounded search for an embedding of `p.ambient` into a superstructure of
/// `q.ambient` fixing the base and sending `p.tuple` to `q.tuple`.
///
/// Membership in the base is decided exactly; beyond that a failed search is
/// [`Error::SearchBoundExceeded`].
pub fn gtype_equal_by_search<I: ClassInstance>(
    inst: &I,
    p: &TypeOf<I>,
    q: &TypeOf<I>,
) -> Result<bool> {
    type_pre::<I>(p, q)?;
    for (x, y) in p.tuple.iter().zip(&q.tuple) {
        let (xin, yin) = (inst.contains(&p.base, x), inst.contains(&q.base, y));
        if xin != yin || (xin && x != y) {
            return Ok(false);
        }
    }
    let mut pinned: Vec<_> = inst
        .generators(&p.base)
        .into_iter()
        .map(|g| (g.clone(), g))
        .collect();
    pinned.extend(p.tuple.iter().cloned().zip(q.tuple.iter().cloned()));
    let outer = inst.superstructures(&q.ambient);
    for target in &outer {
        if !inst.embeddings(&p.ambient, target, &pinned, 1).is_empty() {
            return Ok(true);
        }
    }
    Err(Error::SearchBoundExceeded(outer.len()))
}

/// A nonforking extension of `p` to `m1`: the type of the image of `p.tuple`
/// in an amalgam of `p.ambient` and `m1` over `p.base`, together with the
/// embedding of `m1` into that amalgam.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct Extension<M, E> {
    pub ty: GaloisType<M, E>,
    pub base_map: crate::class::KEmbedding<M, E>,
}

pub fn nonforking_extension<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    p: &TypeOf<I>,
    m1: &I::Model,
    exact: bool,
) -> Result<Extension<I::Model, I::Element>> {
    if !inst.is_strong_sub(&p.base, m1) {
        return Err(Error::PreconditionViolated(
            "extension base must contain the type's base".into(),
        ));
    }
    if *m1 == p.base {
        return Ok(Extension {
            ty: p.clone(),
            base_map: crate::class::identity(inst, m1),
        });
    }
    let fail = |reason: String| Error::AmalgamConstructionFailed { index: 0, reason };
    let span = Span {
        m0: p.base.clone(),
        m1: p.ambient.clone(),
        m2: m1.clone(),
        f: crate::class::inclusion(inst, &p.base, m1),
    };
    let d = notion
        .construct(inst, &span)
        .map_err(|e| fail(e.to_string()))?;
    let tuple: Vec<_> = p.tuple.iter().map(|x| apply(inst, &d.g1, x)).collect();
    let new_base = crate::class::image(inst, &d.g2)?;
    let old_base = crate::class::image(inst, &compose(inst, &d.g2, &span.f))?;
    let q = IndepQuery {
        a: tuple.clone(),
        m: old_base,
        b: inst.generators(&new_base),
        n: d.n.clone(),
    };
    match nonforks(inst, notion, &q, exact) {
        Ok(Some(_)) => Ok(Extension {
            ty: GaloisType {
                tuple,
                base: new_base,
                ambient: d.n.clone(),
            },
            base_map: d.g2,
        }),
        Ok(None) => Err(fail("constructed extension forks".into())),
        Err(e) => Err(fail(e.to_string())),
    }
}

/// A pool of submodels of `n` above `bottom`, with the order precomputed.
struct Frame<'a, I: ClassInstance> {
    inst: &'a I,
    n: I::Model,
    subs: Vec<I::Model>,
    index: HashMap<I::Model, usize>,
    /// `le[x][y]`: `subs[x] <= subs[y]`.
    le: Vec<Vec<bool>>,
}

impl<'a, I: ClassInstance> Frame<'a, I> {
    fn new(inst: &'a I, bottom: &I::Model, n: &I::Model) -> Result<Self> {
        let subs = inst.substructures(n, bottom)?;
        let index = subs
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let le = subs
            .iter()
            .map(|x| subs.iter().map(|y| inst.is_strong_sub(x, y)).collect())
            .collect();
        Ok(Frame {
            inst,
            n: n.clone(),
            subs,
            index,
            le,
        })
    }

    fn gens(&self, i: usize) -> Vec<I::Element> {
        self.inst.generators(&self.subs[i])
    }

    fn join(&self, a: usize, b: usize) -> Option<usize> {
        let mut g = self.gens(a);
        g.extend(self.gens(b));
        let s = self.inst.span_in(&self.n, &g).ok()?;
        self.index.get(&s).copied()
    }
}

/// Exact independence table `T[a][m][b]` over a frame, where `A` and `B` are the
/// generators of submodels.
struct Table {
    k: usize,
    cells: Vec<Option<bool>>,
}

impl Table {
    fn get(&self, a: usize, m: usize, b: usize) -> Option<bool> {
        self.cells[(a * self.k + m) * self.k + b]
    }
}

fn build_table<I: ClassInstance, N: Notion<I>>(frame: &Frame<I>, notion: &N) -> Result<Table> {
    let k = frame.subs.len();
    let inst = frame.inst;
    // subset[a][y]: the generators of a lie in y
    let subset: Vec<Vec<bool>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|y| inst.is_subset(&frame.subs[a], &frame.subs[y]))
                .collect()
        })
        .collect();
    let mut memo: HashMap<(usize, usize, usize), bool> = HashMap::new();
    let mut cells = vec![None; k * k * k];
    for m in 0..k {
        let cands: Vec<Vec<usize>> = (0..k)
            .map(|a| (0..k).filter(|&y| subset[a][y] && frame.le[m][y]).collect())
            .collect();
        for a in 0..k {
            for b in 0..k {
                let mut found = false;
                'search: for &x in &cands[a] {
                    for &y in &cands[b] {
                        let key = if x <= y { (x, y, m) } else { (y, x, m) };
                        let ok = match memo.get(&key) {
                            Some(&v) => v,
                            None => {
                                let v = oplus(
                                    inst,
                                    notion,
                                    &frame.subs[x],
                                    &frame.subs[y],
                                    &frame.subs[m],
                                    &frame.n,
                                )?
                                .is_some();
                                memo.insert(key, v);
                                v
                            }
                        };
                        if ok {
                            found = true;
                            break 'search;
                        }
                    }
                }
                cells[(a * k + m) * k + b] = Some(found);
            }
        }
    }
    Ok(Table { k, cells })
}

/// Decide every query `(A, M, B)` with `A`, `B` generator sets of submodels of
/// `n` above `bottom`; returns `(A, M, B, independent)` in frame order.
pub fn independence_table<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    bottom: &I::Model,
    n: &I::Model,
) -> Result<Vec<(I::Model, I::Model, I::Model, bool)>> {
    let frame = Frame::new(inst, bottom, n)?;
    let table = build_table(&frame, notion)?;
    let k = frame.subs.len();
    let mut out = Vec::with_capacity(k * k * k);
    for a in 0..k {
        for m in 0..k {
            for b in 0..k {
                let v = table.get(a, m, b).expect("filled");
                out.push((
                    frame.subs[a].clone(),
                    frame.subs[m].clone(),
                    frame.subs[b].clone(),
                    v,
                ));
            }
        }
    }
    Ok(out)
}

type Cache<'a, I> =
    HashMap<(<I as ClassInstance>::Model, <I as ClassInstance>::Model), (Frame<'a, I>, Table)>;

/// Independence of three submodels read from the (cached) table of `(bot, amb)`.
fn cached_lookup<'a, I: ClassInstance, N: Notion<I>>(
    inst: &'a I,
    notion: &N,
    cache: &mut Cache<'a, I>,
    bot: &I::Model,
    amb: &I::Model,
    models: [&I::Model; 3],
) -> Result<Option<bool>> {
    let key = (bot.clone(), amb.clone());
    if !cache.contains_key(&key) {
        let f = Frame::new(inst, bot, amb)?;
        let tb = build_table(&f, notion)?;
        cache.insert(key.clone(), (f, tb));
    }
    let (f, tb) = &cache[&key];
    let idx: Option<Vec<usize>> = models.iter().map(|x| f.index.get(*x).copied()).collect();
    Ok(idx.and_then(|i| tb.get(i[0], i[1], i[2])))
}

/// Options for [`check_indep_axioms`].
#[derive(Debug, Clone, Copy)]
pub struct IndepBounds {
    /// Candidate enumeration lists every submodel.
    pub exact: bool,
    /// Isomorphisms per frame for invariance.
    pub isos: usize,
    /// Elements enumerated per model for type-level checks.
    pub elements: usize,
    pub seed: u64,
}

impl Default for IndepBounds {
    fn default() -> Self {
        IndepBounds {
            exact: true,
            isos: 3,
            elements: 64,
            seed: 0,
        }
    }
}

/// The axioms of the induced independence relation over every query in each
/// frame `(bottom, n)`, plus uniqueness of nonforking extensions of 1-types.
pub fn check_indep_axioms<I: GaloisTypes, N: Notion<I>>(
    inst: &I,
    notion: &N,
    frames: &[(I::Model, I::Model)],
    bounds: IndepBounds,
) -> Result<Vec<PropertyReport>> {
    if frames.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut existence = Tally::new("existence");
    let mut symmetry = Tally::new("symmetry");
    let mut right_mono = Tally::new("right-monotonicity");
    let mut right_norm = Tally::new("right-normality");
    let mut base_mono = Tally::new("base-monotonicity");
    let mut transitivity = Tally::new("transitivity");
    let mut invariance = Tally::new("invariance");
    let mut extension = Tally::new("extension");
    let mut top1 = Tally::new("top-monotonicity-1");
    let mut top2 = Tally::new("top-monotonicity-2");
    let mut locality = Tally::new("local-character");
    let mut continuity = Tally::new("continuity");
    let mut uniqueness = Tally::new("nonforking-uniqueness");

    for (fi, (bottom, n)) in frames.iter().enumerate() {
        let frame = Frame::new(inst, bottom, n)?;
        let t = build_table(&frame, notion)?;
        let k = frame.subs.len();
        let s = |i: usize| to_value(&frame.subs[i]);
        let w3 = |a: usize, m: usize, b: usize| json!({ "a": s(a), "m": s(m), "b": s(b), "n": to_value(n) });
        let le = &frame.le;
        let sub = |x: usize, y: usize| inst.is_subset(&frame.subs[x], &frame.subs[y]);
        let joins: Vec<Vec<Option<usize>>> = (0..k)
            .map(|b| (0..k).map(|m| frame.join(b, m)).collect())
            .collect();

        for a in 0..k {
            for m in 0..k {
                match t.get(a, m, m) {
                    Some(v) => existence.record(v, || w3(a, m, m)),
                    None => existence.unknown(),
                }
                for b in 0..k {
                    let Some(ab) = t.get(a, m, b) else { continue };
                    if let Some(ba) = t.get(b, m, a) {
                        symmetry.record(ab == ba, || w3(a, m, b));
                    }
                    if let Some(j) = joins[b][m] {
                        if let Some(v) = t.get(a, m, j) {
                            right_norm.record(ab == v, || w3(a, m, b));
                        }
                    }
                    if !ab {
                        continue;
                    }
                    for b2 in 0..k {
                        if sub(b2, b) {
                            if let Some(v) = t.get(a, m, b2) {
                                right_mono.record(
                                    v,
                                    || json!({ "holds": w3(a, m, b), "smaller": s(b2) }),
                                );
                            }
                        }
                        // base monotonicity: m <= b2 ⊆ b
                        if le[m][b2] && sub(b2, b) {
                            if let Some(v) = t.get(a, b2, b) {
                                base_mono.record(
                                    v,
                                    || json!({ "holds": w3(a, m, b), "new-base": s(b2) }),
                                );
                            }
                        }
                    }
                    // continuity along m <= b <= c: every stage independent, so is the top
                    if le[m][b] {
                        for c in (0..k).filter(|&c| le[b][c] && le[m][c]) {
                            if t.get(a, m, c) == Some(true) {
                                let stages = [b, c].iter().all(|&st| t.get(a, m, st) == Some(true));
                                continuity.record(stages, || w3(a, m, c));
                            }
                        }
                    }
                }
            }
        }
        // transitivity over m0 <= m1 <= m2
        for a in 0..k {
            for m0 in 0..k {
                for m1 in 0..k {
                    if !le[m0][m1] || t.get(a, m0, m1) != Some(true) {
                        continue;
                    }
                    for m2 in 0..k {
                        if le[m1][m2] && t.get(a, m1, m2) == Some(true) {
                            match t.get(a, m0, m2) {
                                Some(v) => transitivity.record(
                                    v,
                                    || json!({ "a": s(a), "chain": [s(m0), s(m1), s(m2)] }),
                                ),
                                None => transitivity.unknown(),
                            }
                        }
                    }
                }
            }
        }

        // invariance and top monotonicity, read from tables of the other ambients
        let isos = inst.isomorphisms_from(n, bounds.isos, bounds.seed ^ fi as u64);
        let outer: Vec<_> = inst
            .superstructures(n)
            .into_iter()
            .filter(|o| o != n)
            .collect();
        let mut cache: Cache<'_, I> = HashMap::new();
        for h in &isos {
            let moved = |x: &I::Model| -> Result<I::Model> {
                let g: Vec<_> = inst
                    .generators(x)
                    .iter()
                    .map(|y| apply(inst, h, y))
                    .collect();
                inst.span_in(&h.cod, &g)
            };
            let hb = moved(bottom)?;
            let hs: Vec<I::Model> = frame.subs.iter().map(moved).collect::<Result<_>>()?;
            for a in 0..k {
                for m in 0..k {
                    for b in 0..k {
                        let Some(v) = t.get(a, m, b) else { continue };
                        match cached_lookup(
                            inst,
                            notion,
                            &mut cache,
                            &hb,
                            &h.cod,
                            [&hs[a], &hs[m], &hs[b]],
                        )? {
                            Some(hv) => invariance.record(
                                hv == v,
                                || json!({ "query": w3(a, m, b), "iso": to_value(h) }),
                            ),
                            None => invariance.unknown(),
                        }
                    }
                }
            }
        }
        for a in 0..k {
            for m in 0..k {
                for b in 0..k {
                    if t.get(a, m, b) != Some(true) {
                        continue;
                    }
                    let models = [&frame.subs[a], &frame.subs[m], &frame.subs[b]];
                    for big in &outer {
                        match cached_lookup(inst, notion, &mut cache, bottom, big, models)? {
                            Some(v) => top1.record(
                                v,
                                || json!({ "query": w3(a, m, b), "outer": to_value(big) }),
                            ),
                            None => top1.unknown(),
                        }
                    }
                    let mut all = frame.gens(a);
                    all.extend(frame.gens(b));
                    all.extend(frame.gens(m));
                    let Ok(floor) = inst.span_in(n, &all) else {
                        continue;
                    };
                    for small in inst.substructures(n, &floor).unwrap_or_default() {
                        if small == *n || !inst.is_strong_sub(bottom, &small) {
                            continue;
                        }
                        match cached_lookup(inst, notion, &mut cache, bottom, &small, models)? {
                            Some(v) => top2.record(
                                v,
                                || json!({ "query": w3(a, m, b), "inner": to_value(&small) }),
                            ),
                            None => top2.unknown(),
                        }
                    }
                }
            }
        }

        // type-level checks on 1-types realized in n
        let elements = inst.elements(n, bounds.elements);
        for m in 0..k {
            let base = &frame.subs[m];
            for x in &elements {
                let p = GaloisType {
                    tuple: vec![x.clone()],
                    base: base.clone(),
                    ambient: n.clone(),
                };
                for m1 in 0..k {
                    if !le[m][m1] {
                        continue;
                    }
                    match nonforking_extension(inst, notion, &p, &frame.subs[m1], bounds.exact) {
                        Ok(_) => extension.pass(),
                        Err(e) => extension.record(false, || json!({ "type": to_value(&p), "over": s(m1), "error": e.to_string() })),
                    }
                    check_unique_extension(
                        inst,
                        notion,
                        &frame,
                        &t,
                        m,
                        m1,
                        x,
                        &elements,
                        bounds.exact,
                        &mut uniqueness,
                    )?;
                }
                match check_local_character(inst, notion, bottom, base, n, x, bounds.exact) {
                    Ok(true) => locality.pass(),
                    Ok(false) => locality.record(
                        false,
                        || json!({ "element": to_value(x), "m": to_value(base), "n": to_value(n) }),
                    ),
                    Err(_) => locality.unknown(),
                }
            }
        }
    }
    Ok(vec![
        existence.finish(),
        symmetry.finish(),
        right_mono.finish(),
        right_norm.finish(),
        base_mono.finish(),
        transitivity.finish(),
        invariance.finish(),
        extension.finish(),
        top1.finish(),
        top2.finish(),
        locality.finish().with_note(
            "finite substitute: base generated by the element's support in a decomposition",
        ),
        continuity
            .finish()
            .with_note("eventually constant finite chains only"),
        uniqueness.finish(),
    ])
}

/// All realizations `y` in the frame of the type of `x` over `subs[m]` that do
/// not fork over `subs[m]` from `subs[m1]` must share one type over `subs[m1]`.
#[allow(clippy::too_many_arguments)]
fn check_unique_extension<I: GaloisTypes, N: Notion<I>>(
    inst: &I,
    notion: &N,
    frame: &Frame<I>,
    table: &Table,
    m: usize,
    m1: usize,
    x: &I::Element,
    elements: &[I::Element],
    exact: bool,
    tally: &mut Tally,
) -> Result<()> {
    let n = &frame.n;
    let base = &frame.subs[m];
    let over = &frame.subs[m1];
    let p = GaloisType {
        tuple: vec![x.clone()],
        base: base.clone(),
        ambient: n.clone(),
    };
    let mut reps: Vec<I::Element> = Vec::new();
    for y in elements {
        let py = GaloisType {
            tuple: vec![y.clone()],
            base: base.clone(),
            ambient: n.clone(),
        };
        match inst.gtype_equal(&p, &py) {
            Ok(true) => {}
            Ok(false) => continue,
            Err(_) => {
                tally.unknown();
                continue;
            }
        }
        let cell = inst
            .span_in(n, std::slice::from_ref(y))
            .ok()
            .and_then(|s| frame.index.get(&s).copied());
        if let Some(v) = cell.and_then(|c| table.get(c, m, m1)) {
            if v {
                reps.push(y.clone());
            }
            continue;
        }
        let q = IndepQuery {
            a: vec![y.clone()],
            m: base.clone(),
            b: inst.generators(over),
            n: n.clone(),
        };
        match nonforks(inst, notion, &q, exact) {
            Ok(Some(_)) => reps.push(y.clone()),
            Ok(None) => {}
            Err(_) => tally.unknown(),
        }
    }
    for (i, y0) in reps.iter().enumerate() {
        for y1 in &reps[i + 1..] {
            let t0 = GaloisType {
                tuple: vec![y0.clone()],
                base: over.clone(),
                ambient: n.clone(),
            };
            let t1 = GaloisType {
                tuple: vec![y1.clone()],
                base: over.clone(),
                ambient: n.clone(),
            };
            match inst.gtype_equal(&t0, &t1) {
                Ok(v) => tally.record(v, || json!({ "type": to_value(&p), "over": to_value(over), "pair": [to_value(y0), to_value(y1)] })),
                Err(_) => tally.unknown(),
            }
        }
    }
    Ok(())
}

/// Local character at finite scale: decompose `n` into small pieces extending a
/// decomposition of `m`, take the `μ` support of `x`, and check that `x` does
/// not fork over the sub-amalgam of the supporting pieces of `m`.
pub fn check_local_character<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    bottom: &I::Model,
    m: &I::Model,
    n: &I::Model,
    x: &I::Element,
    exact: bool,
) -> Result<bool> {
    let small = |over: &I::Model, top: &I::Model| -> Result<Vec<I::Model>> {
        if over == top {
            return Ok(Vec::new());
        }
        let c = decompose_into_small(inst, notion, over, top, 1)?;
        piece_images(inst, &c)
    };
    let inner = small(bottom, m)?;
    let rest = crate::notion::decompose(notion, inst, bottom, m, n)?;
    let outer = small(bottom, &rest)?;
    let mut pieces = inner.clone();
    pieces.extend(outer);
    let cert = assemble_inside(inst, notion, bottom, &pieces, n)?;
    let w = mu_witness(inst, notion, &cert, x)?;
    let chosen: Vec<_> = w
        .subsequence
        .iter()
        .filter(|&&i| i < inner.len())
        .map(|&i| inner[i].clone())
        .collect();
    let local = assemble_inside(inst, notion, bottom, &chosen, m)?.total;
    let q = IndepQuery {
        a: vec![x.clone()],
        m: local,
        b: inst.generators(m),
        n: n.clone(),
    };
    Ok(nonforks(inst, notion, &q, exact)?.is_some())
}

/// Tameness: distinct 1-types over a submodel are already distinct over some
/// submodel of size at most `size(bottom) + k`.
pub fn check_tameness<I: GaloisTypes>(
    inst: &I,
    frames: &[(I::Model, I::Model)],
    k: usize,
    elements: usize,
) -> Result<PropertyReport> {
    if frames.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut tally = Tally::new("tameness");
    for (bottom, n) in frames {
        let subs = inst.substructures(n, bottom)?;
        let limit = inst.size(bottom) + k;
        let smalls: Vec<_> = subs
            .iter()
            .filter(|s| inst.size(s) <= limit)
            .cloned()
            .collect();
        let elems = inst.elements(n, elements);
        for m in &subs {
            let restr: Vec<_> = smalls.iter().filter(|s| inst.is_strong_sub(s, m)).collect();
            for (i, x) in elems.iter().enumerate() {
                for y in &elems[i + 1..] {
                    let ty = |e: &I::Element, base: &I::Model| GaloisType {
                        tuple: vec![e.clone()],
                        base: base.clone(),
                        ambient: n.clone(),
                    };
                    match inst.gtype_equal(&ty(x, m), &ty(y, m)) {
                        Ok(true) => continue,
                        Ok(false) => {}
                        Err(_) => {
                            tally.unknown();
                            continue;
                        }
                    }
                    let separated = restr
                        .iter()
                        .any(|s| matches!(inst.gtype_equal(&ty(x, s), &ty(y, s)), Ok(false)));
                    tally.record(
                        separated,
                        || json!({ "m": to_value(m), "pair": [to_value(x), to_value(y)] }),
                    );
                }
            }
        }
    }
    Ok(tally.finish())
}

/// Classes of the equivalence `gtype_equal` on the 1-types over `m` realized in `n`.
pub fn type_classes<I: GaloisTypes>(
    inst: &I,
    m: &I::Model,
    n: &I::Model,
    elements: usize,
) -> Result<Vec<Vec<I::Element>>> {
    let mut classes: Vec<Vec<I::Element>> = Vec::new();
    for x in inst.elements(n, elements) {
        let tx = GaloisType {
            tuple: vec![x.clone()],
            base: m.clone(),
            ambient: n.clone(),
        };
        let mut placed = false;
        for c in classes.iter_mut() {
            let tc = GaloisType {
                tuple: vec![c[0].clone()],
                base: m.clone(),
                ambient: n.clone(),
            };
            if inst.gtype_equal(&tc, &tx)? {
                c.push(x.clone());
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![x]);
        }
    }
    Ok(classes)
}
