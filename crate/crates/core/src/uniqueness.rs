//! Non-uniqueness triples, weak 3-existence, and families of pairwise
//! non-embeddable extensions.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::class::{
    apply, compose, inclusion, restrict, span_by_inclusion, AmalgamDiagram, ClassInstance, Diagram,
    IsoVerdict, KEmbedding, Span, SpanOf,
};
use crate::error::{Error, Result};
use crate::notion::{oplus, uniqueness_iso, Notion};
use crate::report::{to_value, PropertyReport, Tally};

/// Two amalgams of one span that are not isomorphic over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct NonUniquenessWitness<M, E> {
    pub first: AmalgamDiagram<M, E>,
    pub second: AmalgamDiagram<M, E>,
    /// Certified reason no isomorphism over the span exists.
    pub distinguisher: String,
}

pub type Witness<I> =
    NonUniquenessWitness<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

impl<M, E> NonUniquenessWitness<M, E> {
    pub fn span(&self) -> &Span<M, E> {
        &self.first.span
    }
}

/// Instance-specific invariants that separate amalgams when iso search cannot.
pub trait Separation: ClassInstance + Sized {
    /// A certified reason `d1` and `d2` are not isomorphic over their span.
    fn separate(&self, _d1: &Diagram<Self>, _d2: &Diagram<Self>) -> Option<String> {
        None
    }

    /// Copy `index` of the witness with fresh elements outside the base.
    fn disjoint_copy(&self, _w: &Witness<Self>, _index: usize) -> Result<Witness<Self>> {
        Err(Error::DistinguisherUnavailable)
    }

    /// Whether the invariant that holds in `w.second` but not in `w.first`
    /// holds in `m`. It must transfer along embeddings fixing the witness's sides.
    fn invariant(&self, _w: &Witness<Self>, _m: &Self::Model) -> Result<bool> {
        Err(Error::DistinguisherUnavailable)
    }
}

/// The first pair of enumerated amalgams of `s` with a certified separation.
pub fn find_nonuniqueness_witness<I: Separation, N: Notion<I>>(
    inst: &I,
    notion: &N,
    s: &SpanOf<I>,
    bound: usize,
) -> Result<Option<Witness<I>>> {
    let amalgams: Vec<Diagram<I>> = notion
        .enumerate_amalgams(inst, s, bound)?
        .into_iter()
        .filter(|d| notion.is_amalgam(inst, d))
        .collect();
    for (i, d1) in amalgams.iter().enumerate() {
        for d2 in &amalgams[i + 1..] {
            match uniqueness_iso(inst, d1, d2)? {
                IsoVerdict::Found(_) => {}
                IsoVerdict::Absent { reason } => {
                    return Ok(Some(NonUniquenessWitness {
                        first: d1.clone(),
                        second: d2.clone(),
                        distinguisher: reason,
                    }));
                }
                IsoVerdict::Unknown { .. } => match inst.separate(d1, d2) {
                    Some(reason) => {
                        return Ok(Some(NonUniquenessWitness {
                            first: d1.clone(),
                            second: d2.clone(),
                            distinguisher: reason,
                        }))
                    }
                    None => return Err(Error::InconclusivePair),
                },
            }
        }
    }
    Ok(None)
}

/// Outcome of a weak 3-existence check: the apex and the two cube maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct Cube<M, E> {
    pub apex: M,
    pub f1: Option<KEmbedding<M, E>>,
    pub f2: Option<KEmbedding<M, E>>,
}

impl<M, E> Cube<M, E> {
    pub fn closes(&self) -> bool {
        self.f1.is_some() && self.f2.is_some()
    }
}

fn stage<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    s: &SpanOf<I>,
    index: usize,
) -> Result<Diagram<I>> {
    notion
        .construct(inst, s)
        .map_err(|e| Error::AmalgamConstructionFailed {
            index,
            reason: e.to_string(),
        })
}

/// An embedding of `dom` into `cod` sending each listed generator image to its target.
fn pinned_embedding<I: ClassInstance>(
    inst: &I,
    dom: &I::Model,
    cod: &I::Model,
    pinned: Vec<(I::Element, I::Element)>,
    bound: usize,
) -> Option<KEmbedding<I::Model, I::Element>> {
    inst.embeddings(dom, cod, &pinned, bound)
        .into_iter()
        .next()
        .map(|images| KEmbedding {
            dom: dom.clone(),
            cod: cod.clone(),
            images,
        })
}

/// With `m0` a strong substructure of `m1, m2, m3`: amalgamate the three
/// pairs, then `m3` with `m1 ⊕ m2`, and look for maps from `m1 ⊕ m3` and
/// `m2 ⊕ m3` into that apex closing the cube.
pub fn weak_3existence_cube<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    m0: &I::Model,
    m1: &I::Model,
    m2: &I::Model,
    m3: &I::Model,
    bound: usize,
) -> Result<Cube<I::Model, I::Element>> {
    let d12 = stage(inst, notion, &span_by_inclusion(inst, m0, m1, m2), 0)?;
    let d13 = stage(inst, notion, &span_by_inclusion(inst, m0, m1, m3), 1)?;
    let d23 = stage(inst, notion, &span_by_inclusion(inst, m0, m2, m3), 2)?;
    let base_in_12 = restrict(inst, &d12.g1, m0);
    let top = stage(
        inst,
        notion,
        &Span {
            m0: m0.clone(),
            m1: m3.clone(),
            m2: d12.n.clone(),
            f: base_in_12,
        },
        3,
    )?;
    // top.g1: m3 -> N, top.g2: m12 -> N
    let via12 = |leg: &KEmbedding<I::Model, I::Element>, x: &I::Element| {
        apply(inst, &top.g2, &apply(inst, leg, x))
    };
    let mut pins1: Vec<(I::Element, I::Element)> = inst
        .generators(m1)
        .iter()
        .map(|x| (apply(inst, &d13.g1, x), via12(&d12.g1, x)))
        .collect();
    pins1.extend(
        inst.generators(m3)
            .iter()
            .map(|y| (apply(inst, &d13.g2, y), apply(inst, &top.g1, y))),
    );
    let mut pins2: Vec<(I::Element, I::Element)> = inst
        .generators(m2)
        .iter()
        .map(|x| (apply(inst, &d23.g1, x), via12(&d12.g2, x)))
        .collect();
    pins2.extend(
        inst.generators(m3)
            .iter()
            .map(|y| (apply(inst, &d23.g2, y), apply(inst, &top.g1, y))),
    );
    Ok(Cube {
        f1: pinned_embedding(inst, &d13.n, &top.n, pins1, bound),
        f2: pinned_embedding(inst, &d23.n, &top.n, pins2, bound),
        apex: top.n,
    })
}

pub fn check_weak_3existence<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    m0: &I::Model,
    m1: &I::Model,
    m2: &I::Model,
    m3: &I::Model,
    bound: usize,
) -> Result<bool> {
    Ok(weak_3existence_cube(inst, notion, m0, m1, m2, m3, bound)?.closes())
}

/// One extension `M_η` and the invariant pattern read off it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "M: Serialize", deserialize = "M: DeserializeOwned"))]
pub struct ExtensionMember<M> {
    pub eta: Vec<bool>,
    pub model: M,
    pub pattern: Vec<bool>,
}

/// `2^k` extensions of the base, one per bit-vector.
///
/// `separation[a][b]` is a coordinate whose invariant holds in member `a` but
/// not in member `b`, which rules out an embedding of `a` into any extension
/// of `b` over the copies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "M: Serialize", deserialize = "M: DeserializeOwned"))]
pub struct ExtensionFamily<M> {
    pub k: usize,
    pub base: M,
    pub members: Vec<ExtensionMember<M>>,
    pub separation: Vec<Vec<Option<usize>>>,
}

impl<M> ExtensionFamily<M> {
    /// Every ordered pair `a != b` with `η_a ≰ η_b` is separated, and every
    /// unordered pair is separated in at least one direction.
    pub fn is_complete(&self) -> bool {
        let patterns: std::collections::BTreeSet<&Vec<bool>> =
            self.members.iter().map(|m| &m.pattern).collect();
        patterns.len() == 1 << self.k
            && self.members.iter().enumerate().all(|(a, ma)| {
                self.members.iter().enumerate().all(|(b, mb)| {
                    let below = ma.pattern.iter().zip(&mb.pattern).all(|(x, y)| !x || *y);
                    self.separation[a][b].is_some() == !below
                })
            })
    }
}

/// Assemble `k` disjoint copies of the witness over its base, choosing the
/// second amalgam at the coordinates where `η` is set.
pub fn many_extensions<I: Separation, N: Notion<I>>(
    inst: &I,
    notion: &N,
    w: &Witness<I>,
    k: usize,
) -> Result<ExtensionFamily<I::Model>> {
    if k == 0 || k > 3 {
        return Err(Error::PreconditionViolated(format!(
            "copy count {k} outside 1..=3"
        )));
    }
    let copies: Vec<Witness<I>> = (0..k)
        .map(|i| inst.disjoint_copy(w, i))
        .collect::<Result<_>>()?;
    let base = w.span().m0.clone();
    if copies.iter().any(|c| c.span().m0 != base) {
        return Err(Error::PreconditionViolated(
            "copies must share the base".into(),
        ));
    }
    let mut members = Vec::new();
    for bits in 0u32..1 << k {
        let eta: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
        let mut cur = base.clone();
        for (i, c) in copies.iter().enumerate() {
            let piece = if eta[i] { &c.second } else { &c.first };
            if !inst.is_strong_sub(&base, &cur) {
                return Err(Error::PreconditionViolated(
                    "base left the assembled model".into(),
                ));
            }
            let f = restrict(inst, &piece.g1, &base);
            let d = stage(
                inst,
                notion,
                &Span {
                    m0: base.clone(),
                    m1: cur.clone(),
                    m2: piece.n.clone(),
                    f,
                },
                i,
            )?;
            cur = d.n;
        }
        let pattern = copies
            .iter()
            .map(|c| inst.invariant(c, &cur))
            .collect::<Result<Vec<bool>>>()?;
        if pattern != eta {
            return Err(Error::VerificationFailed(format!(
                "pattern {pattern:?} differs from {eta:?}"
            )));
        }
        members.push(ExtensionMember {
            eta,
            model: cur,
            pattern,
        });
    }
    let separation = members
        .iter()
        .map(|a| {
            members
                .iter()
                .map(|b| (0..k).find(|&i| a.pattern[i] && !b.pattern[i]))
                .collect()
        })
        .collect();
    Ok(ExtensionFamily {
        k,
        base,
        members,
        separation,
    })
}

/// Extend the witness span along `m2 <= n_ext` and check the two extended
/// amalgams are still separated.
pub fn check_nonuniqueness_monotone<I: Separation, N: Notion<I>>(
    inst: &I,
    notion: &N,
    w: &Witness<I>,
    n_ext: &I::Model,
) -> Result<bool> {
    let s = w.span();
    if !inst.is_strong_sub(&s.m2, n_ext) {
        return Err(Error::PreconditionViolated(
            "extension must contain the second side".into(),
        ));
    }
    let wider = Span {
        m0: s.m0.clone(),
        m1: s.m1.clone(),
        m2: n_ext.clone(),
        f: compose(inst, &inclusion(inst, &s.m2, n_ext), &s.f),
    };
    let extend = |d: &Diagram<I>, index: usize| -> Result<Diagram<I>> {
        let e = stage(
            inst,
            notion,
            &Span {
                m0: s.m2.clone(),
                m1: n_ext.clone(),
                m2: d.n.clone(),
                f: d.g2.clone(),
            },
            index,
        )?;
        Ok(AmalgamDiagram {
            span: wider.clone(),
            n: e.n.clone(),
            g1: compose(inst, &e.g2, &d.g1),
            g2: e.g1,
        })
    };
    let e1 = extend(&w.first, 0)?;
    let e2 = extend(&w.second, 1)?;
    if !notion.is_amalgam(inst, &e1) || !notion.is_amalgam(inst, &e2) {
        return Err(Error::VerificationFailed(
            "extended diagrams are not amalgams".into(),
        ));
    }
    match uniqueness_iso(inst, &e1, &e2)? {
        IsoVerdict::Found(_) => Ok(false),
        IsoVerdict::Absent { .. } => Ok(true),
        IsoVerdict::Unknown { .. } => inst
            .separate(&e1, &e2)
            .map(|_| true)
            .ok_or(Error::InconclusivePair),
    }
}

/// Whether every pair of enumerated amalgams of `s` is isomorphic over it.
pub fn is_uniqueness_triple<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    s: &SpanOf<I>,
    bound: usize,
) -> Result<bool> {
    let amalgams: Vec<Diagram<I>> = notion
        .enumerate_amalgams(inst, s, bound)?
        .into_iter()
        .filter(|d| notion.is_amalgam(inst, d))
        .collect();
    for (i, d1) in amalgams.iter().enumerate() {
        for d2 in &amalgams[i + 1..] {
            match uniqueness_iso(inst, d1, d2)? {
                IsoVerdict::Found(_) => {}
                IsoVerdict::Absent { .. } => return Ok(false),
                IsoVerdict::Unknown { bound } => return Err(Error::SearchBoundExceeded(bound)),
            }
        }
    }
    Ok(true)
}

/// Finite chains `m_0 <= ... <= m_δ` with `n_0 >= m_0`, all inside an ambient
/// model: when each successor triple `(m_i, n_i, m_{i+1})` is a uniqueness
/// triple, so is `(m_0, n_0, m_δ)`. Here `n_{i+1} = n_i ⊕ m_{i+1}` over `m_i`.
pub fn check_uniqueness_chains<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    chains: &[(I::Model, I::Model, Vec<I::Model>)],
    bound: usize,
) -> Result<PropertyReport> {
    let mut t = Tally::new("uniqueness-chain");
    for (ambient, n0, chain) in chains {
        if chain.len() < 2 {
            continue;
        }
        let mut n = n0.clone();
        let mut all_unique = true;
        for pair in chain.windows(2) {
            all_unique &= is_uniqueness_triple(
                inst,
                notion,
                &span_by_inclusion(inst, &pair[0], &n, &pair[1]),
                bound,
            )?;
            n = oplus(inst, notion, &n, &pair[1], &pair[0], ambient)?.ok_or_else(|| {
                Error::VerificationFailed("chain stage has no amalgam inside the ambient".into())
            })?;
        }
        let end = span_by_inclusion(inst, &chain[0], n0, chain.last().expect("nonempty"));
        let end_unique = is_uniqueness_triple(inst, notion, &end, bound)?;
        t.record(!all_unique || end_unique, || to_value(&(n0, chain)));
    }
    Ok(t.finish())
}

/// Every cube over pool models sharing the base closes.
pub fn check_weak_3existence_pool<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cubes: &[(I::Model, I::Model, I::Model, I::Model)],
    bound: usize,
) -> Result<PropertyReport> {
    let mut t = Tally::new("weak-3-existence");
    for (m0, m1, m2, m3) in cubes {
        let ok = check_weak_3existence(inst, notion, m0, m1, m2, m3, bound)?;
        t.record(ok, || to_value(&(m0, m1, m2, m3)));
    }
    Ok(t.finish())
}
