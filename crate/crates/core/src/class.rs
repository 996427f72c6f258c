//! Abstract classes, strong embeddings, spans and amalgam diagrams.
//!
//! Models are canonical value objects supplied by a [`ClassInstance`]. Embeddings
//! are stored on the canonical generators of their domain only; extension to the
//! whole carrier is recomputed by the instance.

use std::fmt::Debug;
use std::hash::Hash;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a bounded isomorphism search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsoVerdict<E> {
    /// Images of the domain generators under an isomorphism.
    Found(Vec<E>),
    /// No isomorphism exists; `reason` names the certificate.
    Absent { reason: String },
    /// Search gave up at `bound`.
    Unknown { bound: usize },
}

impl<E> IsoVerdict<E> {
    pub fn found(self) -> Option<Vec<E>> {
        match self {
            IsoVerdict::Found(v) => Some(v),
            _ => None,
        }
    }
}

/// The contract every concrete class must satisfy.
///
/// All enumerations are deterministic and bounded.
pub trait ClassInstance: Sync {
    type Model: Clone + Eq + Ord + Hash + Debug + Serialize + DeserializeOwned + Send + Sync;
    type Element: Clone + Eq + Ord + Hash + Debug + Serialize + DeserializeOwned + Send + Sync;

    fn tag(&self) -> String;

    /// Carrier cardinality, dimension or rank, depending on the instance.
    fn size(&self, m: &Self::Model) -> usize;

    /// Canonical generators; embeddings list one image per generator.
    fn generators(&self, m: &Self::Model) -> Vec<Self::Element>;

    fn contains(&self, m: &Self::Model, x: &Self::Element) -> bool;

    /// Up to `bound` elements of the carrier, deterministically ordered.
    fn elements(&self, m: &Self::Model, bound: usize) -> Vec<Self::Element> {
        self.generators(m).into_iter().take(bound).collect()
    }

    /// Carrier inclusion.
    fn is_subset(&self, m: &Self::Model, n: &Self::Model) -> bool {
        self.generators(m).iter().all(|x| self.contains(n, x))
    }

    fn is_strong_sub(&self, m: &Self::Model, n: &Self::Model) -> bool;

    /// The substructure of `n` generated by `a`, strong or not.
    fn span_in(&self, n: &Self::Model, a: &[Self::Element]) -> Result<Self::Model>;

    /// The least strong substructure of `n` containing `a`.
    fn generated_sub(&self, n: &Self::Model, a: &[Self::Element]) -> Result<Self::Model> {
        let m = self.span_in(n, a)?;
        if self.is_strong_sub(&m, n) {
            Ok(m)
        } else {
            Err(Error::NoFiniteWitness)
        }
    }

    /// Strong substructures `m` with `containing <= m <= n`, deterministically ordered.
    fn substructures(&self, n: &Self::Model, containing: &Self::Model) -> Result<Vec<Self::Model>>;

    /// The intersection when it is a model of the class.
    fn intersect(&self, a: &Self::Model, b: &Self::Model) -> Option<Self::Model>;

    /// Evaluate `e` at an element of its domain.
    fn apply(&self, e: &KEmbedding<Self::Model, Self::Element>, x: &Self::Element)
        -> Self::Element;

    /// Injective, structure preserving, with strong image.
    fn is_valid_map(&self, dom: &Self::Model, cod: &Self::Model, images: &[Self::Element]) -> bool;

    /// Embeddings `m -> n` honouring `pinned` (pairs `(x, image of x)`), at most `bound` of them.
    fn embeddings(
        &self,
        m: &Self::Model,
        n: &Self::Model,
        pinned: &[(Self::Element, Self::Element)],
        bound: usize,
    ) -> Vec<Vec<Self::Element>>;

    /// An isomorphism `m -> n` honouring `pinned`.
    fn iso_search(
        &self,
        m: &Self::Model,
        n: &Self::Model,
        pinned: &[(Self::Element, Self::Element)],
    ) -> IsoVerdict<Self::Element>;

    /// A pool of isomorphisms out of `m` onto assorted models, for invariance checks.
    fn isomorphisms_from(
        &self,
        m: &Self::Model,
        bound: usize,
        seed: u64,
    ) -> Vec<KEmbedding<Self::Model, Self::Element>>;

    /// Models `n* >= n` used to probe absolute minimality.
    fn superstructures(&self, n: &Self::Model) -> Vec<Self::Model> {
        vec![n.clone()]
    }

    /// The prime and minimal model sitting inside `ambient`, when the class has one.
    fn prime_minimal(&self, _ambient: &Self::Model) -> Option<Self::Model> {
        None
    }

    /// Short human label used in obstruction reports.
    fn describe(&self, m: &Self::Model) -> String {
        format!("size={}", self.size(m))
    }
}

/// A map given by images of the domain's canonical generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct KEmbedding<M, E> {
    pub dom: M,
    pub cod: M,
    pub images: Vec<E>,
}

/// `(M0 <= M1, f: M0 -> M2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct Span<M, E> {
    pub m0: M,
    pub m1: M,
    pub m2: M,
    pub f: KEmbedding<M, E>,
}

/// A span completed by a cocone `(n, g1, g2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct AmalgamDiagram<M, E> {
    pub span: Span<M, E>,
    pub n: M,
    pub g1: KEmbedding<M, E>,
    pub g2: KEmbedding<M, E>,
}

pub type Emb<I> = KEmbedding<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;
pub type SpanOf<I> = Span<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;
pub type Diagram<I> = AmalgamDiagram<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

/// Identity map on `m`.
pub fn identity<I: ClassInstance>(inst: &I, m: &I::Model) -> Emb<I> {
    KEmbedding {
        dom: m.clone(),
        cod: m.clone(),
        images: inst.generators(m),
    }
}

/// Inclusion `m -> n`; the caller guarantees `m` is a substructure of `n`.
pub fn inclusion<I: ClassInstance>(inst: &I, m: &I::Model, n: &I::Model) -> Emb<I> {
    KEmbedding {
        dom: m.clone(),
        cod: n.clone(),
        images: inst.generators(m),
    }
}

pub fn apply<I: ClassInstance>(inst: &I, e: &Emb<I>, x: &I::Element) -> I::Element {
    inst.apply(e, x)
}

/// `g . f`.
pub fn compose<I: ClassInstance>(inst: &I, g: &Emb<I>, f: &Emb<I>) -> Emb<I> {
    let images = f.images.iter().map(|y| apply(inst, g, y)).collect();
    KEmbedding {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        images,
    }
}

/// Restriction of `e` to a substructure `sub` of its domain.
pub fn restrict<I: ClassInstance>(inst: &I, e: &Emb<I>, sub: &I::Model) -> Emb<I> {
    let images = inst
        .generators(sub)
        .iter()
        .map(|x| apply(inst, e, x))
        .collect();
    KEmbedding {
        dom: sub.clone(),
        cod: e.cod.clone(),
        images,
    }
}

/// Same map with a different codomain (image must lie in `cod`).
pub fn with_cod<M: Clone, E: Clone>(e: &KEmbedding<M, E>, cod: &M) -> KEmbedding<M, E> {
    KEmbedding {
        dom: e.dom.clone(),
        cod: cod.clone(),
        images: e.images.clone(),
    }
}

/// The substructure `e[dom]` of the codomain.
pub fn image<I: ClassInstance>(inst: &I, e: &Emb<I>) -> Result<I::Model> {
    inst.span_in(&e.cod, &e.images)
}

/// Inverse of an isomorphism `e: dom -> image`.
pub fn invert<I: ClassInstance>(inst: &I, e: &Emb<I>) -> Result<Emb<I>> {
    let img = image(inst, e)?;
    let gens = inst.generators(&e.dom);
    let pinned: Vec<_> = e.images.iter().cloned().zip(gens).collect();
    match inst.iso_search(&img, &e.dom, &pinned) {
        IsoVerdict::Found(images) => Ok(KEmbedding {
            dom: img,
            cod: e.dom.clone(),
            images,
        }),
        IsoVerdict::Absent { reason } => Err(Error::VerificationFailed(format!(
            "map is not invertible: {reason}"
        ))),
        IsoVerdict::Unknown { bound } => Err(Error::SearchBoundExceeded(bound)),
    }
}

/// Two maps with the same domain agree on every generator.
pub fn same_map<I: ClassInstance>(a: &Emb<I>, b: &Emb<I>) -> bool {
    a.dom == b.dom && a.images == b.images
}

/// Validity of an embedding: matching generator count, injective, structure
/// preserving and with strong image.
pub fn check_embedding<I: ClassInstance>(inst: &I, e: &Emb<I>) -> Result<bool> {
    let expected = inst.generators(&e.dom).len();
    if e.images.len() != expected {
        return Err(Error::MalformedMap {
            expected,
            got: e.images.len(),
        });
    }
    Ok(inst.is_valid_map(&e.dom, &e.cod, &e.images))
}

/// `g1 . iota = g2 . f` on every generator of `m0`.
pub fn commutes<I: ClassInstance>(inst: &I, d: &Diagram<I>) -> bool {
    inst.generators(&d.span.m0)
        .iter()
        .all(|x| apply(inst, &d.g1, x) == apply(inst, &d.g2, &apply(inst, &d.span.f, x)))
}

/// All four embeddings valid, `m0` a strong substructure of `m1`, and the square commutes.
pub fn is_commutative_square<I: ClassInstance>(inst: &I, d: &Diagram<I>) -> bool {
    let s = &d.span;
    inst.is_strong_sub(&s.m0, &s.m1)
        && d.g1.dom == s.m1
        && d.g2.dom == s.m2
        && d.g1.cod == d.n
        && d.g2.cod == d.n
        && s.f.dom == s.m0
        && s.f.cod == s.m2
        && check_embedding(inst, &s.f).unwrap_or(false)
        && check_embedding(inst, &d.g1).unwrap_or(false)
        && check_embedding(inst, &d.g2).unwrap_or(false)
        && commutes(inst, d)
}

pub fn span_by_inclusion<I: ClassInstance>(
    inst: &I,
    m0: &I::Model,
    m1: &I::Model,
    m2: &I::Model,
) -> SpanOf<I> {
    Span {
        m0: m0.clone(),
        m1: m1.clone(),
        m2: m2.clone(),
        f: inclusion(inst, m0, m2),
    }
}

/// The square with every arrow an inclusion.
pub fn by_inclusion<I: ClassInstance>(
    inst: &I,
    m0: &I::Model,
    m1: &I::Model,
    m2: &I::Model,
    n: &I::Model,
) -> Diagram<I> {
    AmalgamDiagram {
        span: span_by_inclusion(inst, m0, m1, m2),
        n: n.clone(),
        g1: inclusion(inst, m1, n),
        g2: inclusion(inst, m2, n),
    }
}

/// Partial-order and coherence laws of `is_strong_sub` over a pool of models.
/// Returns the first violating tuple rendered for a report.
pub fn check_order_laws<I: ClassInstance>(
    inst: &I,
    pool: &[I::Model],
) -> std::result::Result<usize, String> {
    let mut cases = 0;
    for a in pool {
        cases += 1;
        if !inst.is_strong_sub(a, a) {
            return Err(format!("not reflexive at {a:?}"));
        }
        for b in pool {
            let ab = inst.is_strong_sub(a, b);
            let ba = inst.is_strong_sub(b, a);
            if ab && ba && a != b {
                return Err(format!("not antisymmetric: {a:?} {b:?}"));
            }
            for c in pool {
                cases += 1;
                let bc = inst.is_strong_sub(b, c);
                if ab && bc && !inst.is_strong_sub(a, c) {
                    return Err(format!("not transitive: {a:?} {b:?} {c:?}"));
                }
                // coherence: a, b <= c and a inside b
                if inst.is_strong_sub(a, c) && bc && inst.is_subset(a, b) && !ab {
                    return Err(format!("coherence fails: {a:?} {b:?} {c:?}"));
                }
            }
        }
    }
    Ok(cases)
}
