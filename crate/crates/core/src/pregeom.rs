//! Closure operators, the pregeometry axioms, and the notion of amalgamation
//! read off independent bases.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catlab::{check_3monotonic, MonotoneConfig};
use crate::class::{apply, is_commutative_square, ClassInstance, Diagram, SpanOf};
use crate::error::{Error, Result};
use crate::notion::{check_structural_properties, verify_notion_axioms, Bounds, Notion};
use crate::report::{to_value, PropertyReport, Tally};
use crate::seqamal::{combinations, mu_witness, piece_images, Cert};

/// A class whose models carry a closure operator, with closed sets returned as submodels.
pub trait ClosureSystem: ClassInstance {
    /// `cl_m(a)` for `a` inside `m`.
    fn closure(&self, m: &Self::Model, a: &[Self::Element]) -> Result<Self::Model>;

    fn in_closure(&self, m: &Self::Model, a: &[Self::Element], x: &Self::Element) -> Result<bool> {
        Ok(self.contains(&self.closure(m, a)?, x))
    }

    /// No element lies in the closure of the others.
    fn is_independent(&self, m: &Self::Model, b: &[Self::Element]) -> Result<bool> {
        for i in 0..b.len() {
            let rest: Vec<_> = b
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x.clone())
                .collect();
            if self.in_closure(m, &rest, &b[i])? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Largest carrier a tabulated closure accepts.
pub const CARRIER_LIMIT: usize = 20;

/// A closure operator on a finite carrier, tabulated over all subsets.
#[derive(Debug, Clone)]
pub struct ClosureOperator<P> {
    carrier: Vec<P>,
    table: Vec<u32>,
}

impl<P: Clone + Ord> ClosureOperator<P> {
    /// Tabulate `close` on every subset of `carrier`.
    pub fn from_fn(
        carrier: Vec<P>,
        carrier_bound: usize,
        close: impl Fn(&[P]) -> Result<Vec<P>>,
    ) -> Result<Self> {
        if carrier.is_empty() {
            return Err(Error::EmptyCarrier);
        }
        let limit = carrier_bound.min(CARRIER_LIMIT);
        if carrier.len() > limit {
            return Err(Error::TooLarge {
                size: carrier.len() as u64,
                limit: limit as u64,
            });
        }
        let mut op = ClosureOperator {
            carrier,
            table: Vec::new(),
        };
        let table = (0..1u32 << op.carrier.len())
            .map(|mask| {
                let closed = close(&op.points(mask))?;
                op.mask_of(&closed)
                    .ok_or_else(|| Error::VerificationFailed("closure leaves the carrier".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        op.table = table;
        Ok(op)
    }

    /// The closure of `m` restricted to its own carrier.
    pub fn of_model<I>(
        inst: &I,
        m: &I::Model,
        carrier_bound: usize,
    ) -> Result<ClosureOperator<I::Element>>
    where
        I: ClosureSystem<Element = P>,
    {
        let carrier = inst.elements(m, carrier_bound + 1);
        ClosureOperator::from_fn(carrier.clone(), carrier_bound, |a| {
            let closed = inst.closure(m, a)?;
            Ok(carrier
                .iter()
                .filter(|x| inst.contains(&closed, x))
                .cloned()
                .collect())
        })
    }

    pub fn carrier(&self) -> &[P] {
        &self.carrier
    }

    pub fn close(&self, a: &[P]) -> Option<Vec<P>> {
        self.mask_of(a).map(|m| self.points(self.table[m as usize]))
    }

    fn mask_of(&self, a: &[P]) -> Option<u32> {
        a.iter().try_fold(0u32, |acc, x| {
            self.carrier
                .iter()
                .position(|c| c == x)
                .map(|i| acc | 1 << i)
        })
    }

    fn points(&self, mask: u32) -> Vec<P> {
        (0..self.carrier.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.carrier[i].clone())
            .collect()
    }
}

/// Extensive, idempotent, monotone and exchange, over every subset of the
/// carrier. Finite character is automatic on a finite carrier.
pub fn check_pregeometry_axioms<P: Clone + Ord + Serialize>(
    cl: &ClosureOperator<P>,
) -> PropertyReport {
    let n = cl.carrier.len();
    let t = &cl.table;
    let mut tally = Tally::new("pregeometry");
    let witness = |axiom: &str, a: u32, x: Option<usize>, y: Option<usize>| {
        json!({
            "axiom": axiom,
            "set": to_value(&cl.points(a)),
            "a": x.map(|i| to_value(&cl.carrier[i])),
            "b": y.map(|i| to_value(&cl.carrier[i])),
        })
    };
    for a in 0..1u32 << n {
        let ca = t[a as usize];
        tally.record(a & ca == a, || witness("extensive", a, None, None));
        tally.record(t[ca as usize] == ca, || {
            witness("idempotent", a, None, None)
        });
        for x in (0..n).filter(|i| a >> i & 1 == 0) {
            let cax = t[(a | 1 << x) as usize];
            tally.record(ca & cax == ca, || witness("monotone", a, Some(x), None));
            for y in (0..n).filter(|&j| cax >> j & 1 == 1 && ca >> j & 1 == 0) {
                let back = t[(a | 1 << y) as usize] >> x & 1 == 1;
                tally.record(back, || witness("exchange", a, Some(x), Some(y)));
            }
        }
    }
    tally
        .finish()
        .with_note("finite character holds trivially on a finite carrier")
}

/// Bases `b1, b2` with `b1 ∪ b2` independent and closures `a1`, `a2`, `a0 = cl(b1 ∩ b2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentWitness<M, E> {
    pub b1: Vec<E>,
    pub b2: Vec<E>,
    /// `(a1, a2, a0)`.
    pub closures: (M, M, M),
}

pub type WitnessOf<I> =
    IndependentWitness<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

impl<M: Clone + Eq, E: Clone + Ord> IndependentWitness<M, E> {
    /// Re-check every claim inside `n`; `full` additionally demands `cl(b1 ∪ b2) = n`.
    pub fn validate<I>(&self, inst: &I, n: &M, full: bool) -> Result<bool>
    where
        I: ClosureSystem<Model = M, Element = E>,
    {
        let s1: BTreeSet<&E> = self.b1.iter().collect();
        let meet: Vec<E> = self.b2.iter().filter(|x| s1.contains(x)).cloned().collect();
        let mut union = self.b1.clone();
        union.extend(self.b2.iter().filter(|x| !s1.contains(x)).cloned());
        let (a1, a2, a0) = &self.closures;
        Ok(inst.is_independent(n, &union)?
            && inst.closure(n, &self.b1)? == *a1
            && inst.closure(n, &self.b2)? == *a2
            && inst.closure(n, &meet)? == *a0
            && (!full || inst.closure(n, &union)? == *n))
    }
}

/// Add elements of `pool` to `start` whenever they leave the current closure.
fn extend_basis<I: ClosureSystem>(
    inst: &I,
    n: &I::Model,
    start: &[I::Element],
    pool: &[I::Element],
) -> Result<Vec<I::Element>> {
    let mut b = start.to_vec();
    for x in pool {
        if !inst.in_closure(n, &b, x)? {
            b.push(x.clone());
        }
    }
    Ok(b)
}

/// How the derived predicate looks for witness bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSearch {
    /// Extend one basis of the base greedily on each side. Exact for matroids.
    #[default]
    Greedy,
    /// Try every basis triple drawn from carriers of at most this many elements.
    Exhaustive(usize),
}

/// The notion whose amalgams are the diagrams with an independent witness.
/// Constructions are delegated to `native` and then re-checked.
#[derive(Debug, Clone, Copy, Default)]
pub struct DerivedNotion<N> {
    pub native: N,
    pub search: WitnessSearch,
}

impl<N> DerivedNotion<N> {
    pub fn new(native: N) -> Self {
        DerivedNotion {
            native,
            search: WitnessSearch::Greedy,
        }
    }

    pub fn exhaustive(native: N, carrier_bound: usize) -> Self {
        DerivedNotion {
            native,
            search: WitnessSearch::Exhaustive(carrier_bound),
        }
    }

    /// Images `(g1[m0], g1[m1], g2[m2])` as generator lists in `d.n`.
    fn images<I: ClassInstance>(inst: &I, d: &Diagram<I>) -> [Vec<I::Element>; 3] {
        let on = |e: &crate::class::Emb<I>, m: &I::Model| {
            inst.generators(m)
                .iter()
                .map(|x| apply(inst, e, x))
                .collect()
        };
        [
            on(&d.g1, &d.span.m0),
            on(&d.g1, &d.span.m1),
            on(&d.g2, &d.span.m2),
        ]
    }

    /// The witness for `d`, if one exists.
    pub fn witness<I: ClosureSystem>(
        &self,
        inst: &I,
        d: &Diagram<I>,
    ) -> Result<Option<WitnessOf<I>>> {
        if !is_commutative_square(inst, d) {
            return Ok(None);
        }
        let [g0, g1, g2] = Self::images(inst, d);
        let n = &d.n;
        let closures = (
            inst.closure(n, &g1)?,
            inst.closure(n, &g2)?,
            inst.closure(n, &g0)?,
        );
        match self.search {
            WitnessSearch::Greedy => {
                let b0 = extend_basis(inst, n, &[], &g0)?;
                let w = IndependentWitness {
                    b1: extend_basis(inst, n, &b0, &g1)?,
                    b2: extend_basis(inst, n, &b0, &g2)?,
                    closures,
                };
                Ok(w.validate(inst, n, true)?.then_some(w))
            }
            WitnessSearch::Exhaustive(bound) => exhaustive_witness(inst, n, closures, bound),
        }
    }
}

/// Independent subsets of `pool` of size `k` whose union with `start` closes to `target`.
fn bases_over<I: ClosureSystem>(
    inst: &I,
    n: &I::Model,
    start: &[I::Element],
    pool: &[I::Element],
    k: usize,
    target: &I::Model,
) -> Result<Vec<Vec<I::Element>>> {
    let mut out = Vec::new();
    for idx in combinations(pool.len(), k) {
        let mut b = start.to_vec();
        b.extend(idx.iter().map(|&i| pool[i].clone()));
        if inst.is_independent(n, &b)? && inst.closure(n, &b)? == *target {
            out.push(b);
        }
    }
    Ok(out)
}

fn exhaustive_witness<I: ClosureSystem>(
    inst: &I,
    n: &I::Model,
    (a1, a2, a0): (I::Model, I::Model, I::Model),
    bound: usize,
) -> Result<Option<WitnessOf<I>>> {
    let carrier = |m: &I::Model| -> Result<Vec<I::Element>> {
        let e = inst.elements(m, bound + 1);
        if e.len() > bound {
            return Err(Error::TooLarge {
                size: e.len() as u64,
                limit: bound as u64,
            });
        }
        Ok(e)
    };
    let (e0, e1, e2) = (carrier(&a0)?, carrier(&a1)?, carrier(&a2)?);
    let rank = |m: &I::Model| inst.size(m);
    let outside = |e: &[I::Element], m: &I::Model| {
        e.iter()
            .filter(|x| !inst.contains(m, x))
            .cloned()
            .collect::<Vec<_>>()
    };
    let (r0, r1, r2) = (rank(&a0), rank(&a1), rank(&a2));
    if r0 > r1.min(r2) {
        return Ok(None);
    }
    for b0 in bases_over(inst, n, &[], &e0, r0, &a0)? {
        for b1 in bases_over(inst, n, &b0, &outside(&e1, &a0), r1 - r0, &a1)? {
            for b2 in bases_over(inst, n, &b0, &outside(&e2, &a0), r2 - r0, &a2)? {
                let w = IndependentWitness {
                    b1: b1.clone(),
                    b2,
                    closures: (a1.clone(), a2.clone(), a0.clone()),
                };
                if w.validate(inst, n, true)? {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

impl<I: ClosureSystem, N: Notion<I>> Notion<I> for DerivedNotion<N> {
    fn name(&self) -> String {
        format!("derived({})", self.native.name())
    }

    fn is_amalgam(&self, inst: &I, d: &Diagram<I>) -> bool {
        matches!(self.witness(inst, d), Ok(Some(_)))
    }

    fn construct(&self, inst: &I, s: &SpanOf<I>) -> Result<Diagram<I>> {
        let d = self.native.construct(inst, s)?;
        match self.witness(inst, &d)? {
            Some(_) => Ok(d),
            None => Err(Error::NoBasisFound(format!("{:?}", d.n))),
        }
    }

    /// The closure of the union of the two sides.
    fn inclusion_candidate(
        &self,
        inst: &I,
        _m0: &I::Model,
        m1: &I::Model,
        m2: &I::Model,
        n: &I::Model,
    ) -> Option<I::Model> {
        let mut gens = inst.generators(m1);
        gens.extend(inst.generators(m2));
        inst.closure(n, &gens).ok()
    }

    fn decompose(&self, inst: &I, m0: &I::Model, m1: &I::Model, n: &I::Model) -> Result<I::Model> {
        self.native.decompose(inst, m0, m1, n)
    }
}

/// The least index set `s` with `a` in the closure of the base and the pieces in `s`.
pub fn closure_support<I: ClosureSystem>(
    inst: &I,
    cert: &Cert<I>,
    a: &I::Element,
) -> Result<Vec<usize>> {
    if !inst.contains(&cert.total, a) {
        return Err(Error::ElementOutsideTotal);
    }
    let images = piece_images(inst, cert)?;
    let base = inst.generators(&cert.resolution[0]);
    for size in 0..=cert.len() {
        for s in combinations(cert.len(), size) {
            let mut gens = base.clone();
            gens.extend(s.iter().flat_map(|&i| inst.generators(&images[i])));
            if inst.in_closure(&cert.total, &gens, a)? {
                return Ok(s);
            }
        }
    }
    Err(Error::VerificationFailed(
        "total is not the closure of its pieces".into(),
    ))
}

/// Inputs for [`verify_derived_properties`].
#[derive(Debug, Clone)]
pub struct DerivedPool<I: ClassInstance> {
    pub spans: Vec<SpanOf<I>>,
    pub monotone: Vec<MonotoneConfig<I::Model>>,
    pub certs: Vec<Cert<I>>,
    /// Elements per certificate total checked for `μ`.
    pub elements: usize,
}

/// Axioms, structural properties and 3-monotonicity of the derived notion, and
/// a finite `μ` witness equal to the closure support for every sampled element.
pub fn verify_derived_properties<I: ClosureSystem, N: Notion<I>>(
    inst: &I,
    derived: &DerivedNotion<N>,
    pool: &DerivedPool<I>,
    bounds: Bounds,
) -> Result<Vec<PropertyReport>> {
    if pool.spans.is_empty() || pool.certs.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut out = verify_notion_axioms(inst, derived, &pool.spans, bounds)?;
    out.extend(check_structural_properties(
        inst,
        derived,
        &pool.spans,
        bounds,
    )?);
    out.push(check_3monotonic(inst, derived, &pool.monotone)?);
    let mut mu = Tally::new("mu-finite-support");
    for cert in &pool.certs {
        for a in inst.elements(&cert.total, pool.elements) {
            let w = mu_witness(inst, derived, cert, &a);
            let support = closure_support(inst, cert, &a);
            let ok = matches!((&w, &support), (Ok(w), Ok(s)) if &w.subsequence == s);
            mu.record(ok, || {
                json!({
                    "total": to_value(&cert.total),
                    "element": to_value(&a),
                    "mu": w.as_ref().map(|w| to_value(&w.subsequence)).map_err(|e| e.to_string()),
                    "support": support.as_ref().map(to_value).map_err(|e| e.to_string()),
                })
            });
        }
    }
    out.push(mu.finish());
    Ok(out)
}
