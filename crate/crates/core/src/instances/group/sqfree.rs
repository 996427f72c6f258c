//! Direct sums `⊕_{p ∈ S} Z/p` over finite sets of primes.
//!
//! Every embedding preserves each prime component and acts on it by a unit,
//! so a model is determined by its prime set and strong substructure is
//! subset.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::class::{
    is_commutative_square, AmalgamDiagram, ClassInstance, Diagram, IsoVerdict, KEmbedding, SpanOf,
};
use crate::error::{Error, Result};
use crate::notion::Notion;
use crate::uniqueness::Separation;

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimeSet {
    pub primes: BTreeSet<u32>,
}

impl PrimeSet {
    pub fn of(primes: &[u32]) -> Self {
        PrimeSet {
            primes: primes.iter().copied().collect(),
        }
    }

    fn index(&self, p: u32) -> Option<usize> {
        self.primes.iter().position(|&q| q == p)
    }
}

/// An element: nonzero residues per prime, sorted by prime.
pub type Residues = Vec<(u32, u32)>;

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

fn inverse_mod(u: u32, p: u32) -> u32 {
    (1..p)
        .find(|v| u as u64 * *v as u64 % p as u64 == 1)
        .expect("unit")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquarefreeAbelian;

impl SquarefreeAbelian {
    /// Unit choices for each prime of `m`, honouring `pinned`; `None` when a pin
    /// is unsatisfiable.
    fn unit_options(
        &self,
        m: &PrimeSet,
        n: &PrimeSet,
        pinned: &[(Residues, Residues)],
    ) -> Option<Vec<Vec<u32>>> {
        if !m.primes.is_subset(&n.primes) {
            return None;
        }
        let mut options: Vec<Vec<u32>> = m.primes.iter().map(|&p| (1..p).collect()).collect();
        for (x, y) in pinned {
            if !self.contains(m, x) || !self.contains(n, y) {
                return None;
            }
            for (k, &p) in m.primes.iter().enumerate() {
                let r = x.iter().find(|e| e.0 == p).map_or(0, |e| e.1);
                let t = y.iter().find(|e| e.0 == p).map_or(0, |e| e.1);
                options[k].retain(|&u| (r as u64 * u as u64 % p as u64) as u32 == t);
            }
            if y.iter().any(|e| !m.primes.contains(&e.0)) {
                return None;
            }
        }
        Some(options)
    }

    fn scaling(m: &PrimeSet, units: &[u32]) -> Vec<Residues> {
        m.primes
            .iter()
            .zip(units)
            .map(|(&p, &u)| vec![(p, u)])
            .collect()
    }
}

impl ClassInstance for SquarefreeAbelian {
    type Model = PrimeSet;
    type Element = Residues;

    fn tag(&self) -> String {
        "squarefree-abelian".into()
    }

    fn size(&self, m: &PrimeSet) -> usize {
        m.primes.len()
    }

    fn generators(&self, m: &PrimeSet) -> Vec<Residues> {
        m.primes.iter().map(|&p| vec![(p, 1)]).collect()
    }

    fn contains(&self, m: &PrimeSet, x: &Residues) -> bool {
        x.windows(2).all(|w| w[0].0 < w[1].0)
            && x.iter()
                .all(|&(p, r)| m.primes.contains(&p) && r > 0 && r < p)
    }

    fn elements(&self, m: &PrimeSet, bound: usize) -> Vec<Residues> {
        let mut out: Vec<Residues> = vec![Vec::new()];
        for &p in &m.primes {
            let mut next = Vec::new();
            for x in &out {
                for r in 0..p {
                    let mut y = x.clone();
                    if r > 0 {
                        y.push((p, r));
                    }
                    next.push(y);
                }
            }
            next.truncate(bound);
            out = next;
        }
        out.truncate(bound);
        out
    }

    fn is_strong_sub(&self, m: &PrimeSet, n: &PrimeSet) -> bool {
        m.primes.is_subset(&n.primes)
    }

    fn span_in(&self, n: &PrimeSet, a: &[Residues]) -> Result<PrimeSet> {
        if !a.iter().all(|x| self.contains(n, x)) {
            return Err(Error::PreconditionViolated(
                "generators outside the ambient model".into(),
            ));
        }
        Ok(PrimeSet {
            primes: a.iter().flatten().map(|e| e.0).collect(),
        })
    }

    fn substructures(&self, n: &PrimeSet, containing: &PrimeSet) -> Result<Vec<PrimeSet>> {
        if !containing.primes.is_subset(&n.primes) {
            return Ok(Vec::new());
        }
        let free: Vec<u32> = n.primes.difference(&containing.primes).copied().collect();
        if free.len() > 16 {
            return Err(Error::TooLarge {
                size: 1 << free.len(),
                limit: 1 << 16,
            });
        }
        let mut out: Vec<PrimeSet> = (0u32..1 << free.len())
            .map(|mask| {
                let mut s = containing.clone();
                s.primes.extend(
                    free.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &p)| p),
                );
                s
            })
            .collect();
        out.sort();
        Ok(out)
    }

    fn intersect(&self, a: &PrimeSet, b: &PrimeSet) -> Option<PrimeSet> {
        Some(PrimeSet {
            primes: a.primes.intersection(&b.primes).copied().collect(),
        })
    }

    fn apply(&self, e: &KEmbedding<PrimeSet, Residues>, x: &Residues) -> Residues {
        x.iter()
            .map(|&(p, r)| {
                let k = e.dom.index(p).expect("argument lies in the domain");
                let (q, u) = e.images[k][0];
                (q, (r as u64 * u as u64 % q as u64) as u32)
            })
            .collect()
    }

    fn is_valid_map(&self, dom: &PrimeSet, cod: &PrimeSet, images: &[Residues]) -> bool {
        images.len() == dom.primes.len()
            && dom
                .primes
                .iter()
                .zip(images)
                .all(|(&p, img)| img.len() == 1 && img[0].0 == p && self.contains(cod, img))
    }

    fn embeddings(
        &self,
        m: &PrimeSet,
        n: &PrimeSet,
        pinned: &[(Residues, Residues)],
        bound: usize,
    ) -> Vec<Vec<Residues>> {
        let Some(options) = self.unit_options(m, n, pinned) else {
            return Vec::new();
        };
        let mut out: Vec<Vec<u32>> = vec![Vec::new()];
        for opts in &options {
            out = out
                .iter()
                .flat_map(|pre| opts.iter().map(move |&u| [pre.as_slice(), &[u]].concat()))
                .take(bound)
                .collect();
        }
        out.iter().map(|units| Self::scaling(m, units)).collect()
    }

    fn iso_search(
        &self,
        m: &PrimeSet,
        n: &PrimeSet,
        pinned: &[(Residues, Residues)],
    ) -> IsoVerdict<Residues> {
        if m != n {
            return IsoVerdict::Absent {
                reason: "prime sets differ".into(),
            };
        }
        match self.embeddings(m, n, pinned, 1).into_iter().next() {
            Some(images) => IsoVerdict::Found(images),
            None => IsoVerdict::Absent {
                reason: "pinned values force a non-unit scaling".into(),
            },
        }
    }

    fn isomorphisms_from(
        &self,
        m: &PrimeSet,
        bound: usize,
        seed: u64,
    ) -> Vec<KEmbedding<PrimeSet, Residues>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![KEmbedding {
            dom: m.clone(),
            cod: m.clone(),
            images: self.generators(m),
        }];
        for _ in 0..bound * 4 {
            if out.len() >= bound {
                break;
            }
            let units: Vec<u32> = m.primes.iter().map(|&p| rng.gen_range(1..p)).collect();
            let e = KEmbedding {
                dom: m.clone(),
                cod: m.clone(),
                images: Self::scaling(m, &units),
            };
            if !out.contains(&e) {
                out.push(e);
            }
        }
        out
    }

    fn superstructures(&self, n: &PrimeSet) -> Vec<PrimeSet> {
        let extra = (2..)
            .find(|&p| is_prime(p) && !n.primes.contains(&p))
            .expect("infinitely many primes");
        let mut bigger = n.clone();
        bigger.primes.insert(extra);
        vec![n.clone(), bigger]
    }

    fn prime_minimal(&self, _ambient: &PrimeSet) -> Option<PrimeSet> {
        Some(PrimeSet::default())
    }

    fn describe(&self, m: &PrimeSet) -> String {
        format!("primes={:?}", m.primes)
    }
}

/// Prime sets meet in the base and cover the apex. Images carry the same
/// primes as their domains, so the check reads the models directly.
pub fn sqfree_amalgam_check(d: &Diagram<SquarefreeAbelian>) -> bool {
    let s = &d.span;
    let meet: BTreeSet<u32> = s.m1.primes.intersection(&s.m2.primes).copied().collect();
    let join: BTreeSet<u32> = s.m1.primes.union(&s.m2.primes).copied().collect();
    meet == s.m0.primes && join == d.n.primes
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrimeUnion;

impl Notion<SquarefreeAbelian> for PrimeUnion {
    fn name(&self) -> String {
        "prime-union".into()
    }

    fn is_amalgam(&self, inst: &SquarefreeAbelian, d: &Diagram<SquarefreeAbelian>) -> bool {
        is_commutative_square(inst, d) && sqfree_amalgam_check(d)
    }

    /// Only spans whose sides share no prime outside the base have an amalgam:
    /// a model cannot hold two copies of `Z/p`.
    fn construct(
        &self,
        inst: &SquarefreeAbelian,
        s: &SpanOf<SquarefreeAbelian>,
    ) -> Result<Diagram<SquarefreeAbelian>> {
        let meet: BTreeSet<u32> = s.m1.primes.intersection(&s.m2.primes).copied().collect();
        if meet != s.m0.primes || !s.m0.primes.is_subset(&s.m1.primes) {
            return Err(Error::PreconditionViolated(
                "side prime sets overlap outside the base".into(),
            ));
        }
        let n = PrimeSet {
            primes: s.m1.primes.union(&s.m2.primes).copied().collect(),
        };
        let g1 = KEmbedding {
            dom: s.m1.clone(),
            cod: n.clone(),
            images: inst.generators(&s.m1),
        };
        // g2 undoes f on the base so that the square commutes.
        let images =
            s.m2.primes
                .iter()
                .map(|&p| match s.m0.index(p) {
                    Some(k) => vec![(p, inverse_mod(s.f.images[k][0].1, p))],
                    None => vec![(p, 1)],
                })
                .collect();
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

    fn inclusion_candidate(
        &self,
        _inst: &SquarefreeAbelian,
        _m0: &PrimeSet,
        m1: &PrimeSet,
        m2: &PrimeSet,
        _n: &PrimeSet,
    ) -> Option<PrimeSet> {
        Some(PrimeSet {
            primes: m1.primes.union(&m2.primes).copied().collect(),
        })
    }
}

impl Separation for SquarefreeAbelian {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{by_inclusion, span_by_inclusion};

    fn ps(p: &[u32]) -> PrimeSet {
        PrimeSet::of(p)
    }

    #[test]
    fn amalgam_check_examples() {
        let s = SquarefreeAbelian;
        assert!(sqfree_amalgam_check(&by_inclusion(
            &s,
            &ps(&[]),
            &ps(&[2]),
            &ps(&[3]),
            &ps(&[2, 3])
        )));
        assert!(sqfree_amalgam_check(&by_inclusion(
            &s,
            &ps(&[2]),
            &ps(&[2]),
            &ps(&[2]),
            &ps(&[2])
        )));
        assert!(!sqfree_amalgam_check(&by_inclusion(
            &s,
            &ps(&[]),
            &ps(&[2]),
            &ps(&[3]),
            &ps(&[2, 3, 5])
        )));
    }

    #[test]
    fn construct_inverts_the_base_twist() {
        let s = SquarefreeAbelian;
        let mut span = span_by_inclusion(&s, &ps(&[5]), &ps(&[2, 5]), &ps(&[3, 5]));
        span.f.images = vec![vec![(5, 2)]];
        let d = PrimeUnion.construct(&s, &span).unwrap();
        assert!(PrimeUnion.is_amalgam(&s, &d));
        assert_eq!(d.g2.images, vec![vec![(3, 1)], vec![(5, 3)]]);
        let overlap = span_by_inclusion(&s, &ps(&[]), &ps(&[2]), &ps(&[2]));
        assert!(PrimeUnion.construct(&s, &overlap).is_err());
    }
}
