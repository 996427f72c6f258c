//! Finite analogs of the categoricity machinery: power models, the `∽`
//! relation on pairs, 3-monotonicity, distribution of sums over a larger base,
//! and isomorphism by matching decompositions.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::class::{
    apply, by_inclusion, compose, identity, image, inclusion, ClassInstance, Emb, IsoVerdict,
    KEmbedding,
};
use crate::error::{Error, Result};
use crate::notion::{oplus, uniqueness_iso, Notion};
use crate::report::{digest, to_value, PropertyReport, Tally};
use crate::seqamal::{
    assemble_inside, build_seq_amalgam, check_reorder_invariance, decompose_into_small,
    permutations, piece_images, verify_certificate, Cert, SeqAmalgamCertificate,
};

/// `template^copies / base`, realized as a sequential amalgam of identical pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct PowerModelSpec<M, E> {
    pub base: M,
    pub template: M,
    pub copies: usize,
    pub realized: SeqAmalgamCertificate<M, E>,
    /// Set once a holding uniqueness report has been attached.
    pub uniqueness_verified: bool,
}

pub type Power<I> = PowerModelSpec<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

impl<M: Clone, E> PowerModelSpec<M, E> {
    pub fn total(&self) -> &M {
        &self.realized.total
    }

    /// Record that the notion's uniqueness property was checked on this instance.
    pub fn attest(mut self, report: &PropertyReport) -> Self {
        self.uniqueness_verified = report.property == "uniqueness" && report.is_holds();
        self
    }

    /// Without uniqueness the power is only defined up to the chosen construction.
    pub fn warning(&self) -> Option<&'static str> {
        (!self.uniqueness_verified)
            .then_some("uniqueness not verified; power model may depend on construction order")
    }
}

/// Build `template^k / base` from `k` copies of `template` in a fixed order.
pub fn power_model<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    template: &I::Model,
    k: usize,
) -> Result<Power<I>> {
    if !inst.is_strong_sub(base, template) {
        return Err(Error::PreconditionViolated(
            "power model needs base <= template".into(),
        ));
    }
    let realized = if k == 0 {
        SeqAmalgamCertificate {
            base: base.clone(),
            pieces: Vec::new(),
            resolution: vec![base.clone()],
            base_map: identity(inst, base),
            maps: Vec::new(),
            total: base.clone(),
        }
    } else {
        build_seq_amalgam(inst, notion, base, &vec![template.clone(); k])?
    };
    Ok(PowerModelSpec {
        base: base.clone(),
        template: template.clone(),
        copies: k,
        realized,
        uniqueness_verified: false,
    })
}

/// Power models of two pairs and an isomorphism between them carrying the
/// image of the first bottom onto the image of the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "M: Serialize, E: Serialize",
    deserialize = "M: DeserializeOwned, E: DeserializeOwned"
))]
pub struct BacksimWitness<M, E> {
    /// `(top, bottom)`.
    pub pair1: (M, M),
    pub pair2: (M, M),
    pub theta: usize,
    pub power1: PowerModelSpec<M, E>,
    pub power2: PowerModelSpec<M, E>,
    /// Images of `power1.total()`'s generators.
    pub iso: Vec<E>,
}

pub type Backsim<I> = BacksimWitness<<I as ClassInstance>::Model, <I as ClassInstance>::Element>;

/// Largest number of bottom isomorphisms tried before giving up.
pub const BACKSIM_CANDIDATES: usize = 64;

/// Search for `(n1, m1) ∽ (n2, m2)` with pairs given as `(top, bottom)`.
///
/// Each bottom isomorphism `m1 ≅ m2` is tried as a pin set for an isomorphism
/// of the `theta`-powers. `Ok(None)` means no candidate extends; if the
/// candidate list was truncated or a search gave up the result is
/// [`Error::SearchBoundExceeded`].
pub fn backsim<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    pair1: (&I::Model, &I::Model),
    pair2: (&I::Model, &I::Model),
    theta: usize,
) -> Result<Option<Backsim<I>>> {
    if theta == 0 {
        return Err(Error::PreconditionViolated(
            "theta must be at least 1".into(),
        ));
    }
    let power1 = power_model(inst, notion, pair1.1, pair1.0, theta)?;
    let power2 = power_model(inst, notion, pair2.1, pair2.0, theta)?;
    let (p1, p2) = (power1.total(), power2.total());
    if inst.size(p1) != inst.size(p2) {
        return Ok(None);
    }
    let b1 = &power1.realized.resolution[0];
    let b2 = &power2.realized.resolution[0];
    if let IsoVerdict::Absent { .. } = inst.iso_search(b1, b2, &[]) {
        return Ok(None);
    }
    let candidates: Vec<_> = inst
        .embeddings(b1, b2, &[], BACKSIM_CANDIDATES)
        .into_iter()
        .filter(|images| matches!(image(inst, &KEmbedding { dom: b1.clone(), cod: b2.clone(), images: images.clone() }), Ok(ref im) if im == b2))
        .collect();
    let mut inconclusive = candidates.len() >= BACKSIM_CANDIDATES;
    let gens = inst.generators(b1);
    for images in &candidates {
        let pins: Vec<_> = gens.iter().cloned().zip(images.iter().cloned()).collect();
        match inst.iso_search(p1, p2, &pins) {
            IsoVerdict::Found(iso) => {
                let witness = BacksimWitness {
                    pair1: (pair1.0.clone(), pair1.1.clone()),
                    pair2: (pair2.0.clone(), pair2.1.clone()),
                    theta,
                    power1,
                    power2,
                    iso,
                };
                return Ok(Some(witness));
            }
            IsoVerdict::Absent { .. } => {}
            IsoVerdict::Unknown { .. } => inconclusive = true,
        }
    }
    if inconclusive {
        Err(Error::SearchBoundExceeded(BACKSIM_CANDIDATES))
    } else {
        Ok(None)
    }
}

/// Re-check a witness: an isomorphism of the power totals mapping bottom image onto bottom image.
pub fn verify_backsim<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    w: &Backsim<I>,
) -> bool {
    let (p1, p2) = (w.power1.total(), w.power2.total());
    let h = KEmbedding {
        dom: p1.clone(),
        cod: p2.clone(),
        images: w.iso.clone(),
    };
    let bottom = KEmbedding {
        dom: w.power1.realized.resolution[0].clone(),
        cod: p2.clone(),
        images: inst
            .generators(&w.power1.realized.resolution[0])
            .iter()
            .map(|x| apply(inst, &h, x))
            .collect(),
    };
    verify_certificate(inst, notion, &w.power1.realized).is_ok()
        && verify_certificate(inst, notion, &w.power2.realized).is_ok()
        && inst.is_valid_map(p1, p2, &w.iso)
        && matches!(image(inst, &h), Ok(ref im) if im == p2)
        && matches!(image(inst, &bottom), Ok(ref im) if im == &w.power2.realized.resolution[0])
}

/// `m0 <= m1, m2, m3 <= n`, with `m1, m2` subamalgamated in `n` and `n = m3 ⊕ (m1 ⊕ m2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneConfig<M> {
    pub m0: M,
    pub m1: M,
    pub m2: M,
    pub m3: M,
    pub n: M,
}

fn sub_amalgam<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    a: &I::Model,
    b: &I::Model,
    base: &I::Model,
    n: &I::Model,
) -> Option<I::Model> {
    oplus(inst, notion, a, b, base, n).ok().flatten()
}

/// Whether `c` meets the hypotheses of 3-monotonicity.
pub fn is_monotone_config<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    c: &MonotoneConfig<I::Model>,
) -> bool {
    let Some(m12) = sub_amalgam(inst, notion, &c.m1, &c.m2, &c.m0, &c.n) else {
        return false;
    };
    inst.is_strong_sub(&c.m0, &c.m3)
        && notion.is_amalgam(inst, &by_inclusion(inst, &c.m0, &c.m3, &m12, &c.n))
}

/// Every hypothesis-satisfying configuration drawn from `pool` (all inside `n`), at most `cap`.
pub fn monotone_configs<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    pool: &[I::Model],
    n: &I::Model,
    cap: usize,
) -> Vec<MonotoneConfig<I::Model>> {
    let mut out = Vec::new();
    for m0 in pool {
        let above: Vec<_> = pool
            .iter()
            .filter(|m| inst.is_strong_sub(m0, m) && inst.is_strong_sub(m, n))
            .collect();
        for m1 in &above {
            for m2 in &above {
                let Some(m12) = sub_amalgam(inst, notion, m1, m2, m0, n) else {
                    continue;
                };
                for m3 in &above {
                    if out.len() >= cap {
                        return out;
                    }
                    if notion.is_amalgam(inst, &by_inclusion(inst, m0, m3, &m12, n)) {
                        out.push(MonotoneConfig {
                            m0: m0.clone(),
                            m1: (*m1).clone(),
                            m2: (*m2).clone(),
                            m3: (*m3).clone(),
                            n: n.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// `n = (m1 ⊕ m3) ⊕_{m3} (m2 ⊕ m3)` for every configuration.
pub fn check_3monotonic<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    configs: &[MonotoneConfig<I::Model>],
) -> Result<PropertyReport> {
    if configs.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut t = Tally::new("3-monotonic");
    for c in configs {
        if !is_monotone_config(inst, notion, c) {
            return Err(Error::PreconditionViolated(format!(
                "not a monotone configuration: {}",
                to_value(c)
            )));
        }
        let m13 = sub_amalgam(inst, notion, &c.m1, &c.m3, &c.m0, &c.n);
        let m23 = sub_amalgam(inst, notion, &c.m2, &c.m3, &c.m0, &c.n);
        let ok = match (&m13, &m23) {
            (Some(a), Some(b)) => notion.is_amalgam(inst, &by_inclusion(inst, &c.m3, a, b, &c.n)),
            _ => false,
        };
        t.record(
            ok,
            || json!({ "config": to_value(c), "m13": to_value(&m13), "m23": to_value(&m23) }),
        );
    }
    Ok(t.finish())
}

/// Distribution of a sum over a larger base: with `m` the sum of `pieces` over
/// `base` and `n = n_star ⊕ m`, whether `n` is the sum over `n_star` of the
/// lifted pieces `n_star ⊕ pieces[i]`. Everything lives inside `n`.
pub fn check_distribution<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    pieces: &[I::Model],
    n_star: &I::Model,
    n: &I::Model,
) -> Result<bool> {
    let m = assemble_inside(inst, notion, base, pieces, n)?.total;
    if !notion.is_amalgam(inst, &by_inclusion(inst, base, n_star, &m, n)) {
        return Err(Error::PreconditionViolated(
            "n is not n_star ⊕ m over the base".into(),
        ));
    }
    let lifted = pieces
        .iter()
        .enumerate()
        .map(|(index, p)| {
            sub_amalgam(inst, notion, n_star, p, base, n).ok_or_else(|| {
                Error::AmalgamConstructionFailed {
                    index,
                    reason: "piece does not lift over n_star".into(),
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cert = assemble_inside(inst, notion, n_star, &lifted, n)?;
    Ok(cert.total == *n && verify_certificate(inst, notion, &cert).is_ok())
}

/// One isomorphism class of pieces, identified by its least member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PieceClass {
    pub label: String,
    pub digest: String,
}

/// Mismatched piece-class multisets of two decompositions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub left: Vec<PieceClass>,
    pub right: Vec<PieceClass>,
    /// Classes occurring more often on the left, with multiplicity.
    pub left_only: Vec<PieceClass>,
    pub right_only: Vec<PieceClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionIso<E> {
    /// Images of the left model's generators; `pairing[i]` is the right piece matched to left piece `i`.
    Found {
        images: Vec<E>,
        pairing: Vec<usize>,
    },
    Obstructed(Obstruction),
}

impl<E> DecompositionIso<E> {
    pub fn images(&self) -> Option<&[E]> {
        match self {
            DecompositionIso::Found { images, .. } => Some(images),
            DecompositionIso::Obstructed(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            DecompositionIso::Obstructed(o) => Some(o),
            DecompositionIso::Found { .. } => None,
        }
    }
}

/// A pinned-base isomorphism between pieces from either side; `lift` moves the
/// left base generators to each side's base.
fn pieces_isomorphic<I: ClassInstance>(
    inst: &I,
    (p, p_right): (&I::Model, bool),
    (q, q_right): (&I::Model, bool),
    base_gens: &[I::Element],
    h0: &Emb<I>,
) -> Result<Option<Vec<I::Element>>> {
    let lift = |right: bool, b: &I::Element| if right { apply(inst, h0, b) } else { b.clone() };
    let pins: Vec<_> = base_gens
        .iter()
        .map(|b| (lift(p_right, b), lift(q_right, b)))
        .collect();
    match inst.iso_search(p, q, &pins) {
        IsoVerdict::Found(images) => Ok(Some(images)),
        IsoVerdict::Absent { .. } => Ok(None),
        IsoVerdict::Unknown { bound } => Err(Error::SearchBoundExceeded(bound)),
    }
}

fn multiset_difference(a: &[PieceClass], b: &[PieceClass]) -> Vec<PieceClass> {
    let mut counts: BTreeMap<&PieceClass, isize> = BTreeMap::new();
    for c in a {
        *counts.entry(c).or_default() += 1;
    }
    for c in b {
        *counts.entry(c).or_default() -= 1;
    }
    counts
        .into_iter()
        .flat_map(|(c, k)| std::iter::repeat_n(c.clone(), k.max(0) as usize))
        .collect()
}

/// Decompose `m` over `base_m` and `n` over `base_n` into pieces of size at
/// most `piece_bound` above the base, sort pieces into isomorphism classes and,
/// when the class multisets agree, assemble an isomorphism `m ≅ n` one stage at
/// a time from uniqueness isomorphisms. The bases must be isomorphic.
pub fn iso_via_decomposition<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    (m, base_m): (&I::Model, &I::Model),
    (n, base_n): (&I::Model, &I::Model),
    piece_bound: usize,
) -> Result<DecompositionIso<I::Element>> {
    if inst.size(m) != inst.size(n) {
        return Err(Error::PreconditionViolated(format!(
            "sizes differ: {} vs {}",
            inst.size(m),
            inst.size(n)
        )));
    }
    let h0_images = inst
        .iso_search(base_m, base_n, &[])
        .found()
        .ok_or_else(|| Error::PreconditionViolated("bases are not isomorphic".into()))?;
    let h0 = KEmbedding {
        dom: base_m.clone(),
        cod: base_n.clone(),
        images: h0_images,
    };
    let split = |model: &I::Model, base: &I::Model| -> Result<Cert<I>> {
        if model == base {
            return Ok(SeqAmalgamCertificate {
                base: base.clone(),
                pieces: Vec::new(),
                resolution: vec![base.clone()],
                base_map: identity(inst, base),
                maps: Vec::new(),
                total: base.clone(),
            });
        }
        decompose_into_small(inst, notion, base, model, piece_bound)
            .map_err(|e| Error::DecompositionFailed(e.to_string()))
    };
    let left = split(m, base_m)?;
    let right = split(n, base_n)?;
    let left_pieces = piece_images(inst, &left)?;
    let right_pieces = piece_images(inst, &right)?;

    // partition all pieces into classes
    let base_gens = inst.generators(base_m);
    let all: Vec<(&I::Model, bool)> = left_pieces
        .iter()
        .map(|p| (p, false))
        .chain(right_pieces.iter().map(|p| (p, true)))
        .collect();
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = vec![0usize; all.len()];
    for (i, &piece) in all.iter().enumerate() {
        let mut found = None;
        for (c, &r) in reps.iter().enumerate() {
            if pieces_isomorphic(inst, all[r], piece, &base_gens, &h0)?.is_some() {
                found = Some(c);
                break;
            }
        }
        class_of[i] = found.unwrap_or_else(|| {
            reps.push(i);
            reps.len() - 1
        });
    }
    let labels: Vec<PieceClass> = (0..reps.len())
        .map(|c| {
            let least = (0..all.len())
                .filter(|&i| class_of[i] == c)
                .map(|i| all[i].0)
                .min()
                .expect("class is nonempty");
            PieceClass {
                label: inst.describe(least),
                digest: digest(least),
            }
        })
        .collect();
    let k = left_pieces.len();
    let mut gamma_left: Vec<PieceClass> =
        class_of[..k].iter().map(|&c| labels[c].clone()).collect();
    let mut gamma_right: Vec<PieceClass> =
        class_of[k..].iter().map(|&c| labels[c].clone()).collect();
    gamma_left.sort();
    gamma_right.sort();
    if gamma_left != gamma_right {
        let left_only = multiset_difference(&gamma_left, &gamma_right);
        let right_only = multiset_difference(&gamma_right, &gamma_left);
        return Ok(DecompositionIso::Obstructed(Obstruction {
            left: gamma_left,
            right: gamma_right,
            left_only,
            right_only,
        }));
    }

    // pair left piece i with the first unused right piece of the same class
    let mut used = vec![false; right_pieces.len()];
    let mut pairing = Vec::with_capacity(k);
    for i in 0..k {
        let j = (0..right_pieces.len())
            .find(|&j| !used[j] && class_of[k + j] == class_of[i])
            .expect("class multisets agree");
        used[j] = true;
        pairing.push(j);
    }
    let reordered: Vec<_> = pairing.iter().map(|&j| right_pieces[j].clone()).collect();
    let right = assemble_inside(inst, notion, base_n, &reordered, n)?;
    if right.total != *n {
        return Err(Error::VerificationFailed(
            "reordered pieces do not reassemble the right model".into(),
        ));
    }
    let left_res = assemble_inside(inst, notion, base_m, &left_pieces, m)?.resolution;

    let mut h = h0;
    for i in 0..k {
        let (p, q) = (&left_pieces[i], &reordered[i]);
        let (r, s) = (&left_res[i], &right.resolution[i]);
        let (r_next, s_next) = (&left_res[i + 1], &right.resolution[i + 1]);
        let piece_iso = pieces_isomorphic(
            inst,
            (p, false),
            (q, true),
            &base_gens,
            &compose(inst, &h, &inclusion(inst, base_m, r)),
        )?
        .ok_or(Error::UniquenessFailed(i))?;
        let d1 = by_inclusion(inst, base_m, p, r, r_next);
        let piece_map = KEmbedding {
            dom: p.clone(),
            cod: q.clone(),
            images: piece_iso,
        };
        let mut d2 = d1.clone();
        d2.n = s_next.clone();
        d2.g1 = compose(inst, &inclusion(inst, q, s_next), &piece_map);
        d2.g2 = compose(inst, &inclusion(inst, s, s_next), &h);
        let images = match uniqueness_iso(inst, &d1, &d2)? {
            IsoVerdict::Found(images) => images,
            IsoVerdict::Absent { .. } => return Err(Error::UniquenessFailed(i)),
            IsoVerdict::Unknown { bound } => return Err(Error::SearchBoundExceeded(bound)),
        };
        h = KEmbedding {
            dom: r_next.clone(),
            cod: s_next.clone(),
            images,
        };
    }
    let whole = matches!(image(inst, &h), Ok(ref im) if im == n);
    if !(inst.is_valid_map(m, n, &h.images) && whole) {
        return Err(Error::VerificationFailed(
            "assembled map is not an isomorphism".into(),
        ));
    }
    Ok(DecompositionIso::Found {
        images: h.images,
        pairing,
    })
}

/// Order-insensitivity, absorption and the power-difference identity for
/// powers of `template` over `base` with up to `max_k` copies.
pub fn check_power_properties<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    base: &I::Model,
    template: &I::Model,
    max_k: usize,
) -> Result<Vec<PropertyReport>> {
    let mut order = Tally::new("power-order-insensitive");
    let mut absorb = Tally::new("power-absorption");
    let mut diff = Tally::new("power-difference");
    let powers = (0..=max_k)
        .map(|k| power_model(inst, notion, base, template, k))
        .collect::<Result<Vec<_>>>()?;
    for (k, pw) in powers.iter().enumerate().skip(1) {
        let cert = &pw.realized;
        for sigma in permutations(k) {
            let v = check_reorder_invariance(inst, notion, cert, &sigma);
            order.record(
                v.is_holds(),
                || json!({ "copies": k, "sigma": sigma, "verdict": v }),
            );
        }
        let images = piece_images(inst, cert)?;
        for j in 0..=k {
            let first =
                assemble_inside(inst, notion, &cert.resolution[0], &images[..j], &cert.total);
            let ok = match &first {
                Ok(c) => c.total == cert.resolution[j] && inst.is_strong_sub(&c.total, &cert.total),
                Err(_) => false,
            };
            absorb.record(ok, || json!({ "copies": k, "prefix": j, "error": first.as_ref().err().map(|e| e.to_string()) }));
        }
        for j in 1..k {
            let step = &powers[j + 1].realized;
            let (n1, n2) = (&step.resolution[j], &step.total);
            let outcome = power_model(inst, notion, n1, n2, k - j)
                .map(|q| inst.iso_search(q.total(), &cert.total, &[]));
            match outcome {
                Ok(IsoVerdict::Found(_)) => diff.pass(),
                Ok(IsoVerdict::Unknown { .. }) => diff.unknown(),
                other => diff.record(
                    false,
                    || json!({ "copies": k, "j": j, "outcome": format!("{other:?}") }),
                ),
            }
        }
    }
    Ok(vec![order.finish(), absorb.finish(), diff.finish()])
}

/// Reflexivity, symmetry and transitivity of `∽` on `pairs`, plus standalone
/// re-verification of every witness found.
pub fn check_backsim_equivalence<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    pairs: &[(I::Model, I::Model)],
    theta: usize,
) -> Result<Vec<PropertyReport>> {
    if pairs.is_empty() {
        return Err(Error::EmptyPool);
    }
    let k = pairs.len();
    let mut rel = vec![vec![false; k]; k];
    let mut witnessed = Tally::new("backsim-witness-verifies");
    for i in 0..k {
        for j in 0..k {
            let w = backsim(
                inst,
                notion,
                (&pairs[i].0, &pairs[i].1),
                (&pairs[j].0, &pairs[j].1),
                theta,
            )?;
            if let Some(w) = &w {
                witnessed.record(verify_backsim(inst, notion, w), || to_value(w));
            }
            rel[i][j] = w.is_some();
        }
    }
    let mut refl = Tally::new("backsim-reflexive");
    let mut sym = Tally::new("backsim-symmetric");
    let mut trans = Tally::new("backsim-transitive");
    for i in 0..k {
        refl.record(rel[i][i], || to_value(&pairs[i]));
        for j in 0..k {
            sym.record(rel[i][j] == rel[j][i], || {
                json!([to_value(&pairs[i]), to_value(&pairs[j])])
            });
            for l in 0..k {
                let ok = !(rel[i][j] && rel[j][l]) || rel[i][l];
                trans.record(ok, || {
                    json!([
                        to_value(&pairs[i]),
                        to_value(&pairs[j]),
                        to_value(&pairs[l])
                    ])
                });
            }
        }
    }
    Ok(vec![
        refl.finish(),
        sym.finish(),
        trans.finish(),
        witnessed.finish(),
    ])
}

/// Every pair of size-one extensions of the prime minimal model is `∽`-equivalent.
pub fn check_simuni<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    tops: &[I::Model],
    theta: usize,
) -> Result<PropertyReport> {
    if tops.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut t = Tally::new("simuni");
    let bottoms = tops
        .iter()
        .map(|m| {
            inst.prime_minimal(m)
                .ok_or(Error::NotSupported("prime minimal model"))
        })
        .collect::<Result<Vec<_>>>()?;
    for i in 0..tops.len() {
        for j in 0..tops.len() {
            let w = backsim(
                inst,
                notion,
                (&tops[i], &bottoms[i]),
                (&tops[j], &bottoms[j]),
                theta,
            )?;
            t.record(
                w.is_some_and(|w| verify_backsim(inst, notion, &w)),
                || json!({ "left": to_value(&tops[i]), "right": to_value(&tops[j]) }),
            );
        }
    }
    Ok(t.finish())
}
