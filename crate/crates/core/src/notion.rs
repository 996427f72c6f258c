//! Notions of amalgamation: the strategy interface, its six axioms, the
//! structural properties, and the `⊕` operation with its lemmas.

use serde_json::json;

use crate::class::{
    apply, by_inclusion, check_embedding, compose, image, inclusion, invert, is_commutative_square,
    restrict, with_cod, AmalgamDiagram, ClassInstance, Diagram, IsoVerdict, KEmbedding, Span,
    SpanOf,
};
use crate::error::{Error, Result};
use crate::report::{to_value, PropertyReport, Tally, Verdict};

/// A selection `𝒜` of amalgams for every span of a class.
pub trait Notion<I: ClassInstance>: Sync {
    fn name(&self) -> String;

    /// Membership of a diagram in `𝒜`; must reject non-commuting or invalid diagrams.
    fn is_amalgam(&self, inst: &I, d: &Diagram<I>) -> bool;

    /// Completeness witness.
    fn construct(&self, inst: &I, s: &SpanOf<I>) -> Result<Diagram<I>>;

    /// Up to `bound` members of `𝒜(s)`, constructed witness first.
    fn enumerate_amalgams(&self, inst: &I, s: &SpanOf<I>, bound: usize) -> Result<Vec<Diagram<I>>>
    where
        Self: Sized,
    {
        amalgams_via_embeddings(self, inst, s, bound)
    }

    /// The only model that can be an amalgam by inclusion of `m1, m2` over `m0`
    /// inside `n`, when the notion determines it directly.
    fn inclusion_candidate(
        &self,
        _inst: &I,
        _m0: &I::Model,
        _m1: &I::Model,
        _m2: &I::Model,
        _n: &I::Model,
    ) -> Option<I::Model> {
        None
    }

    /// `m2` with `n` an amalgam by inclusion of `m1, m2` over `m0`.
    fn decompose(&self, inst: &I, m0: &I::Model, m1: &I::Model, n: &I::Model) -> Result<I::Model>
    where
        Self: Sized,
    {
        decompose_by_search(self, inst, m0, m1, n)
    }
}

/// Enumeration caps for the property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Amalgams (or commutative squares) enumerated per span.
    pub amalgams: usize,
    /// Isomorphisms drawn per model for invariance checks.
    pub isos: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            amalgams: 6,
            isos: 6,
            seed: 0,
        }
    }
}

/// Amalgams into the constructed apex, varying `g1` and `g2` over embeddings.
pub fn amalgams_via_embeddings<I: ClassInstance, N: Notion<I>>(
    notion: &N,
    inst: &I,
    s: &SpanOf<I>,
    bound: usize,
) -> Result<Vec<Diagram<I>>> {
    let base = notion.construct(inst, s)?;
    let mut out = vec![base.clone()];
    let squares = commutative_squares(inst, s, &base.n, bound.saturating_mul(4));
    for d in squares {
        if out.len() >= bound {
            break;
        }
        if d != base && notion.is_amalgam(inst, &d) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Commutative squares over `s` with apex `n`, spread over distinct `g1`.
pub fn commutative_squares<I: ClassInstance>(
    inst: &I,
    s: &SpanOf<I>,
    n: &I::Model,
    bound: usize,
) -> Vec<Diagram<I>> {
    let g1s = inst.embeddings(&s.m1, n, &[], bound);
    let per = (bound / g1s.len().max(1)).max(1);
    let mut out = Vec::new();
    for g1_images in g1s {
        let g1 = KEmbedding {
            dom: s.m1.clone(),
            cod: n.clone(),
            images: g1_images,
        };
        let pinned: Vec<_> = inst
            .generators(&s.m0)
            .iter()
            .map(|x| (apply(inst, &s.f, x), apply(inst, &g1, x)))
            .collect();
        for g2_images in inst.embeddings(&s.m2, n, &pinned, per) {
            let g2 = KEmbedding {
                dom: s.m2.clone(),
                cod: n.clone(),
                images: g2_images,
            };
            out.push(AmalgamDiagram {
                span: s.clone(),
                n: n.clone(),
                g1: g1.clone(),
                g2,
            });
        }
        if out.len() >= bound {
            break;
        }
    }
    out
}

/// First `m2` in substructure order that decomposes `n` over `m0` alongside `m1`.
pub fn decompose_by_search<I: ClassInstance, N: Notion<I>>(
    notion: &N,
    inst: &I,
    m0: &I::Model,
    m1: &I::Model,
    n: &I::Model,
) -> Result<I::Model> {
    if !(inst.is_strong_sub(m0, m1) && inst.is_strong_sub(m1, n)) {
        return Err(Error::PreconditionViolated(
            "decompose needs m0 <= m1 <= n".into(),
        ));
    }
    for m2 in inst.substructures(n, m0)? {
        if notion.is_amalgam(inst, &by_inclusion(inst, m0, m1, &m2, n)) {
            return Ok(m2);
        }
    }
    Err(Error::NoDecomposition)
}

/// Decompose and verify the result.
pub fn decompose<I: ClassInstance, N: Notion<I>>(
    notion: &N,
    inst: &I,
    m0: &I::Model,
    m1: &I::Model,
    n: &I::Model,
) -> Result<I::Model> {
    let m2 = notion.decompose(inst, m0, m1, n)?;
    if inst.is_strong_sub(m0, &m2)
        && inst.is_strong_sub(&m2, n)
        && notion.is_amalgam(inst, &by_inclusion(inst, m0, m1, &m2, n))
    {
        Ok(m2)
    } else {
        Err(Error::NoDecomposition)
    }
}

fn oplus_pre<I: ClassInstance>(
    inst: &I,
    m1: &I::Model,
    m2: &I::Model,
    m0: &I::Model,
    n: &I::Model,
) -> Result<()> {
    let ok = inst.is_strong_sub(m0, m1)
        && inst.is_strong_sub(m0, m2)
        && inst.is_strong_sub(m1, n)
        && inst.is_strong_sub(m2, n);
    if ok {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(
            "oplus needs m0 <= m1, m2 <= n".into(),
        ))
    }
}

/// `m1 ⊕^n_{m0} m2`: the submodel of `n` that is an amalgam by inclusion, if any.
///
/// Uses the notion's direct candidate when it has one, otherwise searches and
/// reports two distinct witnesses as [`Error::AmbiguousWitness`].
pub fn oplus<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    m1: &I::Model,
    m2: &I::Model,
    m0: &I::Model,
    n: &I::Model,
) -> Result<Option<I::Model>> {
    oplus_pre(inst, m1, m2, m0, n)?;
    match notion.inclusion_candidate(inst, m0, m1, m2, n) {
        Some(c) => Ok((inst.is_strong_sub(&c, n)
            && notion.is_amalgam(inst, &by_inclusion(inst, m0, m1, m2, &c)))
        .then_some(c)),
        None => oplus_exhaustive(inst, notion, m1, m2, m0, n),
    }
}

/// `oplus` by exhaustive substructure search, never consulting a candidate.
pub fn oplus_exhaustive<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    m1: &I::Model,
    m2: &I::Model,
    m0: &I::Model,
    n: &I::Model,
) -> Result<Option<I::Model>> {
    oplus_pre(inst, m1, m2, m0, n)?;
    let mut gens = inst.generators(m1);
    gens.extend(inst.generators(m2));
    let floor = inst.span_in(n, &gens)?;
    let mut found: Option<I::Model> = None;
    for c in inst.substructures(n, &floor)? {
        if notion.is_amalgam(inst, &by_inclusion(inst, m0, m1, m2, &c)) {
            if let Some(prev) = &found {
                return Err(Error::AmbiguousWitness(format!("{prev:?} and {c:?}")));
            }
            found = Some(c);
        }
    }
    Ok(found)
}

/// An isomorphism `h: d1.n -> d2.n` with `h.g1 = g1'` and `h.g2 = g2'`.
pub fn uniqueness_iso<I: ClassInstance>(
    inst: &I,
    d1: &Diagram<I>,
    d2: &Diagram<I>,
) -> Result<IsoVerdict<I::Element>> {
    if d1.span != d2.span {
        return Err(Error::SpanMismatch);
    }
    let mut pinned = Vec::new();
    for x in inst.generators(&d1.span.m1) {
        pinned.push((apply(inst, &d1.g1, &x), apply(inst, &d2.g1, &x)));
    }
    for y in inst.generators(&d1.span.m2) {
        pinned.push((apply(inst, &d1.g2, &y), apply(inst, &d2.g2, &y)));
    }
    Ok(inst.iso_search(&d1.n, &d2.n, &pinned))
}

/// Whether `h` (images on `d1.n`'s generators) is an isomorphism onto `d2.n` commuting with both legs.
pub fn is_uniqueness_iso<I: ClassInstance>(
    inst: &I,
    d1: &Diagram<I>,
    d2: &Diagram<I>,
    h: &[I::Element],
) -> bool {
    let h = KEmbedding {
        dom: d1.n.clone(),
        cod: d2.n.clone(),
        images: h.to_vec(),
    };
    check_embedding(inst, &h).unwrap_or(false)
        && matches!(image(inst, &h), Ok(ref im) if im == &d2.n)
        && compose(inst, &h, &d1.g1).images == d2.g1.images
        && compose(inst, &h, &d1.g2).images == d2.g2.images
}

/// Given `mp = m1 ⊕ m2` and `n = m3 ⊕ mp` over `m0`, the model `n' = m2 ⊕ m3` with `n = m1 ⊕ n'`.
#[allow(clippy::too_many_arguments)]
pub fn rotate3<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    m0: &I::Model,
    m1: &I::Model,
    m2: &I::Model,
    m3: &I::Model,
    mp: &I::Model,
    n: &I::Model,
) -> Result<I::Model> {
    let first = by_inclusion(inst, m0, m1, m2, mp);
    if !notion.is_amalgam(inst, &first) {
        return Err(Error::PreconditionViolated(format!(
            "mp is not m1 ⊕ m2: {}",
            to_value(&first)
        )));
    }
    let second = by_inclusion(inst, m0, m3, mp, n);
    if !notion.is_amalgam(inst, &second) {
        return Err(Error::PreconditionViolated(format!(
            "n is not m3 ⊕ mp: {}",
            to_value(&second)
        )));
    }
    let np = oplus(inst, notion, m2, m3, m0, n)?.ok_or_else(|| {
        Error::VerificationFailed("m2 and m3 are not subamalgamated inside n".into())
    })?;
    let last = by_inclusion(inst, m0, m1, &np, n);
    if !notion.is_amalgam(inst, &last) {
        return Err(Error::VerificationFailed(format!(
            "n is not m1 ⊕ n': {}",
            to_value(&last)
        )));
    }
    Ok(np)
}

/// The trivial amalgam `(m1, ι, id)` of the span `(m0, m0, m1, ι)`.
pub fn trivial_amalgam<I: ClassInstance>(inst: &I, m0: &I::Model, m1: &I::Model) -> Diagram<I> {
    let iota = inclusion(inst, m0, m1);
    AmalgamDiagram {
        span: Span {
            m0: m0.clone(),
            m1: m0.clone(),
            m2: m1.clone(),
            f: iota.clone(),
        },
        n: m1.clone(),
        g1: iota,
        g2: crate::class::identity(inst, m1),
    }
}

/// Side Invariance 1 transport of `d` along `h: m1 ≅ m'`.
pub fn side1_transport<I: ClassInstance>(
    inst: &I,
    d: &Diagram<I>,
    h: &crate::class::Emb<I>,
) -> Result<Diagram<I>> {
    let s = &d.span;
    let h0 = restrict(inst, h, &s.m0);
    let h0_inv = invert(inst, &h0)?;
    let f2 = compose(inst, &s.f, &h0_inv);
    let h_inv = invert(inst, h)?;
    let g1 = compose(inst, &d.g1, &h_inv);
    Ok(AmalgamDiagram {
        span: Span {
            m0: h0_inv.dom.clone(),
            m1: h_inv.dom.clone(),
            m2: s.m2.clone(),
            f: f2,
        },
        n: d.n.clone(),
        g1,
        g2: d.g2.clone(),
    })
}

/// Side Invariance 2 transport of `d` along `h: m2 ≅ m'`.
pub fn side2_transport<I: ClassInstance>(
    inst: &I,
    d: &Diagram<I>,
    h: &crate::class::Emb<I>,
) -> Result<Diagram<I>> {
    let s = &d.span;
    let h_inv = invert(inst, h)?;
    Ok(AmalgamDiagram {
        span: Span {
            m0: s.m0.clone(),
            m1: s.m1.clone(),
            m2: h_inv.dom.clone(),
            f: with_cod(&compose(inst, h, &s.f), &h_inv.dom),
        },
        n: d.n.clone(),
        g1: d.g1.clone(),
        g2: compose(inst, &d.g2, &h_inv),
    })
}

/// The symmetric diagram `(n, g2, g1)` over `(f[m0], m2, m1, f⁻¹)`.
pub fn symmetric<I: ClassInstance>(inst: &I, d: &Diagram<I>) -> Result<Diagram<I>> {
    let s = &d.span;
    let f_inv = invert(inst, &s.f)?;
    Ok(AmalgamDiagram {
        span: Span {
            m0: f_inv.dom.clone(),
            m1: s.m2.clone(),
            m2: s.m1.clone(),
            f: with_cod(&f_inv, &s.m1),
        },
        n: d.n.clone(),
        g1: d.g2.clone(),
        g2: d.g1.clone(),
    })
}

/// Completeness, trivial amalgams, Top Invariance, both Side Invariances and Symmetry.
pub fn verify_notion_axioms<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    spans: &[SpanOf<I>],
    bounds: Bounds,
) -> Result<Vec<PropertyReport>> {
    if spans.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut completeness = Tally::new("completeness");
    let mut trivial = Tally::new("trivial-amalgams");
    let mut top = Tally::new("top-invariance");
    let mut side1 = Tally::new("side-invariance-1");
    let mut side2 = Tally::new("side-invariance-2");
    let mut symmetry = Tally::new("symmetry");

    for (si, s) in spans.iter().enumerate() {
        let built = notion.construct(inst, s);
        let ok = matches!(&built, Ok(d) if notion.is_amalgam(inst, d) && d.span == *s);
        completeness.record(ok, || json!({ "span": to_value(s) }));

        let t = trivial_amalgam(inst, &s.m0, &s.m1);
        trivial.record(notion.is_amalgam(inst, &t), || to_value(&t));

        let Ok(amalgams) = notion.enumerate_amalgams(inst, s, bounds.amalgams) else {
            continue;
        };
        let seed = bounds.seed ^ (si as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        for d in &amalgams {
            for h in inst.isomorphisms_from(&d.n, bounds.isos, seed) {
                let moved = AmalgamDiagram {
                    span: d.span.clone(),
                    n: h.cod.clone(),
                    g1: compose(inst, &h, &d.g1),
                    g2: compose(inst, &h, &d.g2),
                };
                top.record(
                    notion.is_amalgam(inst, &moved),
                    || json!({ "amalgam": to_value(d), "iso": to_value(&h) }),
                );
            }
            for h in inst.isomorphisms_from(&d.span.m1, bounds.isos, seed.wrapping_add(1)) {
                match side1_transport(inst, d, &h) {
                    Ok(moved) => side1.record(
                        notion.is_amalgam(inst, &moved),
                        || json!({ "amalgam": to_value(d), "iso": to_value(&h) }),
                    ),
                    Err(_) => side1.unknown(),
                }
            }
            for h in inst.isomorphisms_from(&d.span.m2, bounds.isos, seed.wrapping_add(2)) {
                match side2_transport(inst, d, &h) {
                    Ok(moved) => side2.record(
                        notion.is_amalgam(inst, &moved),
                        || json!({ "amalgam": to_value(d), "iso": to_value(&h) }),
                    ),
                    Err(_) => side2.unknown(),
                }
            }
            match symmetric(inst, d) {
                Ok(sym) => symmetry.record(notion.is_amalgam(inst, &sym), || to_value(d)),
                Err(_) => symmetry.unknown(),
            }
        }
    }
    Ok(vec![
        completeness.finish(),
        trivial.finish(),
        top.finish(),
        side1.finish(),
        side2.finish(),
        symmetry.finish(),
    ])
}

/// Verdicts of the four regularity sub-claims on one commutative square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularityProfile {
    pub amalgam: bool,
    /// Condition (2).
    pub factors: bool,
    /// Existence half of condition (3).
    pub every_middle: bool,
    /// "Moreover" half of condition (3).
    pub moreover: bool,
}

fn lower_square<I: ClassInstance>(
    inst: &I,
    d: &Diagram<I>,
    mid: &I::Model,
    np: &I::Model,
) -> Diagram<I> {
    let s = &d.span;
    AmalgamDiagram {
        span: Span {
            m0: s.m0.clone(),
            m1: mid.clone(),
            m2: s.m2.clone(),
            f: s.f.clone(),
        },
        n: np.clone(),
        g1: with_cod(&restrict(inst, &d.g1, mid), np),
        g2: with_cod(&d.g2, np),
    }
}

fn upper_square<I: ClassInstance>(
    inst: &I,
    d: &Diagram<I>,
    mid: &I::Model,
    np: &I::Model,
) -> Diagram<I> {
    let s = &d.span;
    AmalgamDiagram {
        span: Span {
            m0: mid.clone(),
            m1: s.m1.clone(),
            m2: np.clone(),
            f: with_cod(&restrict(inst, &d.g1, mid), np),
        },
        n: d.n.clone(),
        g1: d.g1.clone(),
        g2: inclusion(inst, np, &d.n),
    }
}

/// Evaluate the three regularity conditions on a commutative square.
pub fn regularity_profile<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    d: &Diagram<I>,
) -> Result<RegularityProfile> {
    let s = &d.span;
    let g2_image = image(inst, &d.g2)?;
    let middles = inst.substructures(&s.m1, &s.m0)?;
    let tops = inst.substructures(&d.n, &g2_image)?;
    let mut factors = false;
    let mut every_middle = true;
    let mut moreover = true;
    for mid in &middles {
        let mut some_top = false;
        // the enumerated tops are a finite window; the apex generated by the
        // images is the candidate a lower amalgam must use
        let g1_mid = restrict(inst, &d.g1, mid);
        let mut gens = g1_mid.images.clone();
        gens.extend(inst.generators(&g2_image));
        let mut candidates = tops.clone();
        if let Ok(generated) = inst.span_in(&d.n, &gens) {
            if !candidates.contains(&generated) {
                candidates.push(generated);
            }
        }
        for np in &candidates {
            // g1[mid] must land inside np for the lower square to exist
            if !g1_mid.images.iter().all(|y| inst.contains(np, y)) {
                continue;
            }
            let lower = lower_square(inst, d, mid, np);
            if !notion.is_amalgam(inst, &lower) {
                continue;
            }
            some_top = true;
            let upper_ok = notion.is_amalgam(inst, &upper_square(inst, d, mid, np));
            moreover &= upper_ok;
            factors |= upper_ok;
        }
        every_middle &= some_top;
    }
    Ok(RegularityProfile {
        amalgam: notion.is_amalgam(inst, d),
        factors,
        every_middle,
        moreover,
    })
}

/// Minimality, absolute minimality, regularity, continuity on finite chains,
/// decompositions and uniqueness.
pub fn check_structural_properties<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    spans: &[SpanOf<I>],
    bounds: Bounds,
) -> Result<Vec<PropertyReport>> {
    if spans.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut minimal = Tally::new("minimal");
    let mut abs_minimal = Tally::new("absolutely-minimal");
    let mut reg13 = Tally::new("regular 1=>3");
    let mut reg32 = Tally::new("regular 3=>2");
    let mut reg21 = Tally::new("regular 2=>1");
    let mut reg_more = Tally::new("regular moreover");
    let mut continuous = Tally::new("continuous");
    let mut decomposition = Tally::new("admits-decompositions");
    let mut uniqueness = Tally::new("uniqueness");

    for s in spans {
        let Ok(amalgams) = notion.enumerate_amalgams(inst, s, bounds.amalgams) else {
            continue;
        };
        for d in &amalgams {
            let mut gens = d.g1.images.clone();
            gens.extend(d.g2.images.iter().cloned());
            let Ok(floor) = inst.span_in(&d.n, &gens) else {
                minimal.unknown();
                continue;
            };
            match inst.substructures(&d.n, &floor) {
                Ok(subs) => {
                    let bad = subs.iter().find(|np| *np != &d.n);
                    minimal.record(
                        bad.is_none(),
                        || json!({ "amalgam": to_value(d), "smaller": to_value(&bad) }),
                    );
                }
                Err(_) => minimal.unknown(),
            }
            for big in inst.superstructures(&d.n) {
                let Ok(floor_big) = inst.span_in(&big, &gens) else {
                    continue;
                };
                match inst.substructures(&big, &floor_big) {
                    Ok(subs) => {
                        let bad = subs.iter().find(|np| !inst.is_strong_sub(&d.n, np));
                        abs_minimal.record(bad.is_none(), || {
                            json!({ "amalgam": to_value(d), "outer": to_value(&big), "witness": to_value(&bad) })
                        });
                    }
                    Err(_) => abs_minimal.unknown(),
                }
            }

            // decomposition of the apex along the image of m1
            let a0 = image(inst, &restrict(inst, &d.g1, &s.m0))?;
            let a1 = image(inst, &d.g1)?;
            let ok = decompose(notion, inst, &a0, &a1, &d.n).is_ok();
            decomposition.record(
                ok,
                || json!({ "m0": to_value(&a0), "m1": to_value(&a1), "n": to_value(&d.n) }),
            );

            check_chain_pasting(inst, notion, d, &mut continuous)?;
        }
        for (i, d1) in amalgams.iter().enumerate() {
            for d2 in &amalgams[i..] {
                match uniqueness_iso(inst, d1, d2)? {
                    IsoVerdict::Found(h) => uniqueness.record(
                        is_uniqueness_iso(inst, d1, d2, &h),
                        || json!({ "d1": to_value(d1), "d2": to_value(d2) }),
                    ),
                    IsoVerdict::Absent { .. } => uniqueness
                        .record(false, || json!({ "d1": to_value(d1), "d2": to_value(d2) })),
                    IsoVerdict::Unknown { .. } => uniqueness.unknown(),
                }
            }
        }

        // regularity over commutative squares, amalgams or not
        let built = notion.construct(inst, s)?;
        for apex in inst.superstructures(&built.n) {
            for sq in commutative_squares(inst, s, &apex, bounds.amalgams) {
                let prof = regularity_profile(inst, notion, &sq)?;
                let w = || to_value(&sq);
                if prof.amalgam {
                    reg13.record(prof.every_middle, w);
                    reg_more.record(prof.moreover, w);
                }
                if prof.every_middle && prof.moreover {
                    reg32.record(prof.factors, w);
                }
                if prof.factors {
                    reg21.record(prof.amalgam, w);
                }
            }
        }
    }
    Ok(vec![
        minimal.finish(),
        abs_minimal.finish(),
        reg13.finish(),
        reg32.finish(),
        reg21.finish(),
        reg_more.finish(),
        continuous
            .finish()
            .with_note("eventually constant finite chains only"),
        decomposition.finish(),
        uniqueness.finish(),
    ])
}

/// Continuity on a two-step chain `m0 <= mid <= m1`: build the stage amalgams
/// inside the apex of `d` and check the pasted square.
fn check_chain_pasting<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    d: &Diagram<I>,
    tally: &mut Tally,
) -> Result<()> {
    let s = &d.span;
    let g2_image = image(inst, &d.g2)?;
    for mid in inst.substructures(&s.m1, &s.m0)? {
        if mid == s.m0 || mid == s.m1 {
            continue;
        }
        let tops = inst.substructures(&d.n, &g2_image)?;
        let Some(n1) = tops.iter().find(|np| {
            restrict(inst, &d.g1, &mid)
                .images
                .iter()
                .all(|y| inst.contains(np, y))
                && notion.is_amalgam(inst, &lower_square(inst, d, &mid, np))
        }) else {
            continue;
        };
        let g1_full: Vec<_> =
            d.g1.images
                .iter()
                .chain(n1.clone().pipe(|m| inst.generators(&m)).iter())
                .cloned()
                .collect();
        let floor = inst.span_in(&d.n, &g1_full)?;
        for n2 in inst.substructures(&d.n, &floor)? {
            let stage2 = AmalgamDiagram {
                span: Span {
                    m0: mid.clone(),
                    m1: s.m1.clone(),
                    m2: n1.clone(),
                    f: with_cod(&restrict(inst, &d.g1, &mid), n1),
                },
                n: n2.clone(),
                g1: with_cod(&d.g1, &n2),
                g2: inclusion(inst, n1, &n2),
            };
            if !notion.is_amalgam(inst, &stage2) {
                continue;
            }
            let union = AmalgamDiagram {
                span: s.clone(),
                n: n2.clone(),
                g1: with_cod(&d.g1, &n2),
                g2: with_cod(&d.g2, &n2),
            };
            tally.record(notion.is_amalgam(inst, &union), || json!({ "chain": [to_value(&s.m0), to_value(&mid), to_value(&s.m1)], "apex": to_value(&n2) }));
        }
    }
    Ok(())
}

trait Pipe: Sized {
    fn pipe<T>(self, f: impl FnOnce(Self) -> T) -> T {
        f(self)
    }
}
impl<T> Pipe for T {}

/// Lemmas about `⊕` over every configuration inside `(base, ambient)` pairs:
/// uniqueness of the sub-amalgam, commutativity and associativity, finite
/// intersections, size additivity and the three-piece rotation.
pub fn check_oplus_lemmas<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    frames: &[(I::Model, I::Model)],
) -> Result<Vec<PropertyReport>> {
    if frames.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut unique = Tally::new("oplus-unique");
    let mut comm = Tally::new("oplus-commutative");
    let mut assoc = Tally::new("oplus-associative");
    let mut fi = Tally::new("finite-intersections");
    let mut card = Tally::new("size-additivity");
    let mut rot = Tally::new("rotation");

    for (m0, n) in frames {
        let subs = inst.substructures(n, m0)?;
        let mut table = std::collections::BTreeMap::new();
        for a in &subs {
            for b in &subs {
                let sum = match oplus_exhaustive(inst, notion, a, b, m0, n) {
                    Ok(v) => {
                        unique.pass();
                        v
                    }
                    Err(Error::AmbiguousWitness(msg)) => {
                        unique.record(false, || json!({ "m0": to_value(m0), "m1": to_value(a), "m2": to_value(b), "detail": msg }));
                        None
                    }
                    Err(e) => return Err(e),
                };
                if let Some(c) = &sum {
                    let ok = inst.size(c) + inst.size(m0) == inst.size(a) + inst.size(b);
                    card.record(ok, || json!({ "m0": to_value(m0), "m1": to_value(a), "m2": to_value(b), "sum": to_value(c) }));
                }
                let meet = inst.intersect(a, b);
                let ok = matches!(&meet, Some(i) if inst.is_strong_sub(i, a) && inst.is_strong_sub(i, b) && inst.is_strong_sub(m0, i));
                fi.record(ok, || json!({ "m1": to_value(a), "m2": to_value(b) }));
                table.insert((a.clone(), b.clone()), sum);
            }
        }
        for ((a, b), ab) in &table {
            let ba = &table[&(b.clone(), a.clone())];
            comm.record(
                ab == ba,
                || json!({ "m0": to_value(m0), "m1": to_value(a), "m2": to_value(b) }),
            );
        }
        for ((a, b), ab) in &table {
            let Some(ab) = ab else { continue };
            for c in &subs {
                let Some(Some(ab_c)) = table.get(&(ab.clone(), c.clone())) else {
                    continue;
                };
                let Some(Some(bc)) = table.get(&(b.clone(), c.clone())) else {
                    continue;
                };
                if let Some(Some(a_bc)) = table.get(&(a.clone(), bc.clone())) {
                    assoc.record(ab_c == a_bc, || json!({ "m0": to_value(m0), "parts": [to_value(a), to_value(b), to_value(c)] }));
                }
                // rotation: mp = a ⊕ b, top = c ⊕ mp
                let Some(Some(top)) = table.get(&(c.clone(), ab.clone())) else {
                    continue;
                };
                let ok = rotate3(inst, notion, m0, a, b, c, ab, top).is_ok();
                rot.record(ok, || json!({ "m0": to_value(m0), "parts": [to_value(a), to_value(b), to_value(c)], "n": to_value(top) }));
            }
        }
    }
    Ok(vec![
        unique.finish(),
        comm.finish(),
        assoc.finish(),
        fi.finish(),
        card.finish(),
        rot.finish(),
    ])
}

/// Finite intersections plus minimality force absolute minimality; checked as
/// an implication over already computed reports.
pub fn fi_minimal_implication(reports: &[PropertyReport]) -> PropertyReport {
    let verdict = |name: &str| {
        reports
            .iter()
            .find(|r| r.property == name)
            .map(|r| r.verdict)
    };
    match (
        verdict("finite-intersections"),
        verdict("minimal"),
        verdict("absolutely-minimal"),
    ) {
        (Some(Verdict::Holds), Some(Verdict::Holds), Some(v)) => {
            if v == Verdict::Holds {
                PropertyReport::holds("fi-minimal-implies-absolutely-minimal", 1)
            } else {
                PropertyReport::fails(
                    "fi-minimal-implies-absolutely-minimal",
                    1,
                    json!({ "absolutely-minimal": v }),
                )
            }
        }
        (Some(_), Some(_), Some(_)) => {
            PropertyReport::holds("fi-minimal-implies-absolutely-minimal", 0)
                .with_note("hypotheses not met; vacuous")
        }
        _ => PropertyReport::not_checkable(
            "fi-minimal-implies-absolutely-minimal",
            "missing input reports",
        ),
    }
}

/// Checks used by tests and the harness to validate an arbitrary diagram.
pub fn diagram_is_valid<I: ClassInstance>(inst: &I, d: &Diagram<I>) -> bool {
    is_commutative_square(inst, d)
}
