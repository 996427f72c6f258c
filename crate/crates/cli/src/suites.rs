//! Suite bodies per instance. Each suite returns its property reports in a
//! fixed order; pools depend only on the config and its seed.

use std::collections::BTreeSet;

use amalgam_core::catlab::{
    check_3monotonic, check_backsim_equivalence, check_power_properties, check_simuni,
    iso_via_decomposition, monotone_configs, DecompositionIso,
};
use amalgam_core::class::{span_by_inclusion, ClassInstance, SpanOf};
use amalgam_core::indep::{
    check_indep_axioms, check_tameness, independence_table, type_classes, IndepBounds,
};
use amalgam_core::instances::group::fold::{rewrite, FoldedGraph};
use amalgam_core::instances::group::free::{
    random_automorphism, random_factor, FreeAmalgam, FreeFactor, FreeFactors,
};
use amalgam_core::instances::group::smallcanc::{
    dehn_trivial, SCPresentation, SmallCancellation, TemplateQuotients,
};
use amalgam_core::instances::group::sqfree::{PrimeSet, PrimeUnion, SquarefreeAbelian};
use amalgam_core::instances::group::whitehead::{is_free_factor, WhiteheadBounds};
use amalgam_core::instances::group::word::{Letter, Word};
use amalgam_core::instances::vec::{
    self as vecs, all_spans, canonical_diagrams, coordinate_support, enumerate_subspaces,
    is_direct_amalgam, random_span, unit, DirectSum, Subspace, VecSpace,
};
use amalgam_core::notion::{
    check_oplus_lemmas, check_structural_properties, verify_notion_axioms, Bounds, Notion,
};
use amalgam_core::pregeom::{
    check_pregeometry_axioms, verify_derived_properties, ClosureOperator, DerivedNotion,
    DerivedPool,
};
use amalgam_core::report::{to_value, PropertyReport, Tally};
use amalgam_core::seqamal::{build_seq_amalgam, check_sequential, coordinate_blocks, mu_witness};
use amalgam_core::uniqueness::{
    find_nonuniqueness_witness, many_extensions, NonUniquenessWitness, Separation, Witness,
};
use amalgam_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{InstanceKind, SuiteConfig};

/// Amalgams enumerated per span by the nonuniqueness search.
pub const WITNESS_BOUND: usize = 8;
const MONOTONE_CAP: usize = 2000;
/// Carrier size for explicit closure tables.
const CLOSURE_CARRIER: usize = 16;

/// A per-suite generator, so adding a suite never shifts another's pool.
fn rng_for(cfg: &SuiteConfig, suite: &str) -> ChaCha8Rng {
    let salt = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt)
}

fn core_bounds(cfg: &SuiteConfig) -> Bounds {
    Bounds {
        seed: cfg.seed,
        ..Bounds::default()
    }
}

pub fn run_suite(cfg: &SuiteConfig, suite: &str) -> Result<Vec<PropertyReport>> {
    match cfg.instance {
        InstanceKind::VecGf2 | InstanceKind::VecGf3 => {
            let v = VecSpace::new(if cfg.instance == InstanceKind::VecGf2 {
                2
            } else {
                3
            })?;
            if cfg.notion == "derived" {
                vec_suite(&v, &DerivedNotion::new(DirectSum), cfg, suite)
            } else {
                vec_suite(&v, &DirectSum, cfg, suite)
            }
        }
        InstanceKind::FreeFactor => {
            if cfg.notion == "derived" {
                free_suite(&DerivedNotion::new(FreeAmalgam), cfg, suite)
            } else {
                free_suite(&FreeAmalgam, cfg, suite)
            }
        }
        InstanceKind::Squarefree => squarefree_suite(cfg, suite),
        InstanceKind::Smallcanc => smallcanc_suite(cfg, suite),
    }
}

fn all_hold_note(reports: Vec<PropertyReport>, note: &str) -> Vec<PropertyReport> {
    reports
        .into_iter()
        .map(|r| {
            if r.note.is_none() {
                r.with_note(note)
            } else {
                r
            }
        })
        .collect()
}

// ---- vector spaces ----

/// Every span inside `GF(p)^dim`, then `samples` random spans in `GF(p)^sample_dim`.
pub fn vec_span_pool(
    v: &VecSpace,
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<SpanOf<VecSpace>>, String)> {
    let dim = cfg.bounds.dim.expect("validated");
    let mut spans = all_spans(v, dim, 2 * dim)?;
    let exhaustive = spans.len();
    let mut note = format!("{exhaustive} spans exhaustive in dim {dim}");
    if let (Some(samples), Some(sd)) = (cfg.bounds.samples, cfg.bounds.sample_dim) {
        spans.extend((0..samples).map(|_| random_span(v, rng, sd)));
        note.push_str(&format!(", {samples} sampled in dim {sd}"));
    }
    Ok((spans, note))
}

fn coord(v: &VecSpace, n: usize, coords: &[usize]) -> Subspace {
    v.span(n, &coords.iter().map(|&i| unit(n, i)).collect::<Vec<_>>())
}

/// Coordinate decompositions of `GF(p)^n` with at most `pieces` blocks.
pub fn vec_decompositions(
    v: &VecSpace,
    n: usize,
    pieces: usize,
) -> Vec<(Subspace, Vec<Subspace>, Subspace)> {
    coordinate_blocks(n, pieces)
        .into_iter()
        .map(|(base, blocks)| {
            let with_base =
                |b: &[usize]| coord(v, n, &base.iter().chain(b).copied().collect::<Vec<_>>());
            let all: Vec<usize> = blocks.iter().flatten().copied().collect();
            (
                coord(v, n, &base),
                blocks.iter().map(|b| with_base(b)).collect(),
                with_base(&all),
            )
        })
        .collect()
}

/// `span(A ∪ M) ∩ span(B ∪ M) = M` with additive dimensions.
pub fn linearly_disjoint(a: &Subspace, m: &Subspace, b: &Subspace) -> Result<bool> {
    let am = vecs::sum(a, m)?;
    let bm = vecs::sum(b, m)?;
    let meet = vecs::intersect(&am, &bm)?;
    let total = vecs::sum(&am, &bm)?;
    Ok(meet == *m && total.dim() + m.dim() == am.dim() + bm.dim())
}

fn vec_suite<N: Notion<VecSpace>>(
    v: &VecSpace,
    notion: &N,
    cfg: &SuiteConfig,
    suite: &str,
) -> Result<Vec<PropertyReport>> {
    let mut rng = rng_for(cfg, suite);
    let dim = cfg.bounds.dim.unwrap_or(1);
    let frames: Vec<(Subspace, Subspace)> = (1..=dim).map(|n| (v.zero(n), v.whole(n))).collect();
    match suite {
        "notion-axioms" => {
            let (spans, note) = vec_span_pool(v, cfg, &mut rng)?;
            Ok(all_hold_note(
                verify_notion_axioms(v, notion, &spans, core_bounds(cfg))?,
                &note,
            ))
        }
        "structural" => {
            let (spans, note) = vec_span_pool(v, cfg, &mut rng)?;
            Ok(all_hold_note(
                check_structural_properties(v, notion, &spans, core_bounds(cfg))?,
                &note,
            ))
        }
        "oplus-lemmas" => check_oplus_lemmas(v, notion, &frames),
        "sequential" => {
            let (n, pieces) = (
                cfg.bounds.seq_dim.expect("validated"),
                cfg.bounds.pieces.expect("validated"),
            );
            let decomps = vec_decompositions(v, n, pieces);
            let note = format!(
                "{} coordinate decompositions of dim {n} into at most {pieces} pieces",
                decomps.len()
            );
            Ok(all_hold_note(check_sequential(v, notion, &decomps)?, &note))
        }
        "independence" => {
            let mut oracle = Tally::new("linear-disjointness-oracle");
            for (bottom, n) in &frames {
                for (a, m, b, got) in independence_table(v, notion, bottom, n)? {
                    let expected = linearly_disjoint(&a, &m, &b)?;
                    oracle.record(got == expected, || json!({ "a": to_value(&a), "m": to_value(&m), "b": to_value(&b), "nonforks": got }));
                }
            }
            let bounds = IndepBounds {
                seed: cfg.seed,
                elements: 1 << 12,
                ..IndepBounds::default()
            };
            let mut out = vec![oracle.finish()];
            // a hyperplane frame has proper superstructures, which top monotonicity needs
            let mut axiom_frames = frames.clone();
            if dim >= 2 {
                axiom_frames.push((
                    v.zero(dim),
                    coord(v, dim, &(0..dim - 1).collect::<Vec<_>>()),
                ));
            }
            out.extend(check_indep_axioms(v, notion, &axiom_frames, bounds)?);
            Ok(out)
        }
        "types" => {
            let mut count = Tally::new("type-count");
            let p = v.p as usize;
            let mut seen = Vec::new();
            for n in 1..=dim {
                let line = v.span(n, &[unit(n, 0)]);
                let classes = type_classes(v, &line, &v.whole(n), usize::MAX)?;
                let algebraic = classes
                    .iter()
                    .filter(|c| c.iter().all(|x| line.contains_vec(x)))
                    .count();
                let expected_total = if n == 1 { p } else { p + 1 };
                count.record(
                    classes.len() == expected_total && algebraic == p,
                    || json!({ "ambient": n, "classes": classes.len(), "algebraic": algebraic }),
                );
                seen.push(format!(
                    "dim {n}: {} types, {algebraic} algebraic",
                    classes.len()
                ));
            }
            let tame = check_tameness(v, &frames, 1, usize::MAX)?;
            Ok(vec![
                count.finish().with_note(seen.join("; ")),
                tame.with_note("restrictions of dimension 1"),
            ])
        }
        "nonuniqueness" => {
            let spans = all_spans(v, dim, 2 * dim)?;
            let mut t = Tally::new("no-nonuniqueness-witness");
            for s in &spans {
                let w = find_nonuniqueness_witness(v, notion, s, WITNESS_BOUND)?;
                t.record(w.is_none(), || {
                    nonuniqueness_value(cfg, w.as_ref().expect("witness"))
                });
            }
            Ok(vec![t.finish()])
        }
        "catlab" => {
            let theta = cfg.bounds.theta.expect("validated");
            let small = dim.min(3);
            let mut out = check_power_properties(v, notion, &v.zero(1), &v.whole(1), dim)?;
            let mut pairs = Vec::new();
            for k in 0..=small {
                for j in 0..=k {
                    pairs.push((
                        coord(v, small, &(0..k).collect::<Vec<_>>()),
                        coord(v, small, &(0..j).collect::<Vec<_>>()),
                    ));
                }
            }
            out.extend(check_backsim_equivalence(v, notion, &pairs, theta)?);
            let subs = enumerate_subspaces(&v.whole(small), &v.zero(small))?;
            let lines: Vec<Subspace> = subs.iter().filter(|s| s.dim() == 1).cloned().collect();
            out.push(check_simuni(v, notion, &lines, theta)?);
            let whole = v.whole(dim);
            let pool = enumerate_subspaces(&whole, &v.zero(dim))?;
            let configs = monotone_configs(v, notion, &pool, &whole, MONOTONE_CAP);
            out.push(check_3monotonic(v, notion, &configs)?);
            out.push(vec_iso_decomposition(
                v,
                notion,
                cfg.instance,
                &pool,
                &v.zero(dim),
            )?);
            Ok(out)
        }
        "pregeometry" => {
            let mut out = Vec::new();
            let mut pre = Tally::new("pregeometry");
            for n in 1..=dim {
                if (v.p as usize).pow(n as u32) > CLOSURE_CARRIER {
                    break;
                }
                let r = check_pregeometry_axioms(&ClosureOperator::of_model(
                    v,
                    &v.whole(n),
                    CLOSURE_CARRIER,
                )?);
                pre.record(
                    r.is_holds(),
                    || json!({ "ambient": n, "report": to_value(&r) }),
                );
            }
            out.push(pre.finish());
            let derived = DerivedNotion::new(DirectSum);
            let mut equiv = Tally::new("derived-equivalence");
            for d in canonical_diagrams(v, dim) {
                let (a, b) = (derived.is_amalgam(v, &d), is_direct_amalgam(v, &d));
                equiv.record(a == b, || json!({ "kind": "diagram-membership", "diagram": to_value(&d), "derived": a, "direct": b }));
            }
            out.push(equiv.finish());
            let small = dim.min(3);
            let whole = v.whole(small);
            let models = enumerate_subspaces(&whole, &v.zero(small))?;
            let certs: Vec<_> = (1..=dim)
                .map(|k| build_seq_amalgam(v, &DirectSum, &v.zero(1), &vec![v.whole(1); k]))
                .collect::<Result<_>>()?;
            let pool = DerivedPool {
                spans: all_spans(v, small.min(2), 2 * small.min(2))?,
                monotone: monotone_configs(v, &derived, &models, &whole, MONOTONE_CAP),
                certs: certs.clone(),
                elements: 1 << 10,
            };
            out.extend(verify_derived_properties(
                v,
                &derived,
                &pool,
                core_bounds(cfg),
            )?);
            let mut support = Tally::new("mu-coordinate-support");
            for cert in &certs {
                for a in v.elements(&cert.total, 1 << 10) {
                    let mu = mu_witness(v, &derived, cert, &a)?;
                    let coords = coordinate_support(v, cert, &a)?;
                    support.record(mu.subsequence == coords.subsequence, || {
                        json!({ "element": to_value(&a), "mu": mu.subsequence, "coordinates": coords.subsequence })
                    });
                }
            }
            out.push(support.finish());
            Ok(out)
        }
        other => unreachable!("suite {other} passed validation"),
    }
}

/// Every ordered pair of equal-dimension models over a common base.
fn vec_iso_decomposition<N: Notion<VecSpace>>(
    v: &VecSpace,
    notion: &N,
    kind: InstanceKind,
    pool: &[Subspace],
    base: &Subspace,
) -> Result<PropertyReport> {
    let mut t = Tally::new("iso-decomposition");
    for m in pool {
        for n in pool.iter().filter(|n| n.dim() == m.dim()) {
            let out = iso_via_decomposition(v, notion, (m, base), (n, base), 1)?;
            let ok = out.images().is_some_and(|h| v.is_valid_map(m, n, h));
            t.record(ok, || obstruction_value(kind, m, n, base, &out));
        }
    }
    Ok(t.finish())
}

fn obstruction_value<M: serde::Serialize, E: serde::Serialize>(
    kind: InstanceKind,
    m: &M,
    n: &M,
    base: &M,
    out: &DecompositionIso<E>,
) -> serde_json::Value {
    json!({
        "kind": "decomposition-obstruction",
        "instance": kind.name(),
        "left": to_value(m),
        "right": to_value(n),
        "base": to_value(base),
        "piece_bound": 1,
        "outcome": to_value(out),
    })
}

fn nonuniqueness_value<M: serde::Serialize, E: serde::Serialize>(
    cfg: &SuiteConfig,
    w: &NonUniquenessWitness<M, E>,
) -> serde_json::Value {
    json!({
        "kind": "nonuniqueness",
        "instance": cfg.instance.name(),
        "template": cfg.relator,
        "bound": WITNESS_BOUND,
        "witness": to_value(w),
    })
}

// ---- free groups ----

fn standard_factors(rank: usize) -> Vec<FreeFactor> {
    (0u32..1 << rank)
        .map(|mask| {
            FreeFactor::standard(
                rank,
                &(0..rank).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>(),
            )
        })
        .collect()
}

/// Standard factors of `F_rank` plus three seeded random factors of each proper rank.
pub fn free_pool(rank: usize, rng: &mut ChaCha8Rng) -> Vec<FreeFactor> {
    let mut pool = standard_factors(rank);
    for k in 1..rank {
        for _ in 0..3 {
            pool.push(random_factor(rank, k, rng, 1));
        }
    }
    pool.sort();
    pool.dedup();
    pool
}

pub fn free_spans(f: &FreeFactors, pool: &[FreeFactor]) -> Vec<SpanOf<FreeFactors>> {
    let mut out = Vec::new();
    for m0 in pool {
        let above: Vec<&FreeFactor> = pool.iter().filter(|m| f.is_strong_sub(m0, m)).collect();
        for m1 in &above {
            for m2 in &above {
                out.push(span_by_inclusion(f, m0, m1, m2));
            }
        }
    }
    out
}

/// Standard rank decompositions of `F_n`, and the same decompositions moved by a random automorphism.
pub fn free_decompositions(
    n: usize,
    pieces: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(FreeFactor, Vec<FreeFactor>, FreeFactor)> {
    let phi = random_automorphism(n, rng, 3);
    let mut out = Vec::new();
    for (base, blocks) in coordinate_blocks(n, pieces) {
        let with_base = |b: &[usize]| {
            FreeFactor::standard(n, &base.iter().chain(b).copied().collect::<Vec<_>>())
        };
        let all: Vec<usize> = blocks.iter().flatten().copied().collect();
        let d = (
            FreeFactor::standard(n, &base),
            blocks.iter().map(|b| with_base(b)).collect::<Vec<_>>(),
            with_base(&all),
        );
        let twisted = (
            d.0.twisted(&phi),
            d.1.iter().map(|p| p.twisted(&phi)).collect(),
            d.2.twisted(&phi),
        );
        out.push(d);
        out.push(twisted);
    }
    out
}

/// Reduced words of length at most `len` over `rank` generators.
pub fn reduced_words(rank: usize, len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Word::identity()];
    let mut layer = out.clone();
    for _ in 0..len {
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
    out
}

/// Every reduced product of at most `factors` generators or inverses.
pub fn bounded_products(gens: &[Word], factors: usize) -> BTreeSet<Word> {
    let alphabet: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen = BTreeSet::from([Word::identity()]);
    let mut layer = vec![Word::identity()];
    for _ in 0..factors {
        let mut next = Vec::new();
        for x in &layer {
            for g in &alphabet {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    seen
}

/// Folding membership against bounded products: every product found by brute
/// force folds, and every folded membership carries a rewriting certificate.
pub fn folding_membership(samples: usize, rng: &mut ChaCha8Rng) -> PropertyReport {
    let words = reduced_words(2, 6);
    let short: Vec<Word> = reduced_words(2, 3)
        .into_iter()
        .filter(|x| !x.is_empty())
        .collect();
    let mut t = Tally::new("folding-membership");
    for _ in 0..samples {
        let gens: Vec<Word> = (0..rng.gen_range(1..=2))
            .map(|_| short[rng.gen_range(0..short.len())].clone())
            .collect();
        let g = FoldedGraph::canonical(&gens);
        let brute = bounded_products(&gens, 8);
        for x in &words {
            let cert = rewrite(&gens, x);
            let ok = g.contains(x) == cert.is_some()
                && cert.as_ref().is_none_or(|c| c.substitute(&gens) == *x)
                && (!brute.contains(x) || g.contains(x));
            t.record(
                ok,
                || json!({ "gens": to_value(&gens), "word": x.to_string() }),
            );
        }
    }
    t.finish().with_note("rank 2, words of length at most 6")
}

fn free_suite<N: Notion<FreeFactors>>(
    notion: &N,
    cfg: &SuiteConfig,
    suite: &str,
) -> Result<Vec<PropertyReport>> {
    let f = FreeFactors::default();
    let mut rng = rng_for(cfg, suite);
    let rank = cfg.bounds.rank.unwrap_or(1);
    match suite {
        "notion-axioms" | "structural" => {
            let pool = free_pool(rank, &mut rng);
            let spans = free_spans(&f, &pool);
            let note = format!(
                "{} spans over {} factors of rank-{rank} free group",
                spans.len(),
                pool.len()
            );
            let bounds = Bounds {
                amalgams: 4,
                isos: 3,
                seed: cfg.seed,
            };
            let reports = if suite == "notion-axioms" {
                verify_notion_axioms(&f, notion, &spans, bounds)?
            } else {
                check_structural_properties(&f, notion, &spans, bounds)?
            };
            Ok(all_hold_note(reports, &note))
        }
        "oplus-lemmas" => {
            let frames: Vec<_> = (1..=rank.min(2))
                .map(|r| (FreeFactor::standard(r, &[]), FreeFactor::whole(r)))
                .collect();
            check_oplus_lemmas(&f, notion, &frames)
        }
        "sequential" => {
            let (n, pieces) = (
                cfg.bounds.seq_dim.expect("validated"),
                cfg.bounds.pieces.expect("validated"),
            );
            let decomps = free_decompositions(n, pieces, &mut rng);
            let note = format!("{} rank decompositions of F_{n} into at most {pieces} pieces, standard and twisted", decomps.len());
            Ok(all_hold_note(
                check_sequential(&f, notion, &decomps)?,
                &note,
            ))
        }
        "kurosh" => {
            let samples = cfg.bounds.samples.expect("validated");
            let mut t = Tally::new("kurosh-intersection");
            for i in 0..samples {
                let n = if rank <= 2 { rank } else { 2 + i % (rank - 1) };
                let h = random_factor(n, rng.gen_range(1..=n), &mut rng, 2);
                let g = random_factor(n, rng.gen_range(1..=n), &mut rng, 2);
                let ok = match f.intersect(&h, &g) {
                    Some(meet) => {
                        is_free_factor(&meet.basis, n, WhiteheadBounds::default()).is_yes()
                            && f.is_strong_sub(&meet, &h)
                            && f.is_strong_sub(&meet, &g)
                    }
                    None => false,
                };
                t.record(ok, || json!({ "h": to_value(&h), "g": to_value(&g) }));
            }
            let mut examples = Tally::new("whitehead-examples");
            let a2: Word = "aa".parse()?;
            let abb: Word = "abb".parse()?;
            let no = matches!(
                is_free_factor(&[a2], 2, WhiteheadBounds::default()),
                amalgam_core::instances::group::whitehead::FactorVerdict::No { .. }
            );
            examples.record(no, || json!({ "words": ["aa"], "expected": "no" }));
            let yes = is_free_factor(std::slice::from_ref(&abb), 2, WhiteheadBounds::default());
            let certified = yes.certificate().is_some_and(|c| c.verify(&[abb]));
            examples.record(certified, || json!({ "words": ["abb"], "expected": "yes" }));
            Ok(vec![
                folding_membership(samples.min(50), &mut rng),
                t.finish(),
                examples.finish(),
            ])
        }
        "catlab" => {
            let theta = cfg.bounds.theta.expect("validated");
            let mut out = check_power_properties(
                &f,
                notion,
                &FreeFactor::standard(1, &[]),
                &FreeFactor::whole(1),
                rank,
            )?;
            let mut pairs = Vec::new();
            for k in 0..=rank.min(3) {
                for j in 0..=k {
                    pairs.push((
                        FreeFactor::standard(3, &(0..k).collect::<Vec<_>>()),
                        FreeFactor::standard(3, &(0..j).collect::<Vec<_>>()),
                    ));
                }
            }
            out.extend(check_backsim_equivalence(&f, notion, &pairs, theta)?);
            let mut tops: Vec<FreeFactor> = (0..rank)
                .map(|i| FreeFactor::standard(rank, &[i]))
                .collect();
            tops.extend((0..3).map(|_| random_factor(rank.max(2), 1, &mut rng, 3)));
            out.push(check_simuni(&f, notion, &tops, theta)?);
            let pool = standard_factors(rank.min(3));
            let configs = monotone_configs(
                &f,
                notion,
                &pool,
                &FreeFactor::whole(rank.min(3)),
                MONOTONE_CAP,
            );
            out.push(check_3monotonic(&f, notion, &configs)?);
            let mut models: Vec<FreeFactor> = (1..=rank)
                .flat_map(|r| {
                    [
                        FreeFactor::whole(r),
                        FreeFactor::standard(rank, &(0..r).collect::<Vec<_>>()),
                    ]
                })
                .collect();
            for r in 1..rank {
                models.push(random_factor(rank, r, &mut rng, 4));
            }
            let mut t = Tally::new("iso-decomposition");
            for m in &models {
                for n in models.iter().filter(|n| n.rank() == m.rank()) {
                    let minimal = |x: &FreeFactor| {
                        f.prime_minimal(x).ok_or_else(|| {
                            Error::PreconditionViolated("no prime-minimal submodel".into())
                        })
                    };
                    let (bm, bn) = (minimal(m)?, minimal(n)?);
                    let out = iso_via_decomposition(&f, notion, (m, &bm), (n, &bn), 1)?;
                    let ok = out.images().is_some_and(|h| f.is_valid_map(m, n, h));
                    t.record(ok, || {
                        obstruction_value(InstanceKind::FreeFactor, m, n, &bm, &out)
                    });
                }
            }
            out.push(t.finish().with_note(format!(
                "{} certified models of rank at most {rank}",
                models.len()
            )));
            Ok(out)
        }
        other => unreachable!("suite {other} passed validation"),
    }
}

// ---- squarefree abelian groups ----

fn prime_subsets(primes: &[u32]) -> Vec<PrimeSet> {
    (0u32..1 << primes.len())
        .map(|m| PrimeSet {
            primes: primes
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect(),
        })
        .collect()
}

/// Spans whose sides meet exactly in the base, under every base embedding.
pub fn prime_spans(s: &SquarefreeAbelian, primes: &[u32]) -> Vec<SpanOf<SquarefreeAbelian>> {
    let subsets = prime_subsets(primes);
    let mut out = Vec::new();
    for m0 in &subsets {
        for m1 in subsets.iter().filter(|m| m0.primes.is_subset(&m.primes)) {
            for m2 in subsets.iter().filter(|m| m0.primes.is_subset(&m.primes)) {
                let meet: BTreeSet<u32> = m1.primes.intersection(&m2.primes).copied().collect();
                if meet != m0.primes {
                    continue;
                }
                for images in s.embeddings(m0, m2, &[], 4) {
                    let mut sp = span_by_inclusion(s, m0, m1, m2);
                    sp.f.images = images;
                    out.push(sp);
                }
            }
        }
    }
    out
}

fn squarefree_suite(cfg: &SuiteConfig, suite: &str) -> Result<Vec<PropertyReport>> {
    let s = SquarefreeAbelian;
    let primes = cfg.bounds.primes.clone().expect("validated");
    let bounds = Bounds {
        amalgams: 6,
        isos: 3,
        seed: cfg.seed,
    };
    match suite {
        "notion-axioms" => verify_notion_axioms(&s, &PrimeUnion, &prime_spans(&s, &primes), bounds),
        "structural" => {
            check_structural_properties(&s, &PrimeUnion, &prime_spans(&s, &primes), bounds)
        }
        "catlab" => {
            let theta = cfg.bounds.theta.expect("validated");
            let none = PrimeSet::default();
            let subsets = prime_subsets(&primes);
            let pairs: Vec<_> = subsets.iter().map(|m| (m.clone(), none.clone())).collect();
            let mut out = check_backsim_equivalence(&s, &PrimeUnion, &pairs, theta)?;
            let mut t = Tally::new("iso-decomposition");
            // largest first, so the recorded obstruction is a pair of decomposable groups
            let mut by_size = subsets.clone();
            by_size.sort_by_key(|m| std::cmp::Reverse(m.primes.len()));
            for m in &by_size {
                for n in by_size.iter().filter(|n| n.primes.len() == m.primes.len()) {
                    let res = iso_via_decomposition(&s, &PrimeUnion, (m, &none), (n, &none), 1)?;
                    let ok = res.images().is_some_and(|h| s.is_valid_map(m, n, h));
                    t.record(ok, || {
                        obstruction_value(InstanceKind::Squarefree, m, n, &none, &res)
                    });
                }
            }
            out.push(t.finish());
            Ok(out)
        }
        other => unreachable!("suite {other} passed validation"),
    }
}

// ---- small cancellation ----

/// Two free letters over the trivial group: the span whose amalgams differ.
pub fn sc_span() -> SpanOf<SmallCancellation> {
    span_by_inclusion(
        &SmallCancellation,
        &SCPresentation::free([]),
        &SCPresentation::free([0]),
        &SCPresentation::free([1]),
    )
}

/// Relators the second amalgam carries beyond the first.
pub fn extra_relators(w: &Witness<SmallCancellation>) -> Vec<Word> {
    w.second
        .n
        .relators
        .iter()
        .filter(|r| !w.first.n.relators.contains(r))
        .cloned()
        .collect()
}

fn smallcanc_suite(cfg: &SuiteConfig, suite: &str) -> Result<Vec<PropertyReport>> {
    let sc = SmallCancellation;
    let notion = TemplateQuotients {
        template: cfg.template(),
    };
    let witness = find_nonuniqueness_witness(&sc, &notion, &sc_span(), WITNESS_BOUND)?;
    match suite {
        "uniqueness" => Ok(vec![match &witness {
            Some(w) => PropertyReport::fails("uniqueness", 1, nonuniqueness_value(cfg, w))
                .with_note(w.distinguisher.clone()),
            None => PropertyReport::holds("uniqueness", 1),
        }]),
        "many-extensions" => {
            let Some(w) = witness else {
                return Ok(vec![PropertyReport::not_checkable(
                    "many-extensions",
                    "no nonuniqueness witness over the two-letter span",
                )]);
            };
            let mut t = Tally::new("many-extensions");
            let mut sizes = Vec::new();
            for k in 1..=cfg.bounds.extensions.expect("validated") {
                let fam = many_extensions(&sc, &notion, &w, k)?;
                let copies: Vec<_> = (0..k)
                    .map(|i| sc.disjoint_copy(&w, i))
                    .collect::<Result<_>>()?;
                let mut ok = fam.members.len() == 1 << k && fam.is_complete();
                for m in &fam.members {
                    let mut dehn = Vec::with_capacity(k);
                    for c in &copies {
                        let mut trivial = true;
                        for r in extra_relators(c) {
                            trivial &= r.support().iter().all(|g| m.model.generators.contains(g))
                                && dehn_trivial(&r, &m.model)?;
                        }
                        dehn.push(trivial);
                    }
                    ok &= dehn == m.eta && m.pattern == m.eta;
                }
                let distinct: BTreeSet<&Vec<bool>> =
                    fam.members.iter().map(|m| &m.pattern).collect();
                ok &= distinct.len() == 1 << k;
                sizes.push(format!("k={k}: {} members", fam.members.len()));
                t.record(ok, || json!({ "k": k, "family": to_value(&fam) }));
            }
            Ok(vec![t.finish().with_note(sizes.join(", "))])
        }
        other => unreachable!("suite {other} passed validation"),
    }
}
