use std::collections::BTreeSet;

use amalgam_core::class::{check_order_laws, span_by_inclusion, ClassInstance, SpanOf};
use amalgam_core::class::{AmalgamDiagram, KEmbedding};
use amalgam_core::instances::group::fold::{rewrite, FoldedGraph};
use amalgam_core::instances::group::free::{random_factor, FreeAmalgam, FreeFactor, FreeFactors};
use amalgam_core::instances::group::smallcanc::{
    canonical_relator, check_c16, dehn_trivial, SCPresentation, TEMPLATE_RELATOR,
};
use amalgam_core::instances::group::sqfree::{PrimeSet, PrimeUnion, SquarefreeAbelian};
use amalgam_core::instances::group::whitehead::{is_free_factor, FactorVerdict, WhiteheadBounds};
use amalgam_core::instances::group::word::{w, Word};
use amalgam_core::notion::{
    check_oplus_lemmas, check_structural_properties, regularity_profile, verify_notion_axioms,
    Bounds,
};
use amalgam_core::report::{PropertyReport, Verdict};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_all_hold(reports: &[PropertyReport]) {
    for r in reports {
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert!(r.cases > 0, "{} checked no cases", r.property);
    }
}

/// Reduced words of length at most `len` over `rank` generators.
fn all_words(rank: usize, len: usize) -> Vec<Word> {
    let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
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
fn products(gens: &[Word], factors: usize) -> BTreeSet<Word> {
    let alphabet: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen: BTreeSet<Word> = BTreeSet::from([Word::identity()]);
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

#[test]
fn fold_examples() {
    let sq = FoldedGraph::canonical(&[w("aa")]);
    let small: BTreeSet<Word> = products(&[w("aa")], 1)
        .into_iter()
        .filter(|x| x.len() <= 2)
        .collect();
    assert_eq!(small, BTreeSet::from([Word::identity(), w("aa"), w("AA")]));
    assert!(!sq.contains(&w("a")) && sq.contains(&w("aa")));
    let rose = FoldedGraph::canonical(&[w("a"), w("b")]);
    assert!(all_words(2, 4).iter().all(|x| rose.contains(x)));
}

#[test]
fn membership_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let words = all_words(2, 6);
    let short: Vec<Word> = all_words(2, 3)
        .into_iter()
        .filter(|x| !x.is_empty())
        .collect();
    for _ in 0..25 {
        let gens: Vec<Word> = (0..2)
            .map(|_| short[rand::Rng::gen_range(&mut rng, 0..short.len())].clone())
            .collect();
        let g = FoldedGraph::canonical(&gens);
        let brute = products(&gens, 8);
        for x in &words {
            let folded = rewrite(&gens, x);
            if let Some(c) = &folded {
                assert_eq!(c.substitute(&gens), *x, "certificate for {x} in {gens:?}");
            }
            if brute.contains(x) {
                assert!(folded.is_some() && g.contains(x), "{x} missed in {gens:?}");
            }
            assert_eq!(g.contains(x), folded.is_some());
        }
    }
}

#[test]
fn intersection_examples() {
    let f = FreeFactors::default();
    let ab = FreeFactor::standard(3, &[0, 1]);
    let bc = FreeFactor::standard(3, &[1, 2]);
    assert_eq!(f.intersect(&ab, &bc), Some(FreeFactor::standard(3, &[1])));
    assert_eq!(f.intersect(&ab, &ab), Some(ab.clone()));
    let a = FreeFactor::standard(2, &[0]);
    let b = FreeFactor::standard(2, &[1]);
    assert_eq!(f.intersect(&a, &b).map(|m| m.rank()), Some(0));
}

#[test]
fn whitehead_examples() {
    let d = WhiteheadBounds::default();
    assert!(is_free_factor(&[w("a")], 2, d).is_yes());
    assert!(matches!(
        is_free_factor(&[w("aa")], 2, d),
        FactorVerdict::No { .. }
    ));
    // x0 -> x0 x1^-2 carries x0 x1^2 to x0.
    let phi = [w("aBB"), w("b")];
    assert_eq!(w("abb").substitute(&phi), w("a"));
    let cert = is_free_factor(&[w("abb")], 2, d)
        .certificate()
        .expect("primitive");
    assert!(cert.verify(&[w("abb")]));
}

#[test]
fn kurosh_on_certified_factors() {
    let f = FreeFactors::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    for n in 2..=3 {
        for _ in 0..100 {
            let h = random_factor(n, rand::Rng::gen_range(&mut rng, 1..=n), &mut rng, 2);
            let g = random_factor(n, rand::Rng::gen_range(&mut rng, 1..=n), &mut rng, 2);
            let i = f.intersect(&h, &g).expect("same ambient");
            assert!(
                is_free_factor(&i.basis, n, WhiteheadBounds::default()).is_yes(),
                "{h:?} {g:?}"
            );
            assert!(f.is_strong_sub(&i, &h) && f.is_strong_sub(&i, &g));
            cases += 1;
        }
    }
    assert!(cases >= 200);
}

#[test]
fn nested_squares_are_factors() {
    // <x0 x1^2, x1 x2^2, ...>: every finite initial segment is a free factor.
    for ambient in 2..=4 {
        let gens: Vec<Word> = (0..ambient - 1)
            .map(|i| Word::gen(i).mul(&Word::gen(i + 1).pow(2)))
            .collect();
        for k in 1..=gens.len().min(3) {
            assert!(
                is_free_factor(&gens[..k], ambient, WhiteheadBounds::default()).is_yes(),
                "{k} in F{ambient}"
            );
        }
    }
}

fn free_pool(ambient: usize, rng: &mut ChaCha8Rng) -> Vec<FreeFactor> {
    let mut pool: Vec<FreeFactor> = (0u32..1 << ambient)
        .map(|mask| {
            FreeFactor::standard(
                ambient,
                &(0..ambient)
                    .filter(|i| mask >> i & 1 == 1)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    for k in 1..ambient {
        for _ in 0..3 {
            pool.push(random_factor(ambient, k, rng, 1));
        }
    }
    pool.sort();
    pool.dedup();
    pool
}

fn free_spans(f: &FreeFactors, pool: &[FreeFactor]) -> Vec<SpanOf<FreeFactors>> {
    let mut out = Vec::new();
    for m0 in pool {
        for m1 in pool.iter().filter(|m| f.is_strong_sub(m0, m)) {
            for m2 in pool.iter().filter(|m| f.is_strong_sub(m0, m)) {
                out.push(span_by_inclusion(f, m0, m1, m2));
            }
        }
    }
    out
}

#[test]
fn free_factor_order_laws_and_intersections() {
    let f = FreeFactors::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pool = free_pool(3, &mut rng);
    check_order_laws(&f, &pool).unwrap();
    for a in &pool {
        for b in &pool {
            let i = f.intersect(a, b).unwrap();
            assert!(
                f.is_strong_sub(&i, a) && f.is_strong_sub(&i, b),
                "{a:?} {b:?}"
            );
        }
    }
}

#[test]
fn free_amalgam_axioms_and_structure() {
    let f = FreeFactors::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pool = free_pool(2, &mut rng);
    let spans = free_spans(&f, &pool);
    let bounds = Bounds {
        amalgams: 4,
        isos: 3,
        seed: 1,
    };
    assert_all_hold(&verify_notion_axioms(&f, &FreeAmalgam, &spans, bounds).unwrap());
    let structural = check_structural_properties(&f, &FreeAmalgam, &spans, bounds).unwrap();
    for r in &structural {
        assert!(
            matches!(r.verdict, Verdict::Holds | Verdict::NotCheckable),
            "{r:?}"
        );
    }
    let frames = vec![(FreeFactor::standard(2, &[]), FreeFactor::whole(2))];
    assert_all_hold(&check_oplus_lemmas(&f, &FreeAmalgam, &frames).unwrap());
}

#[test]
fn regularity_follows_an_automorphism_out_of_the_enumerated_window() {
    // g1 inverts b, so g1 carries a factor built on one basis of F3 to one the
    // enumeration over <cB> does not list
    let f = FreeFactors::default();
    let m0 = FreeFactor::new(3, &[w("cb")]);
    let whole = FreeFactor::whole(3);
    let span = span_by_inclusion(&f, &m0, &whole, &m0);
    let d = AmalgamDiagram {
        span,
        n: whole.clone(),
        g1: KEmbedding {
            dom: whole.clone(),
            cod: whole.clone(),
            images: vec![w("a"), w("B"), w("c")],
        },
        g2: KEmbedding {
            dom: m0.clone(),
            cod: whole.clone(),
            images: vec![w("cB")],
        },
    };
    let p = regularity_profile(&f, &FreeAmalgam, &d).unwrap();
    assert!(
        p.amalgam && p.every_middle && p.factors && p.moreover,
        "{p:?}"
    );
}

fn prime_spans(s: &SquarefreeAbelian) -> Vec<SpanOf<SquarefreeAbelian>> {
    let primes = [2u32, 3, 5];
    let subsets: Vec<PrimeSet> = (0u32..8)
        .map(|m| PrimeSet {
            primes: primes
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect(),
        })
        .collect();
    let mut out = Vec::new();
    for m0 in &subsets {
        for m1 in subsets.iter().filter(|m| m0.primes.is_subset(&m.primes)) {
            for m2 in subsets.iter().filter(|m| m0.primes.is_subset(&m.primes)) {
                let meet: BTreeSet<u32> = m1.primes.intersection(&m2.primes).copied().collect();
                if meet == m0.primes {
                    for images in s.embeddings(m0, m2, &[], 4) {
                        let mut sp = span_by_inclusion(s, m0, m1, m2);
                        sp.f.images = images;
                        out.push(sp);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn prime_union_axioms_and_structure() {
    let s = SquarefreeAbelian;
    let spans = prime_spans(&s);
    let bounds = Bounds {
        amalgams: 6,
        isos: 3,
        seed: 2,
    };
    assert_all_hold(&verify_notion_axioms(&s, &PrimeUnion, &spans, bounds).unwrap());
    for r in check_structural_properties(&s, &PrimeUnion, &spans, bounds).unwrap() {
        assert!(
            matches!(r.verdict, Verdict::Holds | Verdict::NotCheckable),
            "{r:?}"
        );
    }
}

/// Longest subword occurring at two distinct positions of the symmetrized
/// relator set, by scanning every cyclic subword.
fn max_piece_oracle(relators: &[Word]) -> usize {
    let mut occurrences: Vec<(Vec<i32>, (usize, bool, usize))> = Vec::new();
    for (ri, r) in relators.iter().enumerate() {
        for (inv, word) in [(false, r.clone()), (true, r.inverse())] {
            let ls = word.letters();
            let n = ls.len();
            for start in 0..n {
                for len in 1..n {
                    let sub: Vec<i32> = (0..len).map(|k| ls[(start + k) % n]).collect();
                    occurrences.push((sub, (ri, inv, start)));
                }
            }
        }
    }
    occurrences.sort();
    occurrences
        .windows(2)
        .filter(|p| p[0].0 == p[1].0 && p[0].1 != p[1].1)
        .map(|p| p[0].0.len())
        .max()
        .unwrap_or(0)
}

#[test]
fn template_relator_is_small_cancellation() {
    let r = w(TEMPLATE_RELATOR);
    let piece = max_piece_oracle(&[r.clone()]);
    assert!(6 * piece < r.len(), "piece {piece}");
    assert!(check_c16(&SCPresentation::new([0, 1], &[r.clone()])));
    let bad = [w("aabbab"), w("aabbaB")];
    assert!(6 * max_piece_oracle(&bad) >= 6);
    assert!(!check_c16(&SCPresentation::new([0, 1], &bad)));
    // two disjoint copies stay C'(1/6)
    let copies = SCPresentation::new([0, 1, 2, 3], &[r.clone(), r.substitute(&[w("c"), w("d")])]);
    assert!(check_c16(&copies));
    assert_eq!(canonical_relator(&r), canonical_relator(&r.inverse()));
}

proptest! {
    #[test]
    fn fold_is_order_independent(ws in prop::collection::vec("[abAB]{1,5}", 1..4), rot in 0usize..4) {
        let gens: Vec<Word> = ws.iter().map(|s| w(s)).collect();
        let mut perm = gens.clone();
        perm.rotate_left(rot % gens.len());
        perm.reverse();
        prop_assert_eq!(FoldedGraph::canonical(&gens), FoldedGraph::canonical(&perm));
    }

    #[test]
    fn canonical_basis_is_idempotent(ws in prop::collection::vec("[abcABC]{1,4}", 0..4)) {
        let gens: Vec<Word> = ws.iter().map(|s| w(s)).collect();
        let basis = FoldedGraph::canonical(&gens).schreier_basis();
        prop_assert_eq!(FoldedGraph::canonical(&basis).schreier_basis(), basis);
    }

    #[test]
    fn dehn_ignores_reduction_and_rotation(prefix in "[abAB]{0,6}", k in 0usize..19, power in 1i32..3) {
        let pres = SCPresentation::new([0, 1], &[w(TEMPLATE_RELATOR)]);
        let r = w(TEMPLATE_RELATOR).rotations()[k].pow(power);
        let p = w(&prefix);
        let conj = p.mul(&r).mul(&p.inverse());
        prop_assert!(dehn_trivial(&conj, &pres).unwrap());
        let x = p.mul(&w("ab"));
        let unreduced = Word::new(x.letters().iter().copied().chain([1, -1]));
        prop_assert_eq!(dehn_trivial(&x, &pres).unwrap(), dehn_trivial(&unreduced, &pres).unwrap());
        for rot in x.cyclically_reduced().rotations() {
            prop_assert_eq!(dehn_trivial(&rot, &pres).unwrap(), dehn_trivial(&x.cyclically_reduced(), &pres).unwrap());
        }
    }
}
