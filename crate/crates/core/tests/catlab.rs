use amalgam_core::catlab::{
    backsim, check_3monotonic, check_backsim_equivalence, check_distribution,
    check_power_properties, check_simuni, iso_via_decomposition, monotone_configs, power_model,
    verify_backsim, DecompositionIso, MonotoneConfig,
};
use amalgam_core::class::ClassInstance;
use amalgam_core::error::Error;
use amalgam_core::instances::group::free::{random_factor, FreeAmalgam, FreeFactor, FreeFactors};
use amalgam_core::instances::group::sqfree::{PrimeSet, PrimeUnion, SquarefreeAbelian};
use amalgam_core::instances::vec::{enumerate_subspaces, unit, DirectSum, Subspace, VecSpace};
use amalgam_core::report::{PropertyReport, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_all_hold(reports: &[PropertyReport]) {
    for r in reports {
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert!(r.cases > 0, "{} checked no cases", r.property);
    }
}

fn coord(v: &VecSpace, n: usize, set: u32) -> Subspace {
    let rows: Vec<_> = (0..n)
        .filter(|i| set >> i & 1 == 1)
        .map(|i| unit(n, i))
        .collect();
    v.span(n, &rows)
}

#[test]
fn power_of_zero_copies_is_the_base() {
    let v = VecSpace::default();
    let base = coord(&v, 3, 0b001);
    let p = power_model(&v, &DirectSum, &base, &v.whole(3), 0).unwrap();
    assert_eq!(p.total(), &base);
    assert!(p.warning().is_some());
}

#[test]
fn coordinate_power_has_expected_dimension() {
    let v = VecSpace::default();
    let line = coord(&v, 1, 0b1);
    for k in 0..=4 {
        let p = power_model(&v, &DirectSum, &v.zero(1), &line, k).unwrap();
        assert_eq!(p.total().dim(), k, "GF(2)^{k}");
    }
    // base line inside a plane: each copy adds one dimension on top of the base
    let plane = v.whole(2);
    let base = coord(&v, 2, 0b01);
    let p = power_model(&v, &DirectSum, &base, &plane, 3).unwrap();
    assert_eq!(p.total().dim(), 4);
}

#[test]
fn free_power_relabels_the_template() {
    let f = FreeFactors::default();
    let one = FreeFactor::standard(1, &[]);
    let a = FreeFactor::whole(1);
    let p = power_model(&f, &FreeAmalgam, &one, &a, 2).unwrap();
    assert_eq!(p.total().rank(), 2);
    let images: Vec<_> = p.realized.maps.iter().map(|m| m.images.clone()).collect();
    assert_ne!(
        images[0], images[1],
        "the two copies must land on different generators"
    );
}

#[test]
fn power_properties_hold() {
    let v = VecSpace::default();
    assert_all_hold(&check_power_properties(&v, &DirectSum, &v.zero(1), &v.whole(1), 4).unwrap());
    assert_all_hold(
        &check_power_properties(&v, &DirectSum, &coord(&v, 2, 0b01), &v.whole(2), 3).unwrap(),
    );
    let f = FreeFactors::default();
    assert_all_hold(
        &check_power_properties(
            &f,
            &FreeAmalgam,
            &FreeFactor::standard(1, &[]),
            &FreeFactor::whole(1),
            3,
        )
        .unwrap(),
    );
}

#[test]
fn backsim_examples() {
    let v = VecSpace::default();
    let line = coord(&v, 2, 0b01);
    let zero = v.zero(2);
    let w = backsim(&v, &DirectSum, (&line, &zero), (&line, &zero), 2)
        .unwrap()
        .expect("reflexive");
    assert!(verify_backsim(&v, &DirectSum, &w));

    // dimension-count oracle: theta-powers have dims theta*dim(top/bottom)
    let plane = v.whole(2);
    assert!(backsim(&v, &DirectSum, (&line, &zero), (&plane, &zero), 2)
        .unwrap()
        .is_none());
    for (a, b) in [(1usize, 1usize), (1, 2), (2, 2)] {
        let (ta, tb) = (coord(&v, 2, (1 << a) - 1), coord(&v, 2, (1 << b) - 1));
        let found = backsim(&v, &DirectSum, (&ta, &zero), (&tb, &zero), 2)
            .unwrap()
            .is_some();
        assert_eq!(found, a == b);
    }

    let s = SquarefreeAbelian;
    let none = PrimeSet::default();
    assert!(backsim(
        &s,
        &PrimeUnion,
        (&PrimeSet::of(&[2]), &none),
        (&PrimeSet::of(&[3]), &none),
        1
    )
    .unwrap()
    .is_none());
    assert!(backsim(
        &s,
        &PrimeUnion,
        (&PrimeSet::of(&[2]), &none),
        (&PrimeSet::of(&[2]), &none),
        1
    )
    .unwrap()
    .is_some());
    assert!(matches!(
        backsim(&v, &DirectSum, (&line, &zero), (&line, &zero), 0),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn backsim_is_an_equivalence() {
    let v = VecSpace::default();
    let whole = v.whole(3);
    let mut pairs = Vec::new();
    for top in enumerate_subspaces(&whole, &v.zero(3))
        .unwrap()
        .into_iter()
        .step_by(3)
    {
        for bottom in enumerate_subspaces(&top, &v.zero(3))
            .unwrap()
            .into_iter()
            .take(2)
        {
            pairs.push((top.clone(), bottom));
        }
    }
    assert!(pairs.len() >= 8);
    assert_all_hold(&check_backsim_equivalence(&v, &DirectSum, &pairs, 2).unwrap());
}

#[test]
fn size_one_pieces_are_all_equivalent() {
    let v = VecSpace::default();
    let lines: Vec<_> = enumerate_subspaces(&v.whole(3), &v.zero(3))
        .unwrap()
        .into_iter()
        .filter(|s| s.dim() == 1)
        .collect();
    assert_all_hold(&[check_simuni(&v, &DirectSum, &lines, 2).unwrap()]);

    let f = FreeFactors::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tops = vec![FreeFactor::standard(2, &[0]), FreeFactor::standard(3, &[2])];
    tops.push(random_factor(3, 1, &mut rng, 4));
    assert_all_hold(&[check_simuni(&f, &FreeAmalgam, &tops, 2).unwrap()]);
}

/// Coordinate configurations: sets meeting and covering as the hypotheses demand.
fn coordinate_config_count(n: usize) -> usize {
    let full = (1u32 << n) - 1;
    let mut count = 0;
    for s0 in 0..=full {
        for s1 in 0..=full {
            for s2 in 0..=full {
                for s3 in 0..=full {
                    let sup = |a: u32| a & s0 == s0;
                    if !(sup(s1) && sup(s2) && sup(s3)) {
                        continue;
                    }
                    if s1 & s2 == s0 && s3 & (s1 | s2) == s0 && s1 | s2 | s3 == full {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

#[test]
fn coordinate_cubes_are_3monotonic() {
    let v = VecSpace::default();
    for n in 1..=4 {
        let pool: Vec<_> = (0..1u32 << n).map(|s| coord(&v, n, s)).collect();
        let configs = monotone_configs(&v, &DirectSum, &pool, &v.whole(n), usize::MAX);
        assert_eq!(configs.len(), coordinate_config_count(n), "n = {n}");
        assert_all_hold(&[check_3monotonic(&v, &DirectSum, &configs).unwrap()]);
    }
}

#[test]
fn all_subspace_cubes_in_gf2_cubed_are_3monotonic() {
    let v = VecSpace::default();
    let whole = v.whole(3);
    let pool = enumerate_subspaces(&whole, &v.zero(3)).unwrap();
    let configs = monotone_configs(&v, &DirectSum, &pool, &whole, usize::MAX);
    assert!(configs.len() > 100);
    assert_all_hold(&[check_3monotonic(&v, &DirectSum, &configs).unwrap()]);
}

#[test]
fn free_factor_cubes_are_3monotonic() {
    let f = FreeFactors::default();
    let pool: Vec<_> = (0..8u32)
        .map(|s| FreeFactor::standard(3, &(0..3).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>()))
        .collect();
    let configs = monotone_configs(&f, &FreeAmalgam, &pool, &FreeFactor::whole(3), usize::MAX);
    assert!(!configs.is_empty());
    assert_all_hold(&[check_3monotonic(&f, &FreeAmalgam, &configs).unwrap()]);
}

#[test]
fn degenerate_and_empty_configs() {
    let v = VecSpace::default();
    let (a, b) = (coord(&v, 2, 0b01), coord(&v, 2, 0b10));
    let zero = v.zero(2);
    let c = MonotoneConfig {
        m0: zero.clone(),
        m1: a,
        m2: b,
        m3: zero,
        n: v.whole(2),
    };
    assert_all_hold(&[check_3monotonic(&v, &DirectSum, &[c]).unwrap()]);
    assert_eq!(
        check_3monotonic(&v, &DirectSum, &[]).unwrap_err(),
        Error::EmptyPool
    );
}

#[test]
fn distribution_examples() {
    let v = VecSpace::default();
    let zero = v.zero(4);
    let n = v.whole(4);
    let star = coord(&v, 4, 0b1000);
    let lines: Vec<_> = (0..3).map(|i| coord(&v, 4, 1 << i)).collect();
    assert!(check_distribution(&v, &DirectSum, &zero, &lines, &star, &n).unwrap());
    assert!(check_distribution(&v, &DirectSum, &zero, &[coord(&v, 4, 0b0111)], &star, &n).unwrap());

    let f = FreeFactors::default();
    let one = FreeFactor::standard(3, &[]);
    let pieces = [FreeFactor::standard(3, &[0]), FreeFactor::standard(3, &[1])];
    let star = FreeFactor::standard(3, &[2]);
    assert!(check_distribution(
        &f,
        &FreeAmalgam,
        &one,
        &pieces,
        &star,
        &FreeFactor::whole(3)
    )
    .unwrap());
}

#[test]
fn decomposition_isos_in_gf2() {
    let v = VecSpace::default();
    let subs = enumerate_subspaces(&v.whole(3), &v.zero(3)).unwrap();
    let mut found = 0;
    for m in &subs {
        for n in subs.iter().filter(|n| n.dim() == m.dim()) {
            let out =
                iso_via_decomposition(&v, &DirectSum, (m, &v.zero(3)), (n, &v.zero(3)), 1).unwrap();
            let images = out.images().expect("equal dimension");
            assert!(v.is_valid_map(m, n, images));
            found += 1;
        }
    }
    assert_eq!(found, 1 + 7 * 7 + 7 * 7 + 1);
    // models in different ambients
    let out = iso_via_decomposition(
        &v,
        &DirectSum,
        (&v.whole(2), &v.zero(2)),
        (&coord(&v, 4, 0b1010), &v.zero(4)),
        1,
    )
    .unwrap();
    assert!(out.images().is_some());
}

#[test]
fn decomposition_isos_of_free_groups() {
    let f = FreeFactors::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let models = [
        FreeFactor::whole(3),
        FreeFactor::standard(4, &[0, 2, 3]),
        random_factor(4, 3, &mut rng, 6),
    ];
    for m in &models {
        for n in &models {
            let out = iso_via_decomposition(
                &f,
                &FreeAmalgam,
                (m, &f.prime_minimal(m).unwrap()),
                (n, &f.prime_minimal(n).unwrap()),
                1,
            )
            .unwrap();
            assert!(f.is_valid_map(m, n, out.images().expect("equal rank")));
        }
    }
}

#[test]
fn squarefree_obstruction_lists_the_prime_classes() {
    let s = SquarefreeAbelian;
    let none = PrimeSet::default();
    let out = iso_via_decomposition(
        &s,
        &PrimeUnion,
        (&PrimeSet::of(&[2, 3]), &none),
        (&PrimeSet::of(&[2, 5]), &none),
        1,
    )
    .unwrap();
    let DecompositionIso::Obstructed(o) = out else {
        panic!("expected an obstruction")
    };
    let labels = |cs: &[amalgam_core::catlab::PieceClass]| {
        cs.iter().map(|c| c.label.clone()).collect::<Vec<_>>()
    };
    assert_eq!(labels(&o.left), ["primes={2}", "primes={3}"]);
    assert_eq!(labels(&o.right), ["primes={2}", "primes={5}"]);
    assert_eq!(labels(&o.left_only), ["primes={3}"]);
    assert_eq!(labels(&o.right_only), ["primes={5}"]);

    let same = iso_via_decomposition(
        &s,
        &PrimeUnion,
        (&PrimeSet::of(&[2, 3]), &none),
        (&PrimeSet::of(&[2, 3]), &none),
        1,
    )
    .unwrap();
    assert!(same.images().is_some());
}
