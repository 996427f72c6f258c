use amalgam_core::catlab::monotone_configs;
use amalgam_core::class::{by_inclusion, ClassInstance};
use amalgam_core::error::Error;
use amalgam_core::instances::group::free::{FreeAmalgam, FreeFactor, FreeFactors};
use amalgam_core::instances::vec::{
    all_spans, canonical_diagrams, coordinate_support, is_direct_amalgam, unit, DirectSum, VecSpace,
};
use amalgam_core::notion::{trivial_amalgam, Bounds, Notion};
use amalgam_core::pregeom::{
    check_pregeometry_axioms, closure_support, verify_derived_properties, ClosureOperator,
    DerivedNotion, DerivedPool,
};
use amalgam_core::report::Verdict;
use amalgam_core::seqamal::build_seq_amalgam;

#[test]
fn span_closure_is_a_pregeometry() {
    let v = VecSpace::default();
    for n in 1..=4 {
        let cl = ClosureOperator::of_model(&v, &v.whole(n), 16).unwrap();
        assert_eq!(cl.carrier().len(), 1 << n);
        let r = check_pregeometry_axioms(&cl);
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
    }
}

#[test]
fn degenerate_closures_are_pregeometries() {
    let carrier: Vec<u8> = (0..5).collect();
    let identity = ClosureOperator::from_fn(carrier.clone(), 8, |a| Ok(a.to_vec())).unwrap();
    assert!(check_pregeometry_axioms(&identity).is_holds());
    let everything = carrier.clone();
    let total = ClosureOperator::from_fn(carrier, 8, |a| {
        Ok(if a.is_empty() {
            vec![]
        } else {
            everything.clone()
        })
    })
    .unwrap();
    assert!(check_pregeometry_axioms(&total).is_holds());
}

#[test]
fn broken_exchange_is_reported() {
    // 0 drags 2 along but not conversely
    let cl = ClosureOperator::from_fn(vec![0u8, 1, 2], 8, |a| {
        let mut out = a.to_vec();
        if a.contains(&0) && !a.contains(&2) {
            out.push(2);
        }
        out.sort();
        Ok(out)
    })
    .unwrap();
    let r = check_pregeometry_axioms(&cl);
    assert_eq!(r.verdict, Verdict::Fails);
    assert_eq!(r.counterexample.unwrap()["axiom"], "exchange");
}

#[test]
fn carrier_guards() {
    assert_eq!(
        ClosureOperator::<u8>::from_fn(vec![], 8, |a| Ok(a.to_vec())).unwrap_err(),
        Error::EmptyCarrier
    );
    assert!(matches!(
        ClosureOperator::from_fn((0..9u8).collect(), 8, |a| Ok(a.to_vec())),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn derived_matches_direct_sum_up_to_dim_3() {
    let v = VecSpace::default();
    let derived = DerivedNotion::new(DirectSum);
    let diagrams = canonical_diagrams(&v, 3);
    assert!(diagrams.len() > 500);
    let mut accepted = 0;
    for d in &diagrams {
        let native = is_direct_amalgam(&v, d);
        assert_eq!(derived.is_amalgam(&v, d), native, "{d:?}");
        accepted += native as usize;
    }
    assert!(accepted > 0);
}

#[test]
fn greedy_and_exhaustive_witness_search_agree() {
    let v = VecSpace::default();
    let greedy = DerivedNotion::new(DirectSum);
    let exhaustive = DerivedNotion::exhaustive(DirectSum, 16);
    for d in canonical_diagrams(&v, 3).iter().step_by(5) {
        let g = greedy.witness(&v, d).unwrap();
        let e = exhaustive.witness(&v, d).unwrap();
        assert_eq!(g.is_some(), e.is_some(), "{d:?}");
        if let Some(w) = e {
            let (a1, a2, a0) = &w.closures;
            assert_eq!(&v.intersect(a1, a2).unwrap(), a0);
        }
    }
}

#[test]
fn trivial_spans_are_accepted() {
    let v = VecSpace::default();
    let derived = DerivedNotion::new(DirectSum);
    let m0 = v.span(3, &[unit(3, 0)]);
    let m1 = v.span(3, &[unit(3, 0), unit(3, 2)]);
    assert!(derived.is_amalgam(&v, &trivial_amalgam(&v, &m0, &m1)));
}

#[test]
fn derived_properties_hold_on_gf2() {
    let v = VecSpace::default();
    let derived = DerivedNotion::new(DirectSum);
    let whole = v.whole(3);
    let pool_models = v.substructures(&whole, &v.zero(3)).unwrap();
    let lines = vec![v.whole(1); 3];
    let cert = build_seq_amalgam(&v, &DirectSum, &v.zero(1), &lines).unwrap();
    let pool = DerivedPool {
        spans: all_spans(&v, 2, 3).unwrap(),
        monotone: monotone_configs(&v, &derived, &pool_models, &whole, 400),
        certs: vec![cert.clone()],
        elements: 64,
    };
    let reports = verify_derived_properties(&v, &derived, &pool, Bounds::default()).unwrap();
    for r in &reports {
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
    }
    for a in v.elements(&cert.total, 64) {
        assert_eq!(
            closure_support(&v, &cert, &a).unwrap(),
            coordinate_support(&v, &cert, &a).unwrap().subsequence
        );
    }
}

#[test]
fn word_support_matches_free_amalgams_on_standard_factors() {
    let f = FreeFactors::default();
    let derived = DerivedNotion::new(FreeAmalgam);
    let rank = 3;
    let subsets: Vec<Vec<usize>> = (0..1u32 << rank)
        .map(|s| (0..rank).filter(|i| s >> i & 1 == 1).collect())
        .collect();
    let within = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
    let mut checked = 0;
    for s0 in &subsets {
        for s1 in subsets.iter().filter(|s| within(s0, s)) {
            for s2 in subsets.iter().filter(|s| within(s0, s)) {
                for sn in subsets.iter().filter(|s| within(s1, s) && within(s2, s)) {
                    let std = |s: &[usize]| FreeFactor::standard(rank, s);
                    let d = by_inclusion(&f, &std(s0), &std(s1), &std(s2), &std(sn));
                    assert_eq!(
                        derived.is_amalgam(&f, &d),
                        FreeAmalgam.is_amalgam(&f, &d),
                        "{s0:?} {s1:?} {s2:?} {sn:?}"
                    );
                    checked += 1;
                }
            }
        }
        // constructed amalgams land on fresh letters
        let span = amalgam_core::class::span_by_inclusion(
            &f,
            &FreeFactor::standard(rank, s0),
            &FreeFactor::whole(rank),
            &FreeFactor::whole(rank),
        );
        let d = FreeAmalgam.construct(&f, &span).unwrap();
        assert!(derived.is_amalgam(&f, &d));
    }
    assert!(checked > 100);
}
