use amalgam_core::class::{by_inclusion, ClassInstance, Diagram, SpanOf};
use amalgam_core::instances::vec::{all_spans, random_span, unit, DirectSum, VecSpace};
use amalgam_core::notion::{
    check_oplus_lemmas, check_structural_properties, fi_minimal_implication, verify_notion_axioms,
    Bounds, Notion,
};
use amalgam_core::report::Verdict;
use amalgam_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_all_hold(reports: &[amalgam_core::report::PropertyReport]) {
    for r in reports {
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert!(r.cases > 0, "{} checked no cases", r.property);
    }
}

#[test]
fn axioms_hold_over_plane_spans() {
    let v = VecSpace::default();
    let spans = all_spans(&v, 2, 3).unwrap();
    assert_all_hold(&verify_notion_axioms(&v, &DirectSum, &spans, Bounds::default()).unwrap());
    assert_all_hold(
        &check_structural_properties(&v, &DirectSum, &spans, Bounds::default()).unwrap(),
    );
}

#[test]
fn axioms_hold_over_random_spans() {
    let v = VecSpace::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spans: Vec<_> = (0..20).map(|_| random_span(&v, &mut rng, 3)).collect();
    assert_all_hold(&verify_notion_axioms(&v, &DirectSum, &spans, Bounds::default()).unwrap());
}

#[test]
fn oplus_lemmas_hold_in_gf2_cube() {
    let v = VecSpace::default();
    let n = v.whole(3);
    let frames: Vec<_> = v
        .substructures(&n, &v.zero(3))
        .unwrap()
        .into_iter()
        .map(|m0| (m0, n.clone()))
        .collect();
    let mut reports = check_oplus_lemmas(&v, &DirectSum, &frames).unwrap();
    assert_all_hold(&reports);
    let spans = all_spans(&v, 2, 2).unwrap();
    reports.extend(check_structural_properties(&v, &DirectSum, &spans, Bounds::default()).unwrap());
    assert!(fi_minimal_implication(&reports).is_holds());
}

/// Accepts every commutative square: breaks minimality and uniqueness.
struct Everything;

impl Notion<VecSpace> for Everything {
    fn name(&self) -> String {
        "everything".into()
    }
    fn is_amalgam(&self, v: &VecSpace, d: &Diagram<VecSpace>) -> bool {
        amalgam_core::class::is_commutative_square(v, d)
    }
    fn construct(&self, v: &VecSpace, s: &SpanOf<VecSpace>) -> Result<Diagram<VecSpace>> {
        let mut d = DirectSum.construct(v, s)?;
        // apex one dimension too large
        let amb = d.n.n;
        d.n = v.whole(amb);
        d.g1.cod = d.n.clone();
        d.g2.cod = d.n.clone();
        Ok(d)
    }
}

#[test]
fn permissive_notion_is_caught() {
    let v = VecSpace::default();
    let spans = all_spans(&v, 1, 2).unwrap();
    let reports = check_structural_properties(&v, &Everything, &spans, Bounds::default()).unwrap();
    let verdict = |p: &str| reports.iter().find(|r| r.property == p).unwrap().verdict;
    assert_eq!(verdict("minimal"), Verdict::Fails);
    assert_eq!(verdict("uniqueness"), Verdict::Fails);
    let axioms = verify_notion_axioms(&v, &Everything, &spans, Bounds::default()).unwrap();
    assert_all_hold(&axioms);
}

#[test]
fn direct_sum_rejects_overlap() {
    let v = VecSpace::default();
    let z = v.zero(2);
    let l = v.span(2, &[unit(2, 0)]);
    let d = by_inclusion(&v, &z, &l, &l, &l);
    assert!(!DirectSum.is_amalgam(&v, &d));
    let m = v.span(2, &[unit(2, 1)]);
    assert!(DirectSum.is_amalgam(&v, &by_inclusion(&v, &z, &l, &m, &v.whole(2))));
}
