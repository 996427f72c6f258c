//! Randomized invariants over seeded instances.

use amalgam_core::class::{is_commutative_square, ClassInstance};
use amalgam_core::instances::group::free::{
    random_automorphism, random_factor, FreeFactor, FreeFactors,
};
use amalgam_core::instances::group::word::{w, Word};
use amalgam_core::instances::vec::{
    intersect, is_direct_amalgam, random_span, random_subspace, sum, DirectSum, VecSpace,
};
use amalgam_core::notion::Notion;
use amalgam_core::pregeom::DerivedNotion;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subspace_dimensions_are_modular(seed in any::<u64>(), n in 1usize..=5, p in prop::sample::select(vec![2u8, 3])) {
        let v = VecSpace::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_subspace(&v, &mut rng, n, seed as usize % (n + 1));
        let b = random_subspace(&v, &mut rng, n, (seed >> 8) as usize % (n + 1));
        let (s, i) = (sum(&a, &b).unwrap(), intersect(&a, &b).unwrap());
        prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
        prop_assert!(i.is_sub(&a) && i.is_sub(&b) && a.is_sub(&s) && b.is_sub(&s));
        prop_assert_eq!(intersect(&b, &a).unwrap(), i);
    }

    #[test]
    fn constructed_direct_sums_are_accepted_by_both_notions(seed in any::<u64>(), n in 1usize..=4) {
        let v = VecSpace::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let span = random_span(&v, &mut rng, n);
        let d = DirectSum.construct(&v, &span).unwrap();
        prop_assert!(is_commutative_square(&v, &d));
        prop_assert!(is_direct_amalgam(&v, &d));
        prop_assert!(DerivedNotion::new(DirectSum).is_amalgam(&v, &d));
        prop_assert_eq!(d.n.dim() + span.m0.dim(), span.m1.dim() + span.m2.dim());
    }

    #[test]
    fn words_form_a_group(x in "[abcABC]{0,8}", y in "[abcABC]{0,8}", z in "[abcABC]{0,8}") {
        let (x, y, z) = (w(&x), w(&y), w(&z));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&x.inverse()), Word::identity());
        prop_assert_eq!(x.mul(&y).inverse(), y.inverse().mul(&x.inverse()));
    }

    #[test]
    fn automorphisms_carry_the_whole_group_onto_itself(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_automorphism(rank, &mut rng, 4);
        let image = FreeFactor::new(rank, &phi);
        prop_assert_eq!(image.rank(), rank);
        for i in 0..rank {
            prop_assert!(image.graph().contains(&Word::gen(i)));
        }
    }

    #[test]
    fn random_factors_are_closed_under_products(seed in any::<u64>(), rank in 2usize..=4) {
        let f = FreeFactors::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = 1 + seed as usize % (rank - 1);
        let m = random_factor(rank, k, &mut rng, 3);
        prop_assert_eq!(m.rank(), k);
        prop_assert!(f.is_strong_sub(&m, &FreeFactor::whole(rank)));
        let gens = f.generators(&m);
        for a in &gens {
            for b in &gens {
                prop_assert!(f.contains(&m, &a.mul(&b.inverse())));
            }
        }
    }
}
