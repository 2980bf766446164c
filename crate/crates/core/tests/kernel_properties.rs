mod common;

use common::kernel;
use common::{division_pair, nonunit, roots, series, unit};
use proptest::prelude::*;

const N: usize = 5;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(a in series(N), b in series(N), c in series(N)) {
        kernel::ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn inversion_round_trips(u in unit(N)) {
        kernel::inversion_round_trip(&u)?;
    }

    #[test]
    fn non_units_have_no_inverse(s in nonunit(N)) {
        prop_assert!(s.invert().is_err());
    }

    #[test]
    fn mixed_partials_commute(s in series(N + 1)) {
        let xy = s.derive_x().unwrap().derive_y().unwrap();
        let yx = s.derive_y().unwrap().derive_x().unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn derivative_drops_one_order(s in series(N)) {
        prop_assert_eq!(s.derive_x().unwrap().order(), N - 1);
    }

    #[test]
    fn divmod_round_trips((a, b) in division_pair(N)) {
        kernel::divmod_round_trip(&a, &b)?;
    }

    #[test]
    fn resultant_matches_discriminant_cubic(r in roots(&[-1, 1, 2], N)) {
        kernel::resultant_discriminant(&r)?;
    }

    #[test]
    fn resultant_matches_discriminant_quartic(r in roots(&[-2, 0, 1, 3], N)) {
        kernel::resultant_discriminant(&r)?;
    }

    #[test]
    fn resultant_vanishes_on_common_factor(r in roots(&[0, 1, 3, -2], N)) {
        kernel::resultant_common_factor(&r)?;
    }

    #[test]
    fn rank_ignores_row_swaps_and_unit_scaling(
        r0 in prop::collection::vec(series(N), 3),
        r1 in prop::collection::vec(nonunit(N), 3),
        combo in unit(N),
        u in unit(N),
    ) {
        kernel::rank_invariance(&r0, &r1, &combo, &u)?;
    }
}
