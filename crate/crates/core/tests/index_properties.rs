use proptest::prelude::*;
use psym::index::{ellipsoid_index, index_crossing, IndexOptions};
use psym::path::{integrate_fundamental, CoefficientFunction};
use psym::sym::{diamond, exp_j, is_symplectic, spectrum, standard_p, UnitCircleValue};
use psym::{Dim, Mat, Tolerances};
use std::f64::consts::PI;

fn dim() -> impl Strategy<Value = Dim> {
    prop_oneof![Just((2, 0)), Just((2, 1)), Just((3, 1))].prop_map(|(n, k)| Dim::new(n, k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Crossing count on γ(t) = e^{ctJ} agrees with the closed form away from
    // resonant lengths cs ∈ πZ.
    #[test]
    fn constant_paths_match_closed_form(dim in dim(), c in 0.3f64..2.5, s in 0.2f64..7.0) {
        let phase = (c * s / PI).fract();
        prop_assume!(phase > 0.02 && phase < 0.98);
        let n = dim.n();
        let coeff = CoefficientFunction::constant(Mat::<f64>::identity(2 * n, 2 * n) * c, s).unwrap();
        let path = integrate_fundamental(&coeff, 256).unwrap();
        let p = standard_p::<f64>(dim).into_inner();
        let r = index_crossing(&path, UnitCircleValue::one(), &p, &IndexOptions::default()).unwrap();
        prop_assert_eq!(r.i - dim.kappa() as i64, ellipsoid_index(dim, c, s).unwrap());
        prop_assert_eq!(r.nu, 0);
    }

    #[test]
    fn diamond_of_rotations_is_symplectic_with_reciprocal_spectrum(a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let m = diamond(&exp_j::<f64>(1, a), &exp_j::<f64>(2, b)).unwrap();
        prop_assert!(is_symplectic(&m, 1e-10));
        prop_assert!(spectrum(&m, &Tolerances::default()).is_reciprocal_symmetric(1e-8));
    }
}
