use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use stern_measure::dilation::Dilation;
use stern_measure::fourier::{mu_hat, mu_hat_level, FourierSettings};
use stern_measure::sequence::{stern_matrix, stern_pair, SternMemo};
use stern_measure::Dyadic;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matrix_form_matches_recursion(n in 1u64..(1 << 40)) {
        let mut memo = SternMemo::default();
        prop_assert_eq!(stern_matrix(n).unwrap(), memo.get(n));
        prop_assert_eq!(BigUint::from(stern_pair(n).0), memo.get(n));
    }

    #[test]
    fn coefficients_are_even(k in -4.0f64..4.0) {
        let s = FourierSettings::default();
        prop_assert_eq!(mu_hat(k, &s).to_bits(), mu_hat(-k, &s).to_bits());
    }

    #[test]
    fn coefficients_are_bounded(k in -1e6f64..1e6) {
        let s = FourierSettings::default();
        prop_assert!(mu_hat(k, &s).abs() <= 1.0);
    }

    #[test]
    fn refinement_converges(k in 0.05f64..64.0) {
        let s = FourierSettings::default();
        let limit = mu_hat(k, &s);
        let errs: Vec<f64> = [10, 15, 20].iter().map(|&n| (mu_hat_level(n, k) - limit).abs()).collect();
        prop_assert!(errs[1] <= errs[0] && errs[2] <= errs[1], "{errs:?}");
        prop_assert!(errs[2] < 1e-4);
    }

    #[test]
    fn finite_product_symmetric_about_half(kappa in 0.0f64..=1.0, n in 1u32..=12) {
        let scale = 2f64.powi(n as i32);
        let a = mu_hat_level(n, scale * kappa);
        let b = mu_hat_level(n, scale * (1.0 - kappa));
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn dilation_routes_agree(num in 0u64..=(1 << 14), level in 0u32..=14) {
        let num = num % ((1u64 << level) + 1);
        let d = Dilation::new();
        let t = Dyadic::new(num, level).unwrap();
        let f = d.f_dyadic(&t);
        prop_assert_eq!(&f, &d.f_dyadic_by_matrices(&t));
        prop_assert!(f.within_bounds());
        prop_assert!(f.f0 <= f.f1);
    }

    #[test]
    fn distribution_reflects(num in 0u64..=(1 << 12), level in 0u32..=12) {
        let num = num % ((1u64 << level) + 1);
        let d = Dilation::new();
        let x = Dyadic::new(num, level).unwrap();
        let total = d.big_f(&x).unwrap() + d.big_f(&x.reflect()).unwrap();
        prop_assert!(total.is_one());
    }

    #[test]
    fn interval_masses_are_positive(k in 1u32..=16, m in any::<u64>()) {
        let m = m % (1u64 << (k - 1));
        let d = Dilation::new();
        let mass = d.interval_measure(m, k).unwrap();
        prop_assert!(mass > BigRational::zero());
        prop_assert_eq!(mass, d.interval_measure_augmented(m, k).unwrap());
    }
}
