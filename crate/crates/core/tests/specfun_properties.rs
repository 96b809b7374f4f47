use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use levykernel_core::mellin::mellin_bessel_rhs;
use levykernel_core::oracle::{bessel_weight_integral, OracleOptions};
use levykernel_core::specfun::{gamma, nearest_pole, reciprocal_gamma};

fn off_poles() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -50.0f64..50.0)
        .prop_map(|(a, b)| Complex64::new(a, b))
        .prop_filter("too close to a pole", |z| {
            let near = |w: Complex64| (w - w.re.round()).norm() < 1e-3 && w.re.round() <= 0.0;
            !near(*z) && !near(*z + 1.0) && !near(Complex64::new(1.0, 0.0) - *z)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn functional_equation(z in off_poles()) {
        let g1 = gamma(z + 1.0).unwrap();
        let g = gamma(z).unwrap();
        prop_assert!((g1 - z * g).norm() <= 1e-12 * g1.norm(), "z = {z}");
    }

    #[test]
    fn reflection(z in off_poles()) {
        let lhs = gamma(z).unwrap() * gamma(Complex64::new(1.0, 0.0) - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "z = {z}");
    }

    #[test]
    fn reciprocal_gamma_vanishes_continuously(n in 0u32..4, theta in 0.0f64..(2.0 * PI)) {
        let z = Complex64::new(-(n as f64), 0.0) + Complex64::from_polar(1e-6, theta);
        prop_assert!(reciprocal_gamma(z).norm() <= 1e-5);
    }

    // near z = -n, 1/Γ(z) ≈ (-1)^n n! (z + n), so the size grows with n!
    #[test]
    fn reciprocal_gamma_near_deeper_zeros(n in 4u32..16, theta in 0.0f64..(2.0 * PI)) {
        let eps = Complex64::from_polar(1e-6, theta);
        let z = Complex64::new(-(n as f64), 0.0) + eps;
        let factorial: f64 = (1..=n).map(f64::from).product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let linear = eps * sign * factorial;
        prop_assert!((reciprocal_gamma(z) - linear).norm() <= 1e-4 * linear.norm());
    }
}

#[test]
fn poles_are_recognised() {
    assert_eq!(nearest_pole(Complex64::new(-3.0, 0.0)), Some(3));
    assert_eq!(nearest_pole(Complex64::new(-3.0, 1e-3)), None);
}

#[test]
fn mellin_bessel_identity() {
    for z in [0.5, 1.0, 1.4] {
        let w = move |s: f64| s.powf(z - 1.0);
        let q = bessel_weight_integral(0.0, 1.0, &w, &OracleOptions::default()).unwrap();
        let expect = mellin_bessel_rhs(Complex64::new(z, 0.0), 0.0).unwrap().re;
        assert!((q.value / expect - 1.0).abs() < 1e-6, "z={z}: {} vs {expect}", q.value);
    }
}
