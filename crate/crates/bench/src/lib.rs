//! Shared fixtures for the benchmarks.

use levykernel_core::radial::SymbolSpec;
use levykernel_core::stable::KernelSpec;
use num_complex::Complex64;

/// Gamma arguments: small, large imaginary part, near a pole, left half-plane.
pub fn gamma_points() -> [Complex64; 4] {
    [
        Complex64::new(0.7, 0.3),
        Complex64::new(1.25, 60.0),
        Complex64::new(-3.0 + 1e-7, 0.0),
        Complex64::new(-12.5, 4.0),
    ]
}

/// `(name, spec, r)` cases spanning the stable routes.
pub fn stable_cases() -> Vec<(&'static str, KernelSpec, f64)> {
    let k = |alpha, beta| KernelSpec::new(2, alpha, beta, 1.0).expect("valid spec");
    vec![
        ("a0.5_r1", k(0.5, 0.0), 1.0),
        ("a1.5_r1", k(1.5, 0.0), 1.0),
        ("a1.5_b0.7_r10", k(1.5, 0.7), 10.0),
        ("a1.2_r100", k(1.2, 0.0), 100.0),
    ]
}

pub fn symbols() -> Vec<SymbolSpec> {
    vec![
        SymbolSpec::Relativistic { alpha: 1.0, m: 1.0 },
        SymbolSpec::SumStable { a: 0.6, b: 1.4 },
    ]
}
