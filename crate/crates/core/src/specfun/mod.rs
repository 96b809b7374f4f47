//! Special functions consumed by every other module: the complex gamma
//! function (with log-space ratios), Bessel functions of the first kind and
//! their zeros, and Stirling's magnitude estimate.

mod bessel;
pub(crate) mod dd;
mod gamma;

pub use bessel::{
    bessel_j, bessel_j_asymptotic, bessel_j_deriv, bessel_j_series, bessel_j_zero, bessel_j_zeros,
    bessel_j_zeros_range, x_switch,
};
pub use gamma::{
    gamma, gamma_f64, gamma_residue, ln_abs_gamma_f64, ln_gamma, ln_rgamma_signed, nearest_pole, reciprocal_gamma,
    rgamma_f64, stirling_magnitude, ComplexValue, GammaEval, POLE_TOLERANCE,
};
