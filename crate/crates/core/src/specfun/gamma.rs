//! Complex gamma function on the whole plane.
//!
//! The right half-plane `Re z >= 1/2` uses a fixed-coefficient Lanczos
//! approximation (g = 7, nine terms); the left half-plane goes through the
//! reflection formula. Everything is evaluated in log space first so that
//! ratios of gamma factors far up a vertical line never overflow.

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_complex::Complex64;

use crate::error::{KernelError, Result};

/// A complex number used throughout the crate. Evaluators never hand out
/// NaN or infinite components; they return an error instead.
pub type ComplexValue = Complex64;

/// Absolute distance to a nonpositive integer below which `z` counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `n!` for the small arguments where it is exact in binary64.
const FACTORIALS: [f64; 23] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
    51090942171709440000.0,
    1124000727777607680000.0,
];

/// `ln Γ(z)` split into modulus and phase.
///
/// The phase is the imaginary part of the analytic continuation of the log
/// used internally and is *not* reduced to `(-π, π]`; only `exp` of sums of
/// these values is ever formed, so the branch does not matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEval {
    pub log_modulus: f64,
    pub phase: f64,
}

impl GammaEval {
    pub fn from_ln(ln: Complex64) -> Self {
        Self {
            log_modulus: ln.re,
            phase: ln.im,
        }
    }

    pub fn ln(self) -> Complex64 {
        Complex64::new(self.log_modulus, self.phase)
    }

    pub fn modulus(self) -> f64 {
        self.log_modulus.exp()
    }

    pub fn value(self) -> Complex64 {
        Complex64::from_polar(self.log_modulus.exp(), self.phase)
    }

    pub fn recip(self) -> Self {
        Self {
            log_modulus: -self.log_modulus,
            phase: -self.phase,
        }
    }
}

impl Mul for GammaEval {
    type Output = GammaEval;
    fn mul(self, rhs: GammaEval) -> GammaEval {
        GammaEval {
            log_modulus: self.log_modulus + rhs.log_modulus,
            phase: self.phase + rhs.phase,
        }
    }
}

impl Div for GammaEval {
    type Output = GammaEval;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: GammaEval) -> GammaEval {
        self * rhs.recip()
    }
}

/// Returns `Some(n)` when `z` is within [`POLE_TOLERANCE`] of `-n`, `n >= 0`.
pub fn nearest_pole(z: Complex64) -> Option<u64> {
    if z.re > 0.5 || z.im.abs() >= POLE_TOLERANCE {
        return None;
    }
    let n = z.re.round();
    if n <= 0.0 && (z - Complex64::new(n, 0.0)).norm() < POLE_TOLERANCE {
        Some((-n) as u64)
    } else {
        None
    }
}

fn lanczos_ln(z: Complex64) -> Complex64 {
    // Γ(w + 1) = √(2π) (w + g + 1/2)^(w + 1/2) e^-(w + g + 1/2) A(w)
    let w = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (w + i as f64);
    }
    let t = w + (LANCZOS_G + 0.5);
    LN_SQRT_2PI + (w + 0.5) * t.ln() - t + sum.ln()
}

/// `ln sin(πz)` on some branch, without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    if z.im > 0.0 {
        // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz})
        -i * PI * z + (1.0 - (2.0 * i * PI * z).exp()).ln() + Complex64::new(-(2f64.ln()), PI / 2.0)
    } else {
        // sin(πz) = (-i/2) e^{iπz} (1 - e^{-2iπz})
        i * PI * z + (1.0 - (-2.0 * i * PI * z).exp()).ln() + Complex64::new(-(2f64.ln()), -PI / 2.0)
    }
}

/// `ln Γ(z)` for `z` away from the poles.
pub fn ln_gamma(z: Complex64) -> Result<GammaEval> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(KernelError::NonFinite("ln_gamma argument"));
    }
    if nearest_pole(z).is_some() {
        return Err(KernelError::PoleHit { re: z.re, im: z.im });
    }
    let ln = if z.re >= 0.5 {
        lanczos_ln(z)
    } else {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_ln(1.0 - z)
    };
    if ln.re.is_finite() && ln.im.is_finite() {
        Ok(GammaEval::from_ln(ln))
    } else {
        Err(KernelError::NonFinite("ln_gamma"))
    }
}

/// The meromorphic gamma function.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        return gamma_f64(z.re).map(|v| Complex64::new(v, 0.0));
    }
    let v = ln_gamma(z)?.value();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(KernelError::NonFinite("gamma"))
    }
}

/// `1/Γ(z)`, an entire function. Exactly zero at the nonpositive integers.
pub fn reciprocal_gamma(z: Complex64) -> Complex64 {
    if nearest_pole(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if z.im == 0.0 {
        return Complex64::new(rgamma_f64(z.re), 0.0);
    }
    if z.re >= 0.5 {
        (-lanczos_ln(z)).exp()
    } else {
        // sin(πz) Γ(1 - z) / π stays finite straight through the zeros
        (ln_sin_pi(z) + lanczos_ln(1.0 - z) - PI.ln()).exp()
    }
}

/// Residue of Γ at `z = -n`, namely `(-1)^n / n!`.
pub fn gamma_residue(n: u32) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let fact = match FACTORIALS.get(n as usize) {
        Some(&f) => f,
        None => gamma_f64(n as f64 + 1.0).unwrap_or(f64::INFINITY),
    };
    sign / fact
}

/// Leading-order Stirling magnitude `√(2π)|v|^{u-1/2} e^{-π|v|/2}` of `|Γ(u+iv)|`.
pub fn stirling_magnitude(u: f64, v: f64) -> f64 {
    let av = v.abs();
    (2.0 * PI).sqrt() * av.powf(u - 0.5) * (-PI * av / 2.0).exp()
}

fn lanczos_real(x: f64) -> f64 {
    let w = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    if x < 140.0 {
        (2.0 * PI).sqrt() * t.powf(w + 0.5) * (-t).exp() * sum
    } else {
        // split the power to keep t^(w+1/2) finite until the product is formed
        let half = t.powf(0.5 * (w + 0.5));
        (2.0 * PI).sqrt() * half * ((-t).exp() * half) * sum
    }
}

/// Real gamma function. Errors at the poles.
pub fn gamma_f64(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(KernelError::NonFinite("gamma argument"));
    }
    if nearest_pole(Complex64::new(x, 0.0)).is_some() {
        return Err(KernelError::PoleHit { re: x, im: 0.0 });
    }
    if x == x.floor() && x >= 1.0 && x <= FACTORIALS.len() as f64 {
        return Ok(FACTORIALS[x as usize - 1]);
    }
    let v = if x >= 0.5 {
        lanczos_real(x)
    } else {
        PI / ((PI * x).sin() * lanczos_real(1.0 - x))
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(KernelError::NonFinite("gamma"))
    }
}

/// Real `1/Γ(x)`, zero at the nonpositive integers.
pub fn rgamma_f64(x: f64) -> f64 {
    if nearest_pole(Complex64::new(x, 0.0)).is_some() {
        return 0.0;
    }
    if x >= 0.5 {
        if x > 171.5 {
            return 0.0;
        }
        1.0 / gamma_f64(x).unwrap_or(f64::INFINITY)
    } else {
        (PI * x).sin() * lanczos_real(1.0 - x) / PI
    }
}

/// `ln |Γ(x)|` for real `x`.
pub fn ln_abs_gamma_f64(x: f64) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(x, 0.0))?.log_modulus)
}

/// `1/Γ(x)` for real `x` as `(ln|1/Γ(x)|, sign)`. The sign is `0` (and the
/// log `-∞`) at the nonpositive integers.
pub fn ln_rgamma_signed(x: f64) -> (f64, f64) {
    if nearest_pole(Complex64::new(x, 0.0)).is_some() {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x >= 0.5 {
        let lg = lanczos_ln(Complex64::new(x, 0.0)).re;
        return (-lg, 1.0);
    }
    let s = (PI * x).sin();
    let lg = lanczos_ln(Complex64::new(1.0 - x, 0.0)).re;
    (s.abs().ln() + lg - PI.ln(), s.signum())
}
