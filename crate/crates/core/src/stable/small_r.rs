//! Right-shift residue series, convergent for `α > 1` (and `α = 1`, `r < 1`):
//!
//! `K_1(r) = 2/(α π^{d/2} 2^d) Σ_m (-1)^m/m! Γ((d+β+2m)/α)/Γ(d/2+m) (r/2)^{2m}`.
//!
//! The terms reach `e^{r²/4}` at `α = 2` while the sum is `e^{-r²/4}`, so
//! for `α ∈ {1, 2}` (where every term ratio is rational in the binary64
//! inputs) the sum is carried out exactly in big-integer fixed point.

use std::f64::consts::PI;

use num_bigint::{BigInt, Sign};
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::error::{KernelError, Result};
use crate::specfun::{gamma_f64, ln_abs_gamma_f64};

use super::{kernel_at_origin, scaling_reduce, Approximation, Diagnostics, KernelSpec, Method};

const MAX_TERMS: usize = 20_000;
const MAX_BITS: u64 = 1 << 16;

/// Exact binary64 value as `mantissa · 2^exponent`.
fn dyadic(x: f64) -> (BigInt, i64) {
    let (mantissa, exponent, sign) = x.integer_decode();
    let m = BigInt::from(mantissa) * i64::from(sign);
    (m, i64::from(exponent))
}

/// `x · 2^shift` for a big integer, correctly rounded through the top 64 bits.
fn big_to_f64(x: &BigInt, shift: i64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (x.abs() >> drop as usize).to_f64().expect("64-bit value fits");
    let v = top * pow2(drop + shift);
    if x.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

fn pow2(e: i64) -> f64 {
    // split so intermediate powers stay representable
    let mut out = 1.0;
    let mut e = e;
    while e > 1000 {
        out *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        out *= 2f64.powi(-1000);
        e += 1000;
    }
    out * 2f64.powi(e as i32)
}

fn shift(x: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        x << by as usize
    } else {
        x >> (-by) as usize
    }
}

/// `Σ_m t_m` with `t_0 = 1`, `t_{m+1} = t_m · (-r²/4)/(m+1) · G_{m+1}/G_m`,
/// summed in fixed point with `bits` fractional bits. Returns the sum, an
/// absolute error bound for it, and the number of terms.
fn exact_sum(spec: &KernelSpec, r: f64, bits: u64) -> (f64, f64, usize) {
    let d = spec.df();
    let beta = spec.beta;
    let one = BigInt::from(1) << bits as usize;
    let mut term = one.clone();
    let mut sum = one;
    // running relative error of `term`, in units of its own size
    let mut rel = 0.0f64;
    let mut abs_err = 0.0f64;
    let (r_m, r_e) = dyadic(r);
    let r2_m = &r_m * &r_m;
    let r2_e = 2 * r_e;
    // β = b_int · 2^{e0} exactly, so every x_m below is exact too
    let (b_int, e0) = if beta == 0.0 {
        (BigInt::zero(), 0i64)
    } else {
        let (b_m, b_e) = dyadic(beta);
        let e0 = b_e.min(0);
        (shift(b_m, b_e - e0), e0)
    };
    let unit = BigInt::from(1) << (-e0) as usize;
    let mut count = 1;
    let mut past_peak = false;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        // x_m = (d + β + 2m)/α; numerator r² · Γ(x_m + 2/α)/Γ(x_m)
        let big_x = BigInt::from(spec.d as u64 + 2 * m as u64) * &unit + &b_int;
        let (num_m, num_e) = if spec.alpha == 2.0 {
            (&r2_m * &big_x, r2_e + e0 - 1)
        } else {
            let next_x = &big_x + &unit;
            (&r2_m * big_x * next_x, r2_e + 2 * e0)
        };
        // denominator 4(m+1)(d/2+m) = 2(m+1)(d+2m)
        let den = BigInt::from(2u64 * (m as u64 + 1)) * BigInt::from((d + 2.0 * mf) as u64);
        let scaled = shift(&term * num_m, num_e);
        let next = -(scaled / &den);
        if next.is_zero() {
            break;
        }
        // each step rounds twice (shift and division), each by less than a unit
        let next_units = big_to_f64(&next, 0).abs();
        rel += 2.0 / next_units;
        abs_err += rel * next_units;
        let ratio = next_units / big_to_f64(&term, 0).abs();
        if ratio < 1.0 {
            past_peak = true;
        }
        term = next;
        sum += &term;
        count += 1;
        if past_peak && next_units < 1.0 {
            break;
        }
    }
    let scale = -(bits as i64);
    (big_to_f64(&sum, scale), abs_err * pow2(scale), count)
}

/// `Σ_m t_m` with the same normalisation, terms formed in log space.
fn float_sum(spec: &KernelSpec, r: f64) -> Result<(f64, f64, usize)> {
    let d = spec.df();
    let alpha = spec.alpha;
    let ln_g0 = ln_abs_gamma_f64((d + spec.beta) / alpha)? - ln_abs_gamma_f64(0.5 * d)?;
    let ln_q = if r > 0.0 {
        2.0 * (0.5 * r).ln()
    } else {
        f64::NEG_INFINITY
    };
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    let mut prev = f64::INFINITY;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        let ln_mag = if m == 0 {
            0.0
        } else {
            ln_abs_gamma_f64((d + spec.beta + 2.0 * mf) / alpha)?
                - ln_abs_gamma_f64(0.5 * d + mf)?
                - ln_abs_gamma_f64(mf + 1.0)?
                + mf * ln_q
                - ln_g0
        };
        let mag = ln_mag.exp();
        let v = if m % 2 == 0 { mag } else { -mag };
        // Neumaier summation
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        abs_sum += mag;
        if m > 0 && mag < prev && mag <= 1e-18 * (sum + comp).abs() {
            let total = sum + comp;
            return Ok((total, 8.0 * f64::EPSILON * abs_sum + mag, m + 1));
        }
        prev = mag;
    }
    Err(KernelError::NonConvergent {
        what: "small-r series",
        last_change: prev,
        iterations: MAX_TERMS,
    })
}

/// Small-`r` (right-shift) expansion, `α >= 1`.
pub fn small_r_series(spec: &KernelSpec, r: f64) -> Result<Approximation> {
    spec.validate()?;
    if spec.alpha < 1.0 {
        return Err(KernelError::Domain(format!(
            "the small-r series diverges for alpha < 1 (alpha = {})",
            spec.alpha
        )));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!("r must be nonnegative, got {r}")));
    }
    let scaled = scaling_reduce(spec, r);
    let unit = scaled.unit;
    let rr = scaled.r;
    if spec.alpha == 1.0 && rr >= 1.0 {
        return Err(KernelError::Domain(format!(
            "at alpha = 1 the small-r series only converges for t^(-1/alpha) r < 1, got {rr}"
        )));
    }
    if rr == 0.0 {
        return Ok(Approximation {
            diagnostics: Diagnostics {
                terms_used: Some(1),
                ..Diagnostics::default()
            },
            ..Approximation::exact(kernel_at_origin(spec), Method::SmallRSeries)
        });
    }
    let d = unit.df();
    let lead = 2.0 / (unit.alpha * PI.powf(0.5 * d) * 2f64.powf(d)) * gamma_f64((d + unit.beta) / unit.alpha)?
        / gamma_f64(0.5 * d)?;
    let exact_path = unit.alpha == 2.0 || unit.alpha == 1.0;
    let (sum, err, terms, bits) = if exact_path {
        let mut bits = 128u64;
        loop {
            let (s, e, n) = exact_sum(&unit, rr, bits);
            if e <= 1e-18 * s.abs() || bits >= MAX_BITS {
                break (s, e, n, Some(bits));
            }
            // the bound scales like 2^-bits; jump straight to what it asks for
            let need = ((e / (1e-19 * s.abs().max(f64::MIN_POSITIVE))).log2().ceil() as u64).max(64);
            bits = (bits + need).min(MAX_BITS);
        }
    } else {
        let (s, e, n) = float_sum(&unit, rr)?;
        if !(e <= 1e-8 * s.abs()) {
            // cancellation has eaten most digits; the contour is the right tool here
            return Err(KernelError::NonConvergent {
                what: "small-r series (cancellation)",
                last_change: e,
                iterations: n,
            });
        }
        (s, e, n, None)
    };
    let value = scaled.prefactor * lead * sum;
    let est_error = scaled.prefactor * lead.abs() * err + 4.0 * f64::EPSILON * value.abs();
    Ok(Approximation {
        value,
        est_error,
        method: Method::SmallRSeries,
        diagnostics: Diagnostics {
            terms_used: Some(terms),
            precision_bits: bits,
            ..Diagnostics::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::{gaussian_kernel, poisson_kernel};

    #[test]
    fn dyadic_roundtrip() {
        for x in [0.75, 3.0, 1e-7, 12345.678] {
            let (m, e) = dyadic(x);
            assert_eq!(big_to_f64(&m, e), x);
        }
        assert_eq!(big_to_f64(&(BigInt::from(3) << 2000usize), -2000), 3.0);
    }

    #[test]
    fn gaussian_resummation() {
        let spec = KernelSpec::new(2, 2.0, 0.0, 1.0).unwrap();
        let v = small_r_series(&spec, 1.0).unwrap();
        let exact = (-0.25f64).exp() / (4.0 * PI);
        assert!((v.value / exact - 1.0).abs() < 1e-14);
        for r in [5.0, 10.0, 20.0] {
            let v = small_r_series(&spec, r).unwrap();
            let g = gaussian_kernel(2, 1.0, r);
            assert!((v.value / g - 1.0).abs() < 1e-12, "r={r}: {} vs {g}", v.value);
        }
    }

    #[test]
    fn origin_and_poisson() {
        let spec = KernelSpec::new(3, 1.5, 0.4, 2.0).unwrap();
        let v = small_r_series(&spec, 0.0).unwrap();
        assert_eq!(v.value, kernel_at_origin(&spec));
        let spec = KernelSpec::new(2, 1.0, 0.0, 1.0).unwrap();
        let v = small_r_series(&spec, 0.5).unwrap();
        assert!((v.value / poisson_kernel(2, 1.0, 0.5) - 1.0).abs() < 1e-8);
        assert!(small_r_series(&spec, 1.5).is_err());
        let low = KernelSpec::new(2, 0.7, 0.0, 1.0).unwrap();
        assert!(matches!(small_r_series(&low, 0.1), Err(KernelError::Domain(_))));
    }

    #[test]
    fn float_and_exact_paths_agree_where_both_are_easy() {
        let spec = KernelSpec::new(3, 2.0, 0.6, 1.0).unwrap();
        let (e, _, _) = exact_sum(&spec, 0.7, 200);
        let (f, err, _) = float_sum(&spec, 0.7).unwrap();
        assert!((e - f).abs() <= err + 1e-15);
    }

    #[test]
    fn refuses_results_lost_to_cancellation() {
        let spec = KernelSpec::new(2, 1.5, 0.0, 1.0).unwrap();
        assert!(matches!(
            small_r_series(&spec, 10.0),
            Err(KernelError::NonConvergent { .. })
        ));
        assert!(small_r_series(&spec, 2.0).is_ok());
    }
}
