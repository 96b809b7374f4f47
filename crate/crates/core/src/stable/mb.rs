use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{KernelError, Result};
use crate::mellin::{integrate_line, vertical_line_integral, Contour, LineOptions};
use crate::specfun::ln_gamma;

use super::{scaling_reduce, Approximation, Diagnostics, KernelSpec, Method};

/// Admissible abscissae `((d-1)/2 + β, d + β)`.
pub fn stable_strip(spec: &KernelSpec) -> (f64, f64) {
    let d = spec.df();
    (0.5 * (d - 1.0) + spec.beta, d + spec.beta)
}

/// Abscissa used when the caller does not fix one.
///
/// The integrand has size `r^{c-d-β}` on the line while the kernel behaves
/// like `r^{-d-β-α}` for large `r` and like a constant for small `r`, so `c`
/// slides towards the lower edge of the strip for large `r` and towards the
/// upper edge for small `r` to keep the cancellation bounded.
pub fn default_abscissa(spec: &KernelSpec, r_unit: f64) -> f64 {
    let (lo, hi) = stable_strip(spec);
    let width = hi - lo;
    if r_unit >= 2.0 {
        lo + 0.05 * width
    } else if r_unit >= 0.5 {
        lo + 0.5 * width
    } else {
        hi - 0.25 * width.min(1.0)
    }
}

/// The unit-time integrand `Γ(z/α)Γ((d+β-z)/2) 2^{β-z} / (α π^{d/2} Γ((z-β)/2)) · r^{z-d-β}`.
pub fn mb_integrand(spec: &KernelSpec, r: f64) -> impl Fn(Complex64) -> Complex64 + Sync + Copy {
    let d = spec.df();
    let alpha = spec.alpha;
    let beta = spec.beta;
    let ln_r = r.ln();
    let ln_const = -alpha.ln() - 0.5 * d * PI.ln();
    move |z: Complex64| {
        let a = ln_gamma(z / alpha);
        let b = ln_gamma((Complex64::new(d + beta, 0.0) - z) * 0.5);
        let c = ln_gamma((z - beta) * 0.5);
        match (a, b, c) {
            (Ok(a), Ok(b), Ok(c)) => {
                let ln = a.ln() + b.ln() - c.ln()
                    + (Complex64::new(beta, 0.0) - z) * LN_2
                    + (z - d - beta) * ln_r
                    + ln_const;
                ln.exp()
            }
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

/// Mellin–Barnes evaluation of the stable kernel (`0 < α < 2`, `r > 0`).
pub fn stable_mb(spec: &KernelSpec, r: f64, contour: Contour, tol: f64) -> Result<Approximation> {
    spec.validate()?;
    if spec.alpha >= 2.0 {
        return Err(KernelError::Domain(
            "the contour representation needs alpha < 2; use the closed form or the small-r series".into(),
        ));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!("r must be positive, got {r}")));
    }
    let scaled = scaling_reduce(spec, r);
    let unit = scaled.unit;
    let (lo, hi) = stable_strip(&unit);
    let c = contour.abscissa().unwrap_or_else(|| default_abscissa(&unit, scaled.r));
    if !(c > lo && c < hi) {
        return Err(KernelError::StripViolation {
            abscissa: c,
            lower: lo,
            upper: hi,
        });
    }
    let f = mb_integrand(&unit, scaled.r);
    let opts = LineOptions::symmetric(tol);
    let res = match contour {
        Contour::Fixed(cs) => vertical_line_integral(f, &cs, &opts)?,
        _ => {
            let gap = c.min(hi - c);
            integrate_line(f, c, (0.5 * gap).min(0.5), &opts)?
        }
    };
    let value = res.value.re * scaled.prefactor;
    let roundoff = 64.0 * f64::EPSILON * res.abs_integral;
    let est_error = (res.discretization_estimate + res.tail_bound + roundoff) * scaled.prefactor;
    Ok(Approximation {
        value,
        est_error,
        method: Method::MbContour,
        diagnostics: Diagnostics {
            nodes_used: Some(res.nodes_used),
            truncation_height: Some(res.half_height),
            abscissa: Some(c),
            imag_part: Some(res.value.im * scaled.prefactor),
            ..Diagnostics::default()
        },
    })
}
