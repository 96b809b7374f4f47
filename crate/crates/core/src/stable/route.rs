use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::mellin::Contour;
use crate::oracle::{hankel_oracle, stable_weight, OracleOptions};

use super::{
    gaussian_kernel, kernel_at_origin, poisson_kernel, scaling_reduce, small_r_series, stable_mb, stable_series,
    Approximation, Diagnostics, KernelSpec, Method,
};

/// How a stable kernel value should be obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Auto,
    Mb,
    Series,
    SmallR,
    Closed,
    Oracle,
}

/// Below this reduced radius the contour integrand cancels badly.
const SMALL_R: f64 = 0.5;
/// Above this reduced radius the asymptotic series is worth trying.
const LARGE_R: f64 = 4.0;

fn closed_form(spec: &KernelSpec, r: f64) -> Result<Approximation> {
    if spec.beta != 0.0 {
        return Err(KernelError::Domain("closed forms exist only for beta = 0".into()));
    }
    if spec.alpha == 1.0 {
        Ok(Approximation::exact(
            poisson_kernel(spec.d, spec.t, r),
            Method::ClosedForm,
        ))
    } else if spec.alpha == 2.0 {
        Ok(Approximation::exact(
            gaussian_kernel(spec.d, spec.t, r),
            Method::ClosedForm,
        ))
    } else {
        Err(KernelError::Domain(format!(
            "no closed form for alpha = {}",
            spec.alpha
        )))
    }
}

pub(crate) fn oracle(spec: &KernelSpec, r: f64, tol: f64) -> Result<Approximation> {
    if !(r > 0.0) {
        return Err(KernelError::Domain(format!("the oracle needs r > 0, got {r}")));
    }
    let w = stable_weight(spec.d, spec.alpha, spec.beta, spec.t);
    let opts = OracleOptions {
        tol: tol.min(1e-10),
        ..OracleOptions::default()
    };
    let v = hankel_oracle(&w, spec.d, r, &opts)?;
    Ok(Approximation {
        value: v.value,
        est_error: v.est_error,
        method: Method::Oracle,
        diagnostics: Diagnostics {
            nodes_used: Some(v.panels),
            ..Diagnostics::default()
        },
    })
}

/// Evaluates `(-Δ)^{β/2} P_t^α` at radius `r` along the requested route.
///
/// `Auto` prefers a closed form, then the small-`r` series (or the oracle
/// when `α < 1`) near the origin, then the asymptotic series when its first
/// omitted term is below `tol`, and the contour integral otherwise.
pub fn evaluate(spec: &KernelSpec, r: f64, route: Route, tol: f64) -> Result<Approximation> {
    spec.validate()?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!("r must be nonnegative, got {r}")));
    }
    match route {
        Route::Mb => stable_mb(spec, r, Contour::Auto, tol),
        Route::Series => Ok(stable_series(spec, r, None)?.approx),
        Route::SmallR => small_r_series(spec, r),
        Route::Closed => closed_form(spec, r),
        Route::Oracle => oracle(spec, r, tol),
        Route::Auto => {
            if spec.beta == 0.0 && (spec.alpha == 1.0 || spec.alpha == 2.0) {
                return closed_form(spec, r);
            }
            if r == 0.0 {
                return Ok(Approximation::exact(kernel_at_origin(spec), Method::ClosedForm));
            }
            if spec.alpha == 2.0 {
                return small_r_series(spec, r);
            }
            let rr = scaling_reduce(spec, r).r;
            if rr < SMALL_R {
                return if spec.alpha >= 1.0 {
                    small_r_series(spec, r)
                } else {
                    oracle(spec, r, tol)
                };
            }
            if rr >= LARGE_R {
                let s = stable_series(spec, r, None)?.approx;
                if !s.diagnostics.divergence_warning && s.est_error <= tol * s.value.abs() {
                    return Ok(s);
                }
            }
            stable_mb(spec, r, Contour::Auto, tol)
        }
    }
}
