use std::f64::consts::{LN_2, PI};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::mellin::{integrate_line, vertical_line_integral, Contour, LineOptions};
use crate::oracle::{hankel_oracle, OracleOptions, OracleValue};
use crate::specfun::{gamma_f64, ln_gamma};
use crate::stable::{is_even_integer, Approximation, Diagnostics, Method};

use super::{mellin_mk, RadialSymbol};

/// Admissible abscissae `((d+1)/2 + β, d + β)`.
pub fn general_strip(d: u32, beta: f64) -> (f64, f64) {
    let d = d as f64;
    (0.5 * (d + 1.0) + beta, d + beta)
}

/// Smallest integer above `(d+3)/2 + β + 1`.
pub fn default_k(d: u32, beta: f64) -> usize {
    ((0.5 * (d as f64 + 3.0) + beta + 1.0).floor() as usize) + 1
}

fn check_inputs(d: u32, beta: f64, t: f64) -> Result<()> {
    if d < 2 {
        return Err(KernelError::Domain(format!("dimension must be at least 2, got {d}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(KernelError::Domain(format!("beta must be nonnegative, got {beta}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(KernelError::Domain(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Contour evaluation of `K^β(t, r)` for a general symbol:
///
/// `(-1)^k/(π^{d/2} r^{d+β}) (1/2πi) ∫_{(c)} Γ(z)Γ((d+β-z)/2) 2^{β-z} / (Γ(z+k)Γ((z-β)/2)) M_t^k(z) r^z dz`.
#[allow(clippy::too_many_arguments)]
pub fn general_kernel_mb<S: RadialSymbol + ?Sized>(
    sym: &S,
    d: u32,
    beta: f64,
    t: f64,
    r: f64,
    k: Option<usize>,
    contour: Contour,
    tol: f64,
) -> Result<Approximation> {
    check_inputs(d, beta, t)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!("r must be positive, got {r}")));
    }
    let df = d as f64;
    let k = k.unwrap_or_else(|| default_k(d, beta));
    if !(k as f64 > 0.5 * (df + 3.0) + beta) {
        return Err(KernelError::Domain(format!(
            "k = {k} must exceed (d+3)/2 + beta = {}",
            0.5 * (df + 3.0) + beta
        )));
    }
    if k > sym.max_order() {
        return Err(KernelError::OrderExceeded {
            requested: k,
            available: sym.max_order(),
        });
    }
    let (lo, hi) = general_strip(d, beta);
    let c = contour.abscissa().unwrap_or(0.5 * (lo + hi));
    if !(c > lo && c < hi) {
        return Err(KernelError::StripViolation {
            abscissa: c,
            lower: lo,
            upper: hi,
        });
    }
    let failure: Mutex<Option<KernelError>> = Mutex::new(None);
    let ln_r = r.ln();
    let kf = k as f64;
    let f = |z: Complex64| -> Complex64 {
        let gammas = (|| -> Result<Complex64> {
            Ok(ln_gamma(z)?.ln() + ln_gamma((df + beta - z) * 0.5)?.ln()
                - ln_gamma(z + kf)?.ln()
                - ln_gamma((z - beta) * 0.5)?.ln())
        })();
        let m = gammas.and_then(|g| Ok((g, mellin_mk(sym, t, z, k)?)));
        match m {
            Ok((g, mk)) => (g + (beta - z) * LN_2 + z * ln_r).exp() * mk,
            Err(e) => {
                failure.lock().expect("unpoisoned").get_or_insert(e);
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    };
    let opts = LineOptions::symmetric(tol);
    let res = match contour {
        Contour::Fixed(cs) => vertical_line_integral(f, &cs, &opts),
        _ => integrate_line(f, c, (0.5 * (c - lo).min(hi - c)).min(0.5), &opts),
    };
    if let Some(e) = failure.into_inner().expect("unpoisoned") {
        return Err(e);
    }
    let res = res?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let pre = sign / (PI.powf(0.5 * df) * r.powf(df + beta));
    let value = pre * res.value.re;
    // inner quadratures are good to about 1e-13 of their own scale
    let noise = 1e-12 * res.abs_integral;
    Ok(Approximation {
        value,
        est_error: (res.discretization_estimate + res.tail_bound + noise) * pre.abs(),
        method: Method::MbContour,
        diagnostics: Diagnostics {
            nodes_used: Some(res.nodes_used),
            truncation_height: Some(res.half_height),
            abscissa: Some(c),
            ibp_order: Some(k),
            imag_part: Some(pre * res.value.im),
            ..Diagnostics::default()
        },
    })
}

/// `coefficient · r^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerm {
    pub coefficient: f64,
    pub exponent: f64,
}

impl LeadingTerm {
    pub fn at(&self, r: f64) -> f64 {
        self.coefficient * r.powf(-self.exponent)
    }
}

/// `2^β Γ((d+β)/2) e^{-tη(0)} / (π^{d/2} Γ(-β/2)) · r^{-d-β}` for `β ∉ {0, 2, 4, …}`.
pub fn general_leading_term<S: RadialSymbol + ?Sized>(sym: &S, d: u32, beta: f64, t: f64) -> Result<LeadingTerm> {
    check_inputs(d, beta, t)?;
    if is_even_integer(beta) {
        return Err(KernelError::Parity(format!(
            "beta = {beta} is an even integer; the r^(-d-beta) term vanishes"
        )));
    }
    let df = d as f64;
    let coefficient = 2f64.powf(beta) * gamma_f64(0.5 * (df + beta))? * (-t * sym.eta_at_zero()).exp()
        / (PI.powf(0.5 * df) * gamma_f64(-0.5 * beta)?);
    Ok(LeadingTerm {
        coefficient,
        exponent: df + beta,
    })
}

/// `-2^{β+α} Γ((d+β+α)/2) t e^{-tη₁(0)} / (π^{d/2} Γ(-(β+α)/2)) · r^{-d-β-α}`
/// for `η = r^α + η₁` and `β ∈ {0, 2, 4, …}`.
pub fn perturbed_leading_term(alpha: f64, eta1_at_zero: f64, d: u32, beta: f64, t: f64) -> Result<LeadingTerm> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(KernelError::Domain(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    if !(t > 0.0 && t.is_finite()) || d < 2 {
        return Err(KernelError::Domain("need d >= 2 and t > 0".into()));
    }
    if !(beta >= 0.0 && is_even_integer(beta)) {
        return Err(KernelError::Parity(format!(
            "beta = {beta} is not an even integer; use the general leading term"
        )));
    }
    let df = d as f64;
    let e = df + beta + alpha;
    let coefficient = -2f64.powf(beta + alpha) * gamma_f64(0.5 * e)? * t * (-t * eta1_at_zero).exp()
        / (PI.powf(0.5 * df) * gamma_f64(-0.5 * (beta + alpha))?);
    Ok(LeadingTerm {
        coefficient,
        exponent: e,
    })
}

/// Oracle value of `K^β(t, r)` with weight `s^{d/2+β} e^{-tη(s)}`.
pub fn symbol_oracle<S: RadialSymbol + ?Sized>(
    sym: &S,
    d: u32,
    beta: f64,
    t: f64,
    r: f64,
    opts: &OracleOptions,
) -> Result<OracleValue> {
    check_inputs(d, beta, t)?;
    let p = 0.5 * d as f64 + beta;
    let w = |s: f64| {
        if s == 0.0 {
            0.0
        } else {
            (p * s.ln() - t * sym.eta(s)).exp()
        }
    };
    hankel_oracle(&w, d, r, opts)
}
