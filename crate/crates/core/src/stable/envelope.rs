use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};

use super::{evaluate, KernelSpec, Route};

/// The two-sided envelope of the stable kernel (up to constants).
///
/// `β = 0`: `t^{-d/α}(1 + t^{-1/α} r)^{-(d+α)}`; even `β > 0`:
/// `t^{-(d+β)/α} ∧ t r^{-(d+β+α)}`; otherwise `t^{-(d+β)/α} ∧ r^{-(d+β)}`.
pub fn envelope(spec: &KernelSpec, r: f64) -> f64 {
    let d = spec.df();
    let (a, b, t) = (spec.alpha, spec.beta, spec.t);
    if b == 0.0 {
        return t.powf(-d / a) * (1.0 + t.powf(-1.0 / a) * r).powf(-(d + a));
    }
    let cap = t.powf(-(d + b) / a);
    let tail = if spec.beta_is_even() {
        t * r.powf(-(d + b + a))
    } else {
        r.powf(-(d + b))
    };
    cap.min(tail)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `(r, kernel, envelope, ratio)` per grid point.
    pub rows: Vec<(f64, f64, f64, f64)>,
    /// The kernel changes sign for non-even `β > 0`; ratios then use `|K|`.
    pub absolute: bool,
}

/// Ratios `K(r)/envelope(r)` over a grid.
pub fn envelope_ratio(spec: &KernelSpec, r_grid: &[f64], tol: f64) -> Result<EnvelopeReport> {
    spec.validate()?;
    if spec.alpha >= 2.0 {
        return Err(KernelError::Domain("the power-law envelope needs alpha < 2".into()));
    }
    let absolute = spec.beta != 0.0 && !spec.beta_is_even();
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let k = evaluate(spec, r, Route::Auto, tol)?.value;
        let k = if absolute { k.abs() } else { k };
        let e = envelope(spec, r);
        rows.push((r, k, e, k / e));
    }
    let min_ratio = rows.iter().map(|x| x.3).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|x| x.3).fold(f64::NEG_INFINITY, f64::max);
    Ok(EnvelopeReport {
        min_ratio,
        max_ratio,
        rows,
        absolute,
    })
}

/// Upper envelope for the symbol `r^a + r^b`, `0 < a < b < 2`:
/// `t^{-d/b}(1 + t^{-1/b} r)^{-(d+a)}` for `t <= 1`,
/// `t^{-d/a}(1 + t^{-1/a} r)^{-(d+a)}` for `t >= 1`.
pub fn sum_symbol_envelope(d: u32, a: f64, b: f64, t: f64, r: f64) -> f64 {
    let d = d as f64;
    let p = if t <= 1.0 { b } else { a };
    t.powf(-d / p) * (1.0 + t.powf(-1.0 / p) * r).powf(-(d + a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumEnvelopeReport {
    pub holds: bool,
    /// Smallest `C` with `K <= C · envelope` on the grid.
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub small_time_branch: bool,
}

/// Checks `K_t(r) <= C · envelope(r)` for kernel values supplied by the caller.
///
/// The bound is judged to hold when every value is finite and positive and
/// the ratio at the outermost radius does not exceed 1.5 times the largest
/// ratio seen inside it (a growing ratio would mean the envelope decays too fast).
pub fn sum_symbol_envelope_check<K>(
    d: u32,
    a: f64,
    b: f64,
    t: f64,
    r_grid: &[f64],
    kernel: K,
) -> Result<SumEnvelopeReport>
where
    K: Fn(f64) -> Result<f64>,
{
    if !(0.0 < a && a < b && b < 2.0) {
        return Err(KernelError::Domain(format!("need 0 < a < b < 2, got a = {a}, b = {b}")));
    }
    if r_grid.len() < 2 {
        return Err(KernelError::Domain("the grid needs at least two radii".into()));
    }
    let mut ratios = Vec::with_capacity(r_grid.len());
    let mut positive = true;
    for &r in r_grid {
        let k = kernel(r)?;
        positive &= k > 0.0 && k.is_finite();
        ratios.push(k / sum_symbol_envelope(d, a, b, t, r));
    }
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let (last, inner) = ratios.split_last().expect("grid is nonempty");
    let inner_max = inner.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SumEnvelopeReport {
        holds: positive && max_ratio.is_finite() && *last <= 1.5 * inner_max,
        max_ratio,
        min_ratio,
        small_time_branch: t <= 1.0,
    })
}
