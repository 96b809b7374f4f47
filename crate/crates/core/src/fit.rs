//! Least-squares fits for tail behaviour.

use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    /// Slope of `ln|v|` against `ln r`.
    pub slope: f64,
    /// `|v| ≈ coefficient · r^slope`.
    pub coefficient: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

fn check(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(KernelError::Domain("a fit needs at least two paired samples".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(KernelError::Domain("fit samples must be finite".into()));
    }
    Ok(())
}

/// Ordinary least squares `y ≈ a + b x`, returned as `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    check(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(KernelError::Domain("fit abscissae are all equal".into()));
    }
    let b = sxy / sxx;
    Ok((my - b * mx, b))
}

/// Log-log fit of `|values|` against `r`.
pub fn power_law_fit(r: &[f64], values: &[f64]) -> Result<PowerFit> {
    if values.contains(&0.0) || r.iter().any(|x| *x <= 0.0) {
        return Err(KernelError::Domain(
            "log-log fit needs positive radii and nonzero values".into(),
        ));
    }
    let xs: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let (a, b) = linear_fit(&xs, &ys)?;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - a - b * x).abs())
        .fold(0.0, f64::max);
    Ok(PowerFit {
        slope: b,
        coefficient: a.exp(),
        max_residual,
    })
}

/// Fits `v · r^exponent ≈ C + D r^{-correction}` and returns `(C, D)`; `C` is
/// the signed leading coefficient with the first correction removed.
pub fn leading_coefficient_fit(r: &[f64], values: &[f64], exponent: f64, correction: f64) -> Result<(f64, f64)> {
    let xs: Vec<f64> = r.iter().map(|x| x.powf(-correction)).collect();
    let ys: Vec<f64> = r.iter().zip(values).map(|(x, v)| v * x.powf(exponent)).collect();
    linear_fit(&xs, &ys)
}

/// `n` points from `lo` to `hi`, geometrically spaced when `log` is set.
pub fn grid(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                if i == 0 {
                    lo
                } else if i == n - 1 {
                    hi
                } else if log {
                    (lo.ln() + s * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + s * (hi - lo)
                }
            })
            .collect(),
    }
}
