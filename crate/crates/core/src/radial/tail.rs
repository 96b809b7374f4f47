//! `E(r) = ∫_1^∞ J_{d/2-1}(rs) ψ(s) s^{d/2+β} e^{-tη(s)} ds` for a cutoff `ψ`
//! vanishing on `s <= 1` and equal to one on `s >= 2`.

use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::fit::{power_law_fit, PowerFit};
use crate::oracle::{bessel_weight_integral, OracleOptions};

use super::{exp_eta_jet, falling, RadialSymbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cutoff {
    /// `ψ ≡ 0`.
    Zero,
    /// Polynomial step on `[1, 2]` whose first `order` derivatives vanish at both ends.
    Smoothstep { order: usize },
}

impl Cutoff {
    /// The built-in cutoff for `N` integrations by parts.
    pub fn for_order(n: usize) -> Self {
        Cutoff::Smoothstep { order: n + 1 }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Derivatives `0..=m` of the smoothstep `S_n` at `x`, clamped outside `[0, 1]`.
pub fn smoothstep(n: usize, x: f64, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    if x >= 1.0 {
        out[0] = 1.0;
        return out;
    }
    if x <= 0.0 {
        return out;
    }
    // S_n(x) = x^{n+1} Σ_j (-1)^j C(n+j, j) C(2n+1, n-j) x^j
    let coeffs: Vec<(usize, f64)> = (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            (n + 1 + j, sign * binomial(n + j, j) * binomial(2 * n + 1, n - j))
        })
        .collect();
    for (q, o) in out.iter_mut().enumerate() {
        *o = coeffs
            .iter()
            .filter(|(p, _)| *p >= q)
            .map(|&(p, a)| a * falling(p as f64, q) * x.powi((p - q) as i32))
            .sum();
    }
    out
}

fn binomial_row(m: usize) -> Vec<f64> {
    (0..=m).map(|i| binomial(m, i)).collect()
}

/// Derivatives `0..=m` of `g(s) = ψ(s) s^p e^{-tη(s)}`.
fn weight_jet<S: RadialSymbol + ?Sized>(sym: &S, p: f64, t: f64, psi: Cutoff, s: f64, m: usize) -> Result<Vec<f64>> {
    let n = match psi {
        Cutoff::Zero => return Ok(vec![0.0; m + 1]),
        Cutoff::Smoothstep { order } => order,
    };
    let e = exp_eta_jet(sym, t, s, m)?;
    let pw: Vec<f64> = (0..=m).map(|j| falling(p, j) * s.powf(p - j as f64)).collect();
    let ps = smoothstep(n, s - 1.0, m);
    let mut pe = vec![0.0; m + 1];
    for (q, slot) in pe.iter_mut().enumerate() {
        let b = binomial_row(q);
        *slot = (0..=q).map(|i| b[i] * pw[i] * e[q - i]).sum();
    }
    let mut g = vec![0.0; m + 1];
    for (q, slot) in g.iter_mut().enumerate() {
        let b = binomial_row(q);
        *slot = (0..=q).map(|i| b[i] * ps[i] * pe[q - i]).sum();
    }
    Ok(g)
}

/// `L_ν h = ν h / s - h'` applied to a jet; the result is one order shorter.
fn apply_l(nu: f64, s: f64, h: &[f64]) -> Vec<f64> {
    let m = h.len() - 1;
    // derivatives of 1/s
    let inv: Vec<f64> = (0..m)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1..=i).map(|j| j as f64).product::<f64>() / s.powi(i as i32 + 1)
        })
        .collect();
    (0..m)
        .map(|q| {
            let b = binomial_row(q);
            let quotient: f64 = (0..=q).map(|i| b[i] * inv[i] * h[q - i]).sum();
            nu * quotient - h[q + 1]
        })
        .collect()
}

/// `E(r)`, evaluated as `r^{-N} ∫ J_{d/2-1+N}(rs) (L_{d/2-1+N} ⋯ L_{d/2} g)(s) ds`
/// after `N` integrations by parts (the form in which its decay is visible).
#[allow(clippy::too_many_arguments)]
pub fn tail_integral<S: RadialSymbol + ?Sized>(
    sym: &S,
    d: u32,
    beta: f64,
    t: f64,
    r: f64,
    n: usize,
    psi: Cutoff,
) -> Result<f64> {
    if d < 2 || !(beta >= 0.0) || !(t > 0.0) || !(r > 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!(
            "tail integral needs d >= 2, beta >= 0, t > 0, r > 0 (got d = {d}, beta = {beta}, t = {t}, r = {r})"
        )));
    }
    if let Cutoff::Smoothstep { order } = psi {
        if order < n {
            return Err(KernelError::Domain(format!(
                "a cutoff with {order} vanishing derivatives supports at most {order} integrations by parts, asked for {n}"
            )));
        }
    } else {
        return Ok(0.0);
    }
    if n > sym.max_order() {
        return Err(KernelError::OrderExceeded {
            requested: n,
            available: sym.max_order(),
        });
    }
    let mu = 0.5 * d as f64 - 1.0;
    let p = 0.5 * d as f64 + beta;
    let failure = std::sync::Mutex::new(None);
    let weight = |s: f64| -> f64 {
        if s <= 1.0 {
            return 0.0;
        }
        match weight_jet(sym, p, t, psi, s, n) {
            Ok(mut h) => {
                for j in 1..=n {
                    h = apply_l(mu + j as f64, s, &h);
                }
                h[0]
            }
            Err(e) => {
                failure.lock().expect("unpoisoned").get_or_insert(e);
                0.0
            }
        }
    };
    let opts = OracleOptions {
        expect_alternation: false,
        ..OracleOptions::default()
    };
    let v = bessel_weight_integral(mu + n as f64, r, &weight, &opts);
    if let Some(e) = failure.into_inner().expect("unpoisoned") {
        return Err(e);
    }
    Ok(v?.value * r.powi(-(n as i32)))
}

/// Log-log slope of the oscillation envelope of `|E|`: at each grid radius
/// the largest `|E|` over eight samples spanning one period `2π`.
#[allow(clippy::too_many_arguments)]
pub fn decay_slope<S: RadialSymbol + ?Sized>(
    sym: &S,
    d: u32,
    beta: f64,
    t: f64,
    n: usize,
    psi: Cutoff,
    r_grid: &[f64],
) -> Result<PowerFit> {
    let mut env = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let mut best = 0.0f64;
        for j in 0..8 {
            let x = r + j as f64 * std::f64::consts::FRAC_PI_4;
            best = best.max(tail_integral(sym, d, beta, t, x, n, psi)?.abs());
        }
        env.push(best);
    }
    power_law_fit(r_grid, &env)
}
