//! Brute-force radial Fourier inversion.
//!
//! `K(r) = (2π)^{-d/2} r^{1-d/2} ∫_0^∞ J_{d/2-1}(rs) w(s) ds`, integrated
//! panel by panel between the zeros of the Bessel factor and summed with
//! repeated averaging of the partial sums.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::quad::integrate;
use crate::specfun::{bessel_j, bessel_j_zeros_range, gamma_f64};
use crate::stable::{stable_series, KernelSpec};

/// Zero-panel plan for `∫ J_ν(r s) w(s) ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryPlan {
    pub nu: f64,
    pub scale: f64,
    /// Positive zeros of `J_ν`, unscaled, strictly increasing.
    pub zeros: Vec<f64>,
    pub depth: usize,
}

impl OscillatoryPlan {
    pub fn new(nu: f64, scale: f64, depth: usize) -> Self {
        assert!(depth >= 3, "acceleration depth must be at least 3");
        Self {
            nu,
            scale,
            zeros: bessel_j_zeros_range(nu, 1, 64),
            depth,
        }
    }

    fn ensure(&mut self, count: usize) {
        let have = self.zeros.len();
        if count > have {
            let target = count.max(2 * have);
            let more = bessel_j_zeros_range(self.nu, have + 1, target);
            self.zeros.extend(more);
        }
    }

    /// Right end of panel `k` in the integration variable (panel 0 is `[0, j_1/r]`).
    fn boundary(&mut self, k: usize) -> f64 {
        self.ensure(k + 1);
        self.zeros[k] / self.scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Relative target for the accelerated sum.
    pub tol: f64,
    /// Relative target for each panel integral.
    pub panel_tol: f64,
    pub max_panels: usize,
    pub depth: usize,
    /// The weight is positive, so panel sums must alternate in sign.
    pub expect_alternation: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            panel_tol: 1e-13,
            max_panels: 400_000,
            depth: 12,
            expect_alternation: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    pub est_error: f64,
    pub panels: usize,
    /// `true` when the tail was summed by averaging rather than reached.
    pub accelerated: bool,
}

const BATCH: usize = 32;
const SUPPORT_CUTOFF: f64 = 1e-22;

/// Where `s·w(s)` has fallen permanently below `1e-22` of its peak on a
/// doubling scan (`None` when the weight does not die out), and where the
/// panel amplitude `|w(s)|/√s` peaks.
pub fn weight_support<W: Fn(f64) -> f64>(w: &W) -> (Option<f64>, f64) {
    let samples: Vec<(f64, f64)> = (-20..=60)
        .map(|j| {
            let s = 2f64.powi(j);
            (s, w(s).abs())
        })
        .collect();
    let argmax = |g: &dyn Fn(f64, f64) -> f64| {
        let mut best = (0.0f64, samples[0].0);
        for &(s, v) in &samples {
            let val = g(s, v);
            if val > best.0 {
                best = (val, s);
            }
        }
        best
    };
    let (mass_peak, mass_at) = argmax(&|s, v| s * v);
    let (_, amp_at) = argmax(&|s, v| v / s.sqrt());
    let mut support = None;
    for (i, &(s, _)) in samples.iter().enumerate() {
        if s > mass_at && samples[i..].iter().all(|&(u, v)| u * v <= SUPPORT_CUTOFF * mass_peak) {
            support = Some(s);
            break;
        }
    }
    (support, amp_at)
}

/// Repeated pairwise averaging of the last `depth + 1` partial sums.
fn averaged(sums: &[f64], depth: usize) -> f64 {
    let n = sums.len();
    let d = depth.min(n - 1);
    let mut row: Vec<f64> = sums[n - 1 - d..].to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    }
    row[0]
}

/// `∫_0^∞ J_ν(r s) w(s) ds` by zero panels and averaging.
pub fn bessel_weight_integral<W>(nu: f64, r: f64, w: &W, opts: &OracleOptions) -> Result<OracleValue>
where
    W: Fn(f64) -> f64 + Sync,
{
    if !(r > 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!("oracle radius must be positive, got {r}")));
    }
    let (support, peak_at) = weight_support(w);
    let mut plan = OscillatoryPlan::new(nu, r, opts.depth);
    let f = |s: f64| bessel_j(nu, r * s) * w(s);
    let upper = support.unwrap_or(f64::INFINITY);

    let mut sums: Vec<f64> = Vec::new();
    let mut panel_err = 0.0;
    let mut biggest = 0.0f64;
    let mut last_panel = 0.0f64;
    let mut violations = 0usize;
    let mut history: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let mut bounds = Vec::with_capacity(BATCH);
        let mut reached_end = false;
        for j in k..k + BATCH {
            let lo = if j == 0 { 0.0 } else { plan.boundary(j - 1) };
            let hi = plan.boundary(j);
            if lo >= upper {
                reached_end = true;
                break;
            }
            bounds.push((lo, hi.min(upper)));
            if hi >= upper {
                reached_end = true;
                break;
            }
        }
        let scale = biggest;
        let pieces: Vec<_> = bounds
            .par_iter()
            .map(|&(a, b)| integrate(f, a, b, 1e-3 * opts.panel_tol * scale, opts.panel_tol, 400))
            .collect();
        for (idx, q) in pieces.iter().enumerate() {
            let j = k + idx;
            let running = sums.last().copied().unwrap_or(0.0) + q.value;
            sums.push(running);
            panel_err += q.error;
            biggest = biggest.max(q.value.abs()).max(running.abs());
            if opts.expect_alternation && j >= 2 && q.value != 0.0 && last_panel != 0.0 {
                let (b_lo, b_hi) = bounds[idx];
                // the last panel may be cut short by the support
                if b_hi - b_lo > 0.0 && q.value.signum() == last_panel.signum() && b_hi < upper {
                    violations += 1;
                }
            }
            last_panel = q.value;
            let (_, hi) = bounds[idx];
            if sums.len() >= 4 && hi > 2.0 * peak_at {
                let depth = opts.depth.min(sums.len() - 2);
                let acc = averaged(&sums[1..], depth);
                history.push(acc);
                let floor = 256.0 * f64::EPSILON * biggest;
                if history.len() >= 3 {
                    let h = history.len();
                    let d1 = (history[h - 1] - history[h - 2]).abs();
                    let d2 = (history[h - 2] - history[h - 3]).abs();
                    let target = opts.tol * acc.abs() + floor;
                    if d1 <= target && d2 <= target {
                        debug_assert!(violations == 0, "panel sums failed to alternate");
                        return Ok(OracleValue {
                            value: acc,
                            est_error: d1.max(d2) + panel_err + floor,
                            panels: sums.len(),
                            accelerated: true,
                        });
                    }
                }
            }
        }
        k += bounds.len();
        if reached_end {
            let value = *sums.last().unwrap_or(&0.0);
            debug_assert!(violations == 0, "panel sums failed to alternate");
            return Ok(OracleValue {
                value,
                est_error: panel_err + 64.0 * f64::EPSILON * biggest,
                panels: sums.len(),
                accelerated: false,
            });
        }
        if k >= opts.max_panels {
            let h = history.len();
            let last_change = if h >= 2 {
                (history[h - 1] - history[h - 2]).abs()
            } else {
                f64::INFINITY
            };
            return Err(KernelError::NonConvergent {
                what: "oscillatory panel sum",
                last_change,
                iterations: k,
            });
        }
    }
}

/// `(2π)^{-d/2} r^{1-d/2} ∫_0^∞ J_{d/2-1}(rs) w(s) ds`.
pub fn hankel_oracle<W>(weight: &W, d: u32, r: f64, opts: &OracleOptions) -> Result<OracleValue>
where
    W: Fn(f64) -> f64 + Sync,
{
    if d < 2 {
        return Err(KernelError::Domain(format!("dimension must be at least 2, got {d}")));
    }
    let nu = 0.5 * d as f64 - 1.0;
    let inner = bessel_weight_integral(nu, r, weight, opts)?;
    let pre = (2.0 * PI).powf(-0.5 * d as f64) * r.powf(1.0 - 0.5 * d as f64);
    Ok(OracleValue {
        value: pre * inner.value,
        est_error: pre * inner.est_error,
        ..inner
    })
}

/// `s^{d/2+β} e^{-t s^α}`, the weight of the stable kernel.
pub fn stable_weight(d: u32, alpha: f64, beta: f64, t: f64) -> impl Fn(f64) -> f64 + Sync + Copy {
    let p = 0.5 * d as f64 + beta;
    move |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        (p * s.ln() - t * s.powf(alpha)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// `ω_{d-1} ∫_0^∞ K(r) r^{d-1} dr`.
    pub total: f64,
    pub est_error: f64,
    /// Radius where quadrature hands over to the analytic tail.
    pub cutoff: f64,
    pub tail: f64,
}

/// Total mass of a `β = 0` kernel: oracle values integrated on `[0, R]`
/// plus the residue expansion integrated term by term on `[R, ∞)`.
pub fn normalization_check(spec: &KernelSpec) -> Result<Normalization> {
    spec.validate()?;
    if spec.beta != 0.0 {
        return Err(KernelError::Domain(
            "normalization applies to densities (beta = 0)".into(),
        ));
    }
    let d = spec.df();
    let scale = spec.t.powf(1.0 / spec.alpha);
    let (cutoff, tail, tail_err) = if spec.alpha >= 2.0 {
        (40.0 * scale, 0.0, 0.0)
    } else {
        let cutoff = 20.0 * scale;
        // ∫_R^∞ c r^{-E} r^{d-1} dr = c R^{d-E}/(E-d)
        let s = stable_series(spec, cutoff, None)?;
        let mut tail = 0.0;
        let mut last = 0.0f64;
        for term in s.terms.iter().filter(|t| !t.vanished) {
            let p = term.exponent - d;
            last = term.coefficient * cutoff.powf(-p) / p;
            tail += last;
        }
        let omitted = s.approx.est_error * cutoff.powf(d) / spec.alpha;
        (cutoff, tail, omitted + last.abs() * f64::EPSILON)
    };
    let w = stable_weight(spec.d, spec.alpha, 0.0, spec.t);
    let opts = OracleOptions {
        tol: 1e-11,
        ..OracleOptions::default()
    };
    let failure = std::sync::Mutex::new(None);
    let radial = |r: f64| match hankel_oracle(&w, spec.d, r, &opts) {
        Ok(v) => v.value * r.powf(d - 1.0),
        Err(e) => {
            failure.lock().expect("unpoisoned").get_or_insert(e);
            0.0
        }
    };
    let q = integrate(radial, 0.0, cutoff, 0.0, 1e-10, 2000);
    if let Some(e) = failure.into_inner().expect("unpoisoned") {
        return Err(e);
    }
    if !q.converged {
        return Err(KernelError::NonConvergent {
            what: "normalization quadrature",
            last_change: q.error,
            iterations: q.evaluations,
        });
    }
    let sphere = 2.0 * PI.powf(0.5 * d) / gamma_f64(0.5 * d)?;
    Ok(Normalization {
        total: sphere * (q.value + tail),
        est_error: sphere * (q.error + tail_err),
        cutoff,
        tail: sphere * tail,
    })
}
