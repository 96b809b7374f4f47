//! Vertical-line (Mellin–Barnes) quadrature.
//!
//! Every integral here is `(1/2πi) ∫_{c-i∞}^{c+i∞} f(z) dz = (1/2π) ∫ f(c+iv) dv`,
//! truncated to `|v| <= T` and discretised either by the trapezoid rule
//! (spectrally accurate for analytic, exponentially decaying `f`) or by
//! Gauss–Legendre panels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::quad::gauss_legendre;
use crate::specfun::{ln_gamma, ComplexValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Trapezoid,
    GaussLegendrePanels,
}

/// One quadrature plan for a vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub abscissa: f64,
    pub half_height: f64,
    /// Trapezoid: intervals on `[0, T]`. Panels: number of panels on `[-T, T]`.
    pub nodes: usize,
    pub rule: Rule,
}

pub const MIN_NODES: usize = 16;
/// Initial node cap for [`integrate_line`]; refinement may still grow it 64-fold.
pub const MAX_NODES: usize = 1 << 16;
const PANEL_ORDER: usize = 16;

impl ContourSpec {
    pub fn trapezoid(abscissa: f64, half_height: f64, nodes: usize) -> Self {
        Self {
            abscissa,
            half_height,
            nodes: nodes.max(MIN_NODES),
            rule: Rule::Trapezoid,
        }
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_height > 0.0 && self.half_height.is_finite()) {
            return Err(KernelError::Domain(format!(
                "contour half-height must be positive, got {}",
                self.half_height
            )));
        }
        if self.nodes < MIN_NODES {
            return Err(KernelError::Domain(format!(
                "contour needs at least {MIN_NODES} nodes, got {}",
                self.nodes
            )));
        }
        if !self.abscissa.is_finite() {
            return Err(KernelError::NonFinite("contour abscissa"));
        }
        Ok(())
    }
}

/// How a kernel evaluation places its vertical line.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contour {
    /// Abscissa, height and node count all chosen by the evaluator.
    #[default]
    Auto,
    /// Fixed abscissa; height and node count chosen adaptively.
    Abscissa(f64),
    Fixed(ContourSpec),
}

impl Contour {
    pub fn abscissa(&self) -> Option<f64> {
        match self {
            Contour::Auto => None,
            Contour::Abscissa(c) => Some(*c),
            Contour::Fixed(cs) => Some(cs.abscissa),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineIntegralResult {
    pub value: ComplexValue,
    pub tail_bound: f64,
    pub discretization_estimate: f64,
    /// Integrand evaluations spent on the final accepted rule.
    pub nodes_used: usize,
    pub half_height: f64,
    /// `(1/2π) ∫ |f|`, the scale against which cancellation is judged.
    pub abs_integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineOptions {
    pub tol: f64,
    pub max_refinements: usize,
    /// `f(conj z) = conj f(z)`: only the upper half-line is sampled and the
    /// result is exactly real.
    pub conjugate_symmetric: bool,
}

impl Default for LineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_refinements: 6,
            conjugate_symmetric: false,
        }
    }
}

impl LineOptions {
    pub fn symmetric(tol: f64) -> Self {
        Self {
            tol,
            conjugate_symmetric: true,
            ..Self::default()
        }
    }
}

fn point(c: f64, v: f64) -> Complex64 {
    Complex64::new(c, v)
}

fn eval_all<F>(f: &F, c: f64, vs: &[f64]) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let vals: Vec<Complex64> = vs.par_iter().map(|&v| f(point(c, v))).collect();
    if let Some(bad) = vals.iter().position(|w| !(w.re.is_finite() && w.im.is_finite())) {
        let _ = bad;
        return Err(KernelError::NonFinite("line integrand"));
    }
    Ok(vals)
}

/// Accumulates trapezoid sums on a fixed `T`, halving `h` while keeping
/// every node already evaluated.
struct Trapezoid {
    h: f64,
    // weighted sum of f over the current node set, without the factor h
    sum: Complex64,
    abs: f64,
    count: usize,
}

impl Trapezoid {
    fn start<F>(f: &F, c: f64, t: f64, n: usize, symmetric: bool) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let h = t / n as f64;
        let vs: Vec<f64> = if symmetric {
            (0..=n).map(|j| j as f64 * h).collect()
        } else {
            (0..=2 * n).map(|j| (j as f64 - n as f64) * h).collect()
        };
        let vals = eval_all(f, c, &vs)?;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let last = vals.len() - 1;
        for (j, w) in vals.iter().enumerate() {
            let weight = if symmetric {
                if j == 0 || j == last {
                    1.0
                } else {
                    2.0
                }
            } else if j == 0 || j == last {
                0.5
            } else {
                1.0
            };
            if symmetric {
                sum += Complex64::new(weight * w.re, 0.0);
            } else {
                sum += w * weight;
            }
            abs += weight * w.norm();
        }
        Ok(Self {
            h,
            sum,
            abs,
            count: vals.len(),
        })
    }

    fn value(&self) -> Complex64 {
        self.sum * (self.h / (2.0 * PI))
    }

    fn abs_integral(&self) -> f64 {
        self.abs * self.h / (2.0 * PI)
    }

    fn refine<F>(&mut self, f: &F, c: f64, t: f64, symmetric: bool) -> Result<()>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let half = 0.5 * self.h;
        let intervals = (t / self.h).round() as usize;
        let vs: Vec<f64> = if symmetric {
            (0..intervals).map(|j| (2 * j + 1) as f64 * half).collect()
        } else {
            (0..2 * intervals).map(|j| -t + (2 * j + 1) as f64 * half).collect()
        };
        let vals = eval_all(f, c, &vs)?;
        let weight = if symmetric { 2.0 } else { 1.0 };
        for w in &vals {
            if symmetric {
                self.sum += Complex64::new(weight * w.re, 0.0);
            } else {
                self.sum += w;
            }
            self.abs += weight * w.norm();
        }
        self.h = half;
        self.count += vals.len();
        Ok(())
    }
}

fn panel_sum<F>(f: &F, c: f64, t: f64, panels: usize, symmetric: bool) -> Result<(Complex64, f64, usize)>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let (x, w) = gauss_legendre(PANEL_ORDER);
    let (lo, width) = if symmetric {
        (0.0, t / panels as f64)
    } else {
        (-t, 2.0 * t / panels as f64)
    };
    let mut vs = Vec::with_capacity(panels * PANEL_ORDER);
    let mut ws = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        for (xi, wi) in x.iter().zip(&w) {
            vs.push(mid + 0.5 * width * xi);
            ws.push(0.5 * width * wi);
        }
    }
    let vals = eval_all(f, c, &vs)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (val, wt) in vals.iter().zip(&ws) {
        if symmetric {
            sum += Complex64::new(2.0 * wt * val.re, 0.0);
            abs += 2.0 * wt * val.norm();
        } else {
            sum += val * *wt;
            abs += wt * val.norm();
        }
    }
    Ok((sum / (2.0 * PI), abs / (2.0 * PI), vals.len()))
}

fn decay_check<F>(f: &F, c: f64, t: f64, symmetric: bool) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let mut tail = 0.0;
    let signs: &[f64] = if symmetric { &[1.0] } else { &[1.0, -1.0] };
    for &s in signs {
        let near = f(point(c, s * 0.5 * t)).norm();
        let far = f(point(c, s * t)).norm();
        if !(far.is_finite() && near.is_finite()) {
            return Err(KernelError::NonFinite("line integrand"));
        }
        if far > near {
            return Err(KernelError::NoDecay {
                abscissa: c,
                height: t,
                near,
                far,
            });
        }
        // exponential fit through the two samples bounds what lies beyond T
        let side = if far == 0.0 {
            0.0
        } else if far < near {
            let rate = (near / far).ln() / (0.5 * t);
            far / rate
        } else {
            far * t
        };
        tail += if symmetric { 2.0 * side } else { side };
    }
    Ok(tail / (2.0 * PI))
}

/// `(1/2πi) ∫_{(c)} f(z) dz` truncated to `|Im z| <= T`.
///
/// The rule is refined (`N → 2N`) until successive values agree to
/// `tol·|value|` plus a rounding floor proportional to `∫|f|`; failure after
/// `max_refinements` doublings is reported as `NonConvergent`.
pub fn vertical_line_integral<F>(f: F, contour: &ContourSpec, opts: &LineOptions) -> Result<LineIntegralResult>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    contour.validate()?;
    let c = contour.abscissa;
    let t = contour.half_height;
    let sym = opts.conjugate_symmetric;
    let tail_bound = decay_check(&f, c, t, sym)?;
    let floor = |abs: f64| 64.0 * f64::EPSILON * abs;
    match contour.rule {
        Rule::Trapezoid => {
            let mut trap = Trapezoid::start(&f, c, t, contour.nodes, sym)?;
            let mut prev = trap.value();
            let mut last_change = f64::INFINITY;
            for _ in 0..opts.max_refinements {
                trap.refine(&f, c, t, sym)?;
                let cur = trap.value();
                let change = (cur - prev).norm();
                last_change = change;
                if change <= opts.tol * cur.norm() + floor(trap.abs_integral()) {
                    return Ok(LineIntegralResult {
                        value: cur,
                        tail_bound,
                        discretization_estimate: change,
                        nodes_used: trap.count,
                        half_height: t,
                        abs_integral: trap.abs_integral(),
                    });
                }
                prev = cur;
            }
            Err(KernelError::NonConvergent {
                what: "vertical-line trapezoid rule",
                last_change,
                iterations: opts.max_refinements,
            })
        }
        Rule::GaussLegendrePanels => {
            let mut panels = (contour.nodes / 4).max(2);
            let (mut prev, _, _) = panel_sum(&f, c, t, panels, sym)?;
            let mut last_change = f64::INFINITY;
            for _ in 0..opts.max_refinements {
                panels *= 2;
                let (cur, abs, used) = panel_sum(&f, c, t, panels, sym)?;
                let change = (cur - prev).norm();
                last_change = change;
                if change <= opts.tol * cur.norm() + floor(abs) {
                    return Ok(LineIntegralResult {
                        value: cur,
                        tail_bound,
                        discretization_estimate: change,
                        nodes_used: used,
                        half_height: t,
                        abs_integral: abs,
                    });
                }
                prev = cur;
            }
            Err(KernelError::NonConvergent {
                what: "vertical-line panel rule",
                last_change,
                iterations: opts.max_refinements,
            })
        }
    }
}

/// Ladder of truncation heights tried by [`auto_truncation`].
pub const TRUNCATION_LADDER: [f64; 9] = [16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0];

/// Smallest `T` on the ladder with `|f(c+iT)|·T < tol·|f(c)|`.
pub fn auto_truncation<F>(f: F, c: f64, tol: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    let base = f(point(c, 0.0)).norm();
    if !base.is_finite() {
        return Err(KernelError::NonFinite("line integrand"));
    }
    let mut last = (0.0, 0.0, 0.0);
    for &t in &TRUNCATION_LADDER {
        let far = f(point(c, t)).norm().max(f(point(c, -t)).norm());
        let near = f(point(c, 0.5 * t)).norm().max(f(point(c, -0.5 * t)).norm());
        if far * t < tol * base {
            return Ok(t);
        }
        if far >= near {
            return Err(KernelError::NoDecay {
                abscissa: c,
                height: t,
                near,
                far,
            });
        }
        last = (t, near, far);
    }
    Err(KernelError::NoDecay {
        abscissa: c,
        height: last.0,
        near: last.1,
        far: last.2,
    })
}

/// Integrates along `Re z = c` choosing `T` from the ladder and the node
/// count from `h0`, then doubles `T` while the tail estimate is not
/// negligible against the value (the value can be far smaller than `∫|f|`).
pub fn integrate_line<F>(f: F, c: f64, h0: f64, opts: &LineOptions) -> Result<LineIntegralResult>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let mut t = auto_truncation(&f, c, opts.tol * 1e-3)?;
    loop {
        let want = (t / h0).ceil();
        if !(want <= MAX_NODES as f64) {
            // h0 tracks the distance to the nearest pole
            return Err(KernelError::Domain(format!(
                "abscissa {c} is too close to a pole: step {h0:e} would need {want:e} nodes"
            )));
        }
        let nodes = (want as usize).max(MIN_NODES);
        let res = vertical_line_integral(&f, &ContourSpec::trapezoid(c, t, nodes), opts)?;
        if res.tail_bound <= 0.1 * opts.tol * res.value.norm() || t >= 4096.0 {
            return Ok(res);
        }
        t *= 2.0;
    }
}

/// Right-hand side of the Mellin transform of `r^{-ν} J_ν(r)`:
/// `2^{z-ν-1} Γ(z/2) / Γ(ν - z/2 + 1)`, valid for `0 < Re z < ν + 3/2`.
pub fn mellin_bessel_rhs(z: ComplexValue, nu: f64) -> Result<ComplexValue> {
    let upper = nu + 1.5;
    if !(z.re > 0.0 && z.re < upper) {
        return Err(KernelError::StripViolation {
            abscissa: z.re,
            lower: 0.0,
            upper,
        });
    }
    let num = ln_gamma(z * 0.5)?;
    let den = ln_gamma(Complex64::new(nu + 1.0, 0.0) - z * 0.5)?;
    let ln = (z - nu - 1.0) * std::f64::consts::LN_2 + num.ln() - den.ln();
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;

    fn gamma_power(r: f64) -> impl Fn(Complex64) -> Complex64 + Sync {
        move |z: Complex64| {
            let g = ln_gamma(z).unwrap();
            (g.ln() - z * r.ln()).exp()
        }
    }

    #[test]
    fn inverse_mellin_of_gamma_is_exponential() {
        for r in [1.0, 2.0] {
            let c = ContourSpec::trapezoid(1.0, 64.0, 128);
            let res = vertical_line_integral(gamma_power(r), &c, &LineOptions::default()).unwrap();
            assert!((res.value.re - (-r).exp()).abs() < 1e-12, "r={r}: {}", res.value);
            assert!(res.value.im.abs() <= 1e-10 * res.value.norm());
            let sym = vertical_line_integral(gamma_power(r), &c, &LineOptions::symmetric(1e-10)).unwrap();
            assert!((sym.value.re - (-r).exp()).abs() < 1e-12);
            assert_eq!(sym.value.im, 0.0);
        }
    }

    #[test]
    fn panels_agree_with_trapezoid() {
        let c = ContourSpec::trapezoid(1.0, 64.0, 64).with_rule(Rule::GaussLegendrePanels);
        let res = vertical_line_integral(gamma_power(2.0), &c, &LineOptions::default()).unwrap();
        assert!((res.value.re - (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn growing_integrand_is_rejected() {
        let c = ContourSpec::trapezoid(1.0, 20.0, 32);
        let err = vertical_line_integral(
            |z: Complex64| Complex64::new(z.im * z.im, 0.0),
            &c,
            &LineOptions::default(),
        );
        assert!(matches!(err, Err(KernelError::NoDecay { .. })));
    }

    #[test]
    fn truncation_ladder() {
        let t = auto_truncation(
            |z: Complex64| Complex64::new((-PI * z.im.abs() / 4.0).exp(), 0.0),
            0.0,
            1e-12,
        )
        .unwrap();
        assert_eq!(t, 64.0);
        let t = auto_truncation(|z: Complex64| gamma(z).unwrap(), 1.0, 1e-10).unwrap();
        assert!(t <= 64.0);
        let err = auto_truncation(|_z: Complex64| Complex64::new(1.0, 0.0), 1.0, 1e-10);
        assert!(matches!(err, Err(KernelError::NoDecay { .. })));
    }

    #[test]
    fn refinement_differences_shrink() {
        let f = gamma_power(3.0);
        let mut trap = Trapezoid::start(&f, 0.7, 48.0, 64, true).unwrap();
        let mut prev = trap.value();
        let mut diffs = Vec::new();
        for _ in 0..4 {
            trap.refine(&f, 0.7, 48.0, true).unwrap();
            let cur = trap.value();
            diffs.push((cur - prev).norm());
            prev = cur;
        }
        for w in diffs.windows(2) {
            if w[0] > 1e-14 {
                assert!(w[1] * 4.0 <= w[0], "{diffs:?}");
            }
        }
    }

    #[test]
    fn bessel_mellin_rhs() {
        let v = mellin_bessel_rhs(Complex64::new(2.0, 0.0), 1.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15);
        let v = mellin_bessel_rhs(Complex64::new(1.0, 0.0), 0.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
        // 2^{-1/2} Γ(1/4)/Γ(3/4)
        let v = mellin_bessel_rhs(Complex64::new(0.5, 0.0), 0.0).unwrap();
        assert!((v.re - 2.092_099_240_106_203).abs() < 1e-13, "{v}");
        assert!(matches!(
            mellin_bessel_rhs(Complex64::new(1.6, 0.0), 0.0),
            Err(KernelError::StripViolation { .. })
        ));
    }
}
