//! `M_t^k(z) = ∫_0^∞ D^k(e^{-tη(r)}) r^{z+k-1} dr`, computed after `r = e^u`.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_complex::Complex64;

use crate::error::{KernelError, Result};
use crate::quad::integrate;
use crate::specfun::ln_gamma;

use super::{exp_eta_jet, RadialSymbol};

type Key = (String, u64, usize, u64, u64);

static CACHE: LazyLock<RwLock<HashMap<Key, Complex64>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

pub fn clear_cache() {
    CACHE.write().expect("cache lock").clear();
}

pub fn cache_len() -> usize {
    CACHE.read().expect("cache lock").len()
}

const MAX_SEGMENTS: usize = 4000;
const U_LIMIT: f64 = 400.0;

/// `|D^k(e^{-tη(e^u)})| e^{(c+k)u}`, the modulus of the transformed integrand.
fn envelope<S: RadialSymbol + ?Sized>(sym: &S, t: f64, k: usize, c: f64, u: f64) -> f64 {
    let r = u.exp();
    match exp_eta_jet(sym, t, r, k) {
        Ok(j) => j[k].abs() * ((c + k as f64) * u).exp(),
        Err(_) => f64::NAN,
    }
}

/// Where the transformed integrand has dropped below `1e-18` of its peak on
/// both sides, scanning outwards from `u = 0` in unit steps.
fn support<S: RadialSymbol + ?Sized>(sym: &S, t: f64, k: usize, c: f64) -> Result<(f64, f64, f64)> {
    let mut peak = envelope(sym, t, k, c, 0.0);
    let mut ends = [0.0f64; 2];
    for (side, &dir) in [-1.0f64, 1.0].iter().enumerate() {
        let mut u = 0.0;
        let mut quiet = 0;
        loop {
            u += dir;
            if u.abs() > U_LIMIT {
                return Err(KernelError::NonConvergent {
                    what: "support scan of the Mellin integrand",
                    last_change: envelope(sym, t, k, c, u),
                    iterations: U_LIMIT as usize,
                });
            }
            let g = envelope(sym, t, k, c, u);
            if !g.is_finite() {
                // e^{-tη} has underflowed or the power has overflowed past the support
                if dir > 0.0 && u > 0.0 {
                    break;
                }
                return Err(KernelError::NonFinite("Mellin integrand"));
            }
            peak = peak.max(g);
            if g < 1e-18 * peak {
                quiet += 1;
                // two quiet steps in a row rule out an isolated zero of D^k
                if quiet == 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        ends[side] = u;
    }
    Ok((ends[0], ends[1], peak))
}

fn compute<S: RadialSymbol + ?Sized>(sym: &S, t: f64, z: Complex64, k: usize) -> Result<Complex64> {
    let (lo, hi, peak) = support(sym, t, k, z.re)?;
    let shift = z + k as f64;
    let f = |u: f64| -> Complex64 {
        let r = u.exp();
        match exp_eta_jet(sym, t, r, k) {
            Ok(j) => (shift * u).exp() * j[k],
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    // D^k is a sum of Bell terms whose rounding sits near 1e-15 of the peak;
    // asking for less than ten times that only burns segments
    let abs_tol = 1e-14 * peak * (hi - lo);
    let left = integrate(f, lo, 0.0, 0.5 * abs_tol, 1e-13, MAX_SEGMENTS);
    let right = integrate(f, 0.0, hi, 0.5 * abs_tol, 1e-13, MAX_SEGMENTS);
    let value = left.value + right.value;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(KernelError::NonFinite("Mellin integrand"));
    }
    if !(left.converged && right.converged) {
        // the oscillation e^{iv u} outran the segment budget
        let err = left.error + right.error;
        if err > 1e-9 * peak * (hi - lo) {
            return Err(KernelError::NonConvergent {
                what: "M_t^k quadrature",
                last_change: err,
                iterations: MAX_SEGMENTS,
            });
        }
    }
    Ok(value)
}

/// `M_t^k(z)`, memoised per symbol, `t`, `k` and `z`.
pub fn mellin_mk<S: RadialSymbol + ?Sized>(sym: &S, t: f64, z: Complex64, k: usize) -> Result<Complex64> {
    if k > sym.max_order() {
        return Err(KernelError::OrderExceeded {
            requested: k,
            available: sym.max_order(),
        });
    }
    if !(z.re > -sym.alpha_index()) {
        return Err(KernelError::Domain(format!(
            "M_t^k needs Re z > -alpha = {}, got {}",
            -sym.alpha_index(),
            z.re
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(KernelError::Domain(format!("t must be positive, got {t}")));
    }
    let key = (sym.id(), t.to_bits(), k, z.re.to_bits(), z.im.to_bits());
    if let Some(v) = CACHE.read().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let v = compute(sym, t, z, k)?;
    CACHE.write().expect("cache lock").insert(key, v);
    Ok(v)
}

/// `M_t(z) = (-1)^k Γ(z)/Γ(z+k) M_t^k(z)`, `Re z > 0`.
pub fn mellin_transform<S: RadialSymbol + ?Sized>(sym: &S, t: f64, z: Complex64, k: usize) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(KernelError::Domain(format!(
            "the Mellin transform needs Re z > 0, got {}",
            z.re
        )));
    }
    let ratio = (ln_gamma(z)?.ln() - ln_gamma(z + k as f64)?.ln()).exp();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(ratio * mellin_mk(sym, t, z, k)? * sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::SymbolSpec;
    use crate::specfun::gamma;

    #[test]
    fn value_at_origin_telescopes() {
        let sym = SymbolSpec::Stable { alpha: 1.3 };
        for k in [2usize, 3, 5] {
            let v = mellin_mk(&sym, 0.7, Complex64::new(0.0, 0.0), k).unwrap();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let fact: f64 = (1..k).map(|j| j as f64).product();
            assert!((v.re - sign * fact).abs() < 1e-9 * fact, "k={k}: {v}");
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn matches_known_transforms() {
        // η = r: M_t(z) = Γ(z) t^{-z}
        let sym = SymbolSpec::Stable { alpha: 1.0 };
        for z in [
            Complex64::new(0.8, 0.0),
            Complex64::new(1.5, 2.0),
            Complex64::new(2.0, -7.0),
        ] {
            let m = mellin_transform(&sym, 2.0, z, 2).unwrap();
            let exact = gamma(z).unwrap() * (-z * 2f64.ln()).exp();
            assert!((m - exact).norm() < 1e-10 * exact.norm(), "{z}: {m} vs {exact}");
        }
        // η = √r: M_1(1) = 2
        let sym = SymbolSpec::Stable { alpha: 0.5 };
        let m = mellin_transform(&sym, 1.0, Complex64::new(1.0, 0.0), 3).unwrap();
        assert!((m.re - 2.0).abs() < 1e-10 && m.im.abs() < 1e-12);
    }

    #[test]
    fn cache_returns_identical_values() {
        let sym = SymbolSpec::SumStable { a: 0.6, b: 1.4 };
        let z = Complex64::new(2.1, 3.25);
        let a = mellin_mk(&sym, 1.0, z, 4).unwrap();
        let before = cache_len();
        let b = mellin_mk(&sym, 1.0, z, 4).unwrap();
        assert_eq!(a, b);
        assert!(cache_len() >= before);
        assert!(mellin_mk(&sym, 1.0, Complex64::new(-0.7, 0.0), 4).is_err());
    }
}
