//! Kernels of general radial symbols,
//! `K^β(t, x) = (2π)^{-d} ∫ e^{-ix·ξ} |ξ|^β e^{-tη(|ξ|)} dξ`.

mod kernel;
mod mellin_k;
mod symbol;
mod tail;

pub use kernel::{
    default_k, general_kernel_mb, general_leading_term, general_strip, perturbed_leading_term, symbol_oracle,
    LeadingTerm,
};
pub use mellin_k::{cache_len, clear_cache, mellin_mk, mellin_transform};
pub use symbol::{
    a_bound, derivative_check, falling, log_growth_ok, registry, RadialSymbol, RegistryEntry, SymbolSpec, BUILTIN_ORDER,
};
pub use tail::{decay_slope, smoothstep, tail_integral, Cutoff};

use crate::error::{KernelError, Result};

/// Complete Bell polynomials `B_0 .. B_m` of `x[0] = x_1, x[1] = x_2, …`.
pub fn bell_polynomials(x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let mut b = vec![0.0; m + 1];
    b[0] = 1.0;
    for n in 0..m {
        // B_{n+1} = Σ_i C(n,i) B_{n-i} x_{i+1}
        let mut binom = 1.0;
        let mut s = 0.0;
        for i in 0..=n {
            s += binom * b[n - i] * x[i];
            binom = binom * (n - i) as f64 / (i + 1) as f64;
        }
        b[n + 1] = s;
    }
    b
}

/// `D^j (e^{-tη(r)})` for `j = 0..=m`.
pub fn exp_eta_jet<S: RadialSymbol + ?Sized>(sym: &S, t: f64, r: f64, m: usize) -> Result<Vec<f64>> {
    if m > sym.max_order() {
        return Err(KernelError::OrderExceeded {
            requested: m,
            available: sym.max_order(),
        });
    }
    let x: Vec<f64> = (1..=m).map(|j| -t * sym.eta_deriv(r, j)).collect();
    let e = (-t * sym.eta(r)).exp();
    Ok(bell_polynomials(&x).into_iter().map(|b| b * e).collect())
}

/// `D^m (e^{-tη(r)})` by Faà di Bruno's formula.
pub fn exp_eta_derivative<S: RadialSymbol + ?Sized>(sym: &S, t: f64, r: f64, m: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(KernelError::Domain(format!("derivatives need r > 0, got {r}")));
    }
    let v = exp_eta_jet(sym, t, r, m)?[m];
    #[cfg(debug_assertions)]
    if m > 0 && (1e-4..=1e4).contains(&r) {
        let a = cached_a_bound(sym, m);
        let bound = derivative_bound(sym, t, r, m, a);
        debug_assert!(
            (r.powi(m as i32) * v).abs() <= 1.01 * bound + f64::MIN_POSITIVE,
            "derivative bound violated: {} t={t} r={r} m={m}",
            sym.id()
        );
    }
    Ok(v)
}

#[cfg(debug_assertions)]
fn cached_a_bound<S: RadialSymbol + ?Sized>(sym: &S, k: usize) -> f64 {
    use std::collections::HashMap;
    use std::sync::{LazyLock, RwLock};
    static TABLE: LazyLock<RwLock<HashMap<(String, usize), f64>>> = LazyLock::new(Default::default);
    let key = (sym.id(), k);
    if let Some(&a) = TABLE.read().expect("bound table").get(&key) {
        return a;
    }
    let a = a_bound(sym, k);
    TABLE.write().expect("bound table").insert(key, a);
    a
}

/// Right side of `|r^m D^m e^{-tη}| <= (Atr^α + … + (Atr^α)^m) e^{-tη}`.
pub fn derivative_bound<S: RadialSymbol + ?Sized>(sym: &S, t: f64, r: f64, m: usize, a: f64) -> f64 {
    let q = a * t * r.powf(sym.alpha_index());
    let mut s = 0.0;
    let mut p = 1.0;
    for _ in 0..m {
        p *= q;
        s += p;
    }
    s * (-t * sym.eta(r)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_small_orders() {
        let b = bell_polynomials(&[2.0, 3.0, 5.0]);
        // B1 = x1, B2 = x1² + x2, B3 = x1³ + 3x1x2 + x3
        assert_eq!(b, vec![1.0, 2.0, 7.0, 8.0 + 18.0 + 5.0]);
    }

    #[test]
    fn exp_derivative_examples() {
        let s = SymbolSpec::Stable { alpha: 1.5 };
        let e0 = exp_eta_derivative(&s, 2.0, 0.7, 0).unwrap();
        assert!((e0 - (-2.0 * 0.7f64.powf(1.5)).exp()).abs() < 1e-16);
        let e1 = exp_eta_derivative(&s, 2.0, 0.7, 1).unwrap();
        assert!((e1 + 2.0 * 1.5 * 0.7f64.sqrt() * e0).abs() < 1e-15);
        // η = r², t = 1, m = 2 at r = 1: (4r² - 2)e^{-r²} = 2/e
        let sq = SymbolSpec::Perturbed {
            alpha: 1.0,
            c: 1.0,
            delta: 2.0,
        };
        let pure = PureSquare;
        let v = exp_eta_derivative(&pure, 1.0, 1.0, 2).unwrap();
        assert!((v - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(matches!(
            exp_eta_derivative(&sq, 1.0, 1.0, BUILTIN_ORDER + 1),
            Err(KernelError::OrderExceeded { .. })
        ));
    }

    struct PureSquare;

    impl RadialSymbol for PureSquare {
        fn id(&self) -> String {
            "square".into()
        }
        fn eta(&self, r: f64) -> f64 {
            r * r
        }
        fn eta_deriv(&self, r: f64, m: usize) -> f64 {
            match m {
                0 => r * r,
                1 => 2.0 * r,
                2 => 2.0,
                _ => 0.0,
            }
        }
        fn max_order(&self) -> usize {
            usize::MAX
        }
        fn alpha_index(&self) -> f64 {
            2.0
        }
    }
}
