//! Bessel functions of the first kind, `J_ν(x)` for real `ν >= 0`, `x >= 0`.
//!
//! Two regimes: the ascending series (summed in double-double so the
//! alternating cancellation costs nothing) below [`x_switch`], and the
//! Hankel large-argument expansion above it. For higher orders the window
//! `max(25, ν) < x <= 2ν²` is too wide for either, so there `J_ν` comes from
//! upward recurrence out of the two lowest orders, which is stable for `x > ν`.

use std::f64::consts::PI;

use super::dd::DoubleDouble;
use super::gamma::gamma_f64;

/// Crossover between the ascending series and the large-argument expansion.
pub fn x_switch(nu: f64) -> f64 {
    (2.0 * nu * nu).max(25.0)
}

/// `J_ν(x)`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0, "bessel_j needs nu >= 0, x >= 0");
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x > x_switch(nu) {
        bessel_j_asymptotic(nu, x)
    } else if x <= SERIES_SAFE.max(nu) {
        bessel_j_series(nu, x)
    } else {
        bessel_j_upward(nu, x)
    }
}

/// Beyond this the series terms exceed the sum by more than double-double absorbs.
const SERIES_SAFE: f64 = 25.0;

/// `J_ν(x)` from `J_{ν₀}`, `J_{ν₀+1}` (`ν₀ = ν mod 1`) by
/// `J_{n+1} = (2n/x) J_n - J_{n-1}`; only valid for `x > ν`.
fn bessel_j_upward(nu: f64, x: f64) -> f64 {
    let base = nu - nu.floor();
    let steps = (nu - base).round() as usize;
    let mut prev = bessel_j(base, x);
    if steps == 0 {
        return prev;
    }
    let mut cur = bessel_j(base + 1.0, x);
    for i in 1..steps {
        let n = base + i as f64;
        let next = 2.0 * n / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Ascending series `Σ (-1)^k (x/2)^{2k+ν} / (k! Γ(k+ν+1))`.
pub fn bessel_j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu == 0.0 {
        1.0
    } else {
        half.powf(nu) / gamma_f64(nu + 1.0).expect("nu >= 0 is never a pole")
    };
    let (q_hi, q_lo) = {
        let p = half * half;
        (p, half.mul_add(half, -p))
    };
    let q = DoubleDouble { hi: q_hi, lo: q_lo };
    let mut term = DoubleDouble::from_f64(1.0);
    let mut sum = term;
    let mut biggest: f64 = 1.0;
    let mut k = 0.0;
    loop {
        term = term.mul(q).neg().div_f64((k + 1.0) * (k + nu + 1.0));
        sum = sum.add(term);
        k += 1.0;
        let mag = term.abs_hi();
        biggest = biggest.max(mag);
        if k > half && mag < 1e-34 * biggest {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    lead * sum.to_f64()
}

/// Hankel expansion `√(2/(πx)) (P cos ω − Q sin ω)`, `ω = x − νπ/2 − π/4`,
/// truncated at its smallest term.
pub fn bessel_j_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        let mag = term.abs();
        if mag == 0.0 {
            break;
        }
        if mag > last {
            break;
        }
        // signs: P takes (-1)^{k/2} on even k, Q takes (-1)^{(k-1)/2} on odd k
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        last = mag;
        if mag < 1e-17 * p.abs().max(q.abs()) {
            break;
        }
    }
    let omega = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin())
}

/// `dJ_ν/dx`.
pub fn bessel_j_deriv(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 1.0 { 0.5 } else { 0.0 };
    }
    nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x)
}

/// McMahon's large-zero expansion for the `m`-th positive zero of `J_ν`.
fn mcmahon_guess(nu: f64, m: usize) -> f64 {
    let mu = 4.0 * nu * nu;
    let b = (m as f64 + 0.5 * nu - 0.25) * PI;
    let e = 8.0 * b;
    b - (mu - 1.0) / e
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e.powi(5))
}

/// The `m`-th positive zero `j_{ν,m}` (`m >= 1`), McMahon guess polished by
/// safeguarded Newton steps on [`bessel_j`].
pub fn bessel_j_zero(nu: f64, m: usize) -> f64 {
    assert!(m >= 1, "zeros are numbered from 1");
    let guess = mcmahon_guess(nu, m);
    let mut x = guess;
    for _ in 0..50 {
        let f = bessel_j(nu, x);
        let df = bessel_j_deriv(nu, x);
        if df == 0.0 {
            break;
        }
        let step = f / df;
        let next = x - step.clamp(-0.5, 0.5);
        if (next - x).abs() <= 1e-15 * x.abs() {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// Zeros `j_{ν,from}, …, j_{ν,to}` (inclusive, numbered from 1).
pub fn bessel_j_zeros_range(nu: f64, from: usize, to: usize) -> Vec<f64> {
    const POLISHED: usize = 40;
    (from.max(1)..=to)
        .map(|m| {
            if m <= POLISHED {
                bessel_j_zero(nu, m)
            } else {
                mcmahon_guess(nu, m)
            }
        })
        .collect()
}

/// Zeros `j_{ν,1} < j_{ν,2} < …` up to `count` of them.
///
/// Beyond the first few the McMahon expansion alone is accurate to well
/// below the quadrature tolerance, so only the early zeros get polished.
pub fn bessel_j_zeros(nu: f64, count: usize) -> Vec<f64> {
    bessel_j_zeros_range(nu, 1, count)
}
