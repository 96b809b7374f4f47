use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::specfun::{ln_abs_gamma_f64, ln_rgamma_signed};

use super::{scaling_reduce, Approximation, Diagnostics, KernelSpec, Method, SeriesTerm};

const MAX_INDEX: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesApproximation {
    pub approx: Approximation,
    /// Every index visited up to the truncation point, with coefficients of
    /// `r^{-exponent}` in the original (unscaled) variable.
    pub terms: Vec<SeriesTerm>,
}

/// Unit-time residue at `z = -nα`:
/// `π^{-d/2} (-1)^n/n! Γ((d+β+nα)/2) 2^{β+nα} / Γ(-(nα+β)/2)`.
fn unit_term(spec: &KernelSpec, n: usize) -> SeriesTerm {
    let d = spec.df();
    let na = n as f64 * spec.alpha;
    let exponent = d + spec.beta + na;
    let (ln_rg, sign) = ln_rgamma_signed(-0.5 * (na + spec.beta));
    if sign == 0.0 {
        return SeriesTerm {
            n,
            exponent,
            coefficient: 0.0,
            vanished: true,
        };
    }
    let ln_fact = ln_abs_gamma_f64(n as f64 + 1.0).expect("n! is finite");
    let ln_g = ln_abs_gamma_f64(0.5 * exponent).expect("positive argument");
    let ln_mag = ln_g + (spec.beta + na) * LN_2 + ln_rg - ln_fact - 0.5 * d * PI.ln();
    let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    SeriesTerm {
        n,
        exponent,
        coefficient: parity * sign * ln_mag.exp(),
        vanished: false,
    }
}

/// Converts a unit-time term to the coefficient of `r^{-exponent}` at time `t`.
fn physical(spec: &KernelSpec, term: SeriesTerm) -> SeriesTerm {
    if spec.t == 1.0 || term.vanished {
        return term;
    }
    // t^{-(d+β)/α} (t^{-1/α} r)^{-E} = t^{(E-d-β)/α} r^{-E}
    let power = (term.exponent - spec.df() - spec.beta) / spec.alpha;
    SeriesTerm {
        coefficient: term.coefficient * spec.t.powf(power),
        ..term
    }
}

/// The first `count` non-vanished terms (and the vanished ones in between).
pub fn series_terms(spec: &KernelSpec, count: usize) -> Result<Vec<SeriesTerm>> {
    check(spec)?;
    let mut out = Vec::new();
    let mut kept = 0;
    for n in 0..MAX_INDEX {
        if kept == count {
            break;
        }
        let term = physical(spec, unit_term(spec, n));
        if !term.vanished {
            kept += 1;
        }
        out.push(term);
    }
    Ok(out)
}

fn check(spec: &KernelSpec) -> Result<()> {
    spec.validate()?;
    if spec.alpha >= 2.0 {
        return Err(KernelError::Domain(
            "every residue vanishes at alpha = 2; the expansion carries no information".into(),
        ));
    }
    Ok(())
}

/// Large-`r` residue expansion. With `n_terms = None` the series is cut just
/// before its first growing term; otherwise exactly `n_terms` non-vanished
/// terms are summed. `est_error` is the first omitted non-vanished term.
pub fn stable_series(spec: &KernelSpec, r: f64, n_terms: Option<usize>) -> Result<SeriesApproximation> {
    check(spec)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(KernelError::Domain(format!("r must be positive, got {r}")));
    }
    let scaled = scaling_reduce(spec, r);
    let unit = scaled.unit;
    let rr = scaled.r;
    let mut terms = Vec::new();
    let mut sum = 0.0f64;
    let mut kept = 0usize;
    let mut prev = f64::INFINITY;
    let mut omitted = None;
    let mut diverging = false;
    for n in 0..MAX_INDEX {
        let term = unit_term(&unit, n);
        if term.vanished {
            terms.push(physical(spec, term));
            continue;
        }
        let v = term.coefficient * rr.powf(-term.exponent);
        let mag = v.abs();
        match n_terms {
            Some(limit) if kept == limit => {
                omitted = Some(mag);
                break;
            }
            None if mag > prev => {
                omitted = Some(mag);
                break;
            }
            None if kept > 0 && mag <= 1e-18 * sum.abs() => {
                omitted = Some(mag);
                break;
            }
            _ => {}
        }
        if mag > prev {
            diverging = true;
        }
        prev = mag;
        sum += v;
        kept += 1;
        terms.push(physical(spec, term));
    }
    let omitted = omitted.unwrap_or(prev);
    let value = sum * scaled.prefactor;
    Ok(SeriesApproximation {
        approx: Approximation {
            value,
            est_error: omitted * scaled.prefactor + 4.0 * f64::EPSILON * value.abs(),
            method: Method::ResidueSeries,
            diagnostics: Diagnostics {
                terms_used: Some(kept),
                divergence_warning: diverging,
                ..Diagnostics::default()
            },
        },
        terms,
    })
}

/// First non-vanished term of the expansion, as a coefficient of `r^{-exponent}`.
/// The exponent is `d+β` unless `β` is an even integer, then `d+β+α`.
pub fn leading_term(spec: &KernelSpec) -> Result<SeriesTerm> {
    let terms = series_terms(spec, 1)?;
    Ok(*terms.last().expect("one term was requested"))
}
