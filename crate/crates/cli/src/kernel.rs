//! Turns command-line flags into an evaluator for one kernel.

use levykernel_core::mellin::Contour;
use levykernel_core::oracle::OracleOptions;
use levykernel_core::radial::{
    general_kernel_mb, general_leading_term, perturbed_leading_term, symbol_oracle, RadialSymbol, SymbolSpec,
};
use levykernel_core::stable::{
    self, evaluate, is_even_integer, stable_mb, Approximation, Diagnostics, KernelSpec, Method,
};
use levykernel_core::KernelError;
use serde::Serialize;

use crate::args::{KernelArgs, MethodArg};
use crate::config::Config;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Kernel {
    Stable(KernelSpec),
    Symbol {
        symbol: SymbolSpec,
        d: u32,
        beta: f64,
        t: f64,
    },
}

/// `coefficient · r^{-exponent}`, with the exponent of the first correction
/// relative to it (used to strip that correction from tail fits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Leading {
    pub coefficient: f64,
    pub exponent: f64,
    pub correction: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub kernel: Kernel,
    pub k: Option<usize>,
    pub contour: Contour,
    pub tol: f64,
    pub oracle_tol: f64,
}

impl Evaluator {
    pub fn from_args(a: &KernelArgs, cfg: &Config) -> Result<Self, CliError> {
        let tol = a.tol.unwrap_or(cfg.tol);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")));
        }
        let kernel = match (&a.symbol, a.alpha) {
            (Some(text), _) => {
                let symbol = SymbolSpec::parse(text).map_err(CliError::Invalid)?;
                Kernel::Symbol {
                    symbol,
                    d: a.d,
                    beta: a.beta,
                    t: a.t,
                }
            }
            (None, Some(alpha)) => {
                if a.k.is_some() {
                    return Err(CliError::Usage("--k applies only to --symbol kernels".into()));
                }
                Kernel::Stable(KernelSpec::new(a.d, alpha, a.beta, a.t).map_err(CliError::Invalid)?)
            }
            (None, None) => return Err(CliError::Usage("one of --alpha or --symbol is required".into())),
        };
        if let Kernel::Symbol { d, beta, t, .. } = kernel {
            if d < 2 || !(beta >= 0.0 && beta.is_finite()) || !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!(
                    "need d >= 2, beta >= 0 and t > 0, got d = {d}, beta = {beta}, t = {t}"
                )));
            }
        }
        let contour = match a.contour_c {
            Some(c) if c.is_finite() => Contour::Abscissa(c),
            Some(c) => return Err(CliError::Usage(format!("--contour-c must be finite, got {c}"))),
            None => Contour::Auto,
        };
        Ok(Self {
            kernel,
            k: a.k,
            contour,
            tol,
            oracle_tol: cfg.oracle_tol.min(tol),
        })
    }

    pub fn is_symbol(&self) -> bool {
        matches!(self.kernel, Kernel::Symbol { .. })
    }

    /// Rejects method/flag combinations that can never succeed.
    pub fn check_method(&self, m: MethodArg) -> Result<(), CliError> {
        if self.is_symbol() && !matches!(m, MethodArg::Mb | MethodArg::Oracle | MethodArg::Auto) {
            return Err(CliError::Usage(format!(
                "method {} is only available for stable kernels; use mb, oracle or auto with --symbol",
                m.as_str()
            )));
        }
        if !matches!(self.contour, Contour::Auto) && !matches!(m, MethodArg::Mb | MethodArg::Oracle) {
            return Err(CliError::Usage(format!(
                "--contour-c applies to the mb method, not {}",
                m.as_str()
            )));
        }
        Ok(())
    }

    /// Every method that can in principle evaluate this kernel.
    pub fn applicable_methods(&self) -> Vec<MethodArg> {
        match self.kernel {
            Kernel::Symbol { .. } => vec![MethodArg::Mb, MethodArg::Oracle],
            Kernel::Stable(s) => {
                let mut v = vec![MethodArg::Mb];
                if s.alpha < 2.0 {
                    v.push(MethodArg::Series);
                }
                if s.alpha >= 1.0 {
                    v.push(MethodArg::SmallR);
                }
                if s.beta == 0.0 && (s.alpha == 1.0 || s.alpha == 2.0) {
                    v.push(MethodArg::Closed);
                }
                v.push(MethodArg::Oracle);
                v
            }
        }
    }

    pub fn eval(&self, r: f64, m: MethodArg) -> Result<Approximation, CliError> {
        self.check_method(m)?;
        self.eval_core(r, m).map_err(|e| CliError::from_eval(e, r, m.as_str()))
    }

    fn eval_core(&self, r: f64, m: MethodArg) -> Result<Approximation, KernelError> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(KernelError::Domain(format!("r must be nonnegative, got {r}")));
        }
        match self.kernel {
            Kernel::Stable(spec) => match m {
                MethodArg::Mb => stable_mb(&spec, r, self.contour, self.tol),
                MethodArg::Oracle => evaluate(&spec, r, m.route(), self.oracle_tol),
                _ => evaluate(&spec, r, m.route(), self.tol),
            },
            Kernel::Symbol { symbol, d, beta, t } => match m {
                MethodArg::Oracle => {
                    let opts = OracleOptions {
                        tol: self.oracle_tol,
                        ..OracleOptions::default()
                    };
                    let v = symbol_oracle(&symbol, d, beta, t, r, &opts)?;
                    Ok(Approximation {
                        value: v.value,
                        est_error: v.est_error,
                        method: Method::Oracle,
                        diagnostics: Diagnostics {
                            nodes_used: Some(v.panels),
                            ..Diagnostics::default()
                        },
                    })
                }
                _ => general_kernel_mb(&symbol, d, beta, t, r, self.k, self.contour, self.tol),
            },
        }
    }

    /// The large-`r` leading term, when the kernel decays like a power.
    pub fn leading(&self) -> Option<Leading> {
        match self.kernel {
            Kernel::Stable(spec) => {
                if spec.alpha >= 2.0 {
                    return None;
                }
                let l = stable::leading_term(&spec).ok()?;
                (!l.vanished).then_some(Leading {
                    coefficient: l.coefficient,
                    exponent: l.exponent,
                    correction: spec.alpha,
                })
            }
            Kernel::Symbol { symbol, d, beta, t } => {
                if is_even_integer(beta) {
                    let (alpha, eta1) = symbol.perturbation()?;
                    let l = perturbed_leading_term(alpha, eta1, d, beta, t).ok()?;
                    let correction = symbol.delta().map_or(alpha, |delta| delta - alpha);
                    Some(Leading {
                        coefficient: l.coefficient,
                        exponent: l.exponent,
                        correction,
                    })
                } else {
                    let l = general_leading_term(&symbol, d, beta, t).ok()?;
                    Some(Leading {
                        coefficient: l.coefficient,
                        exponent: l.exponent,
                        correction: symbol.alpha_index(),
                    })
                }
            }
        }
    }
}
