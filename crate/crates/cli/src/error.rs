use levykernel_core::KernelError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Usage = 2,
    Numeric = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid argument: {0}")]
    Invalid(KernelError),

    /// A numerical failure, with the evaluation that triggered it.
    #[error("{source} (r = {r}, method = {method})")]
    Numeric {
        source: KernelError,
        r: f64,
        method: String,
    },

    #[error("config file {path}: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn kind(e: &KernelError) -> &'static str {
    match e {
        KernelError::PoleHit { .. } => "pole_hit",
        KernelError::NoDecay { .. } => "no_decay",
        KernelError::NonConvergent { .. } => "non_convergent",
        KernelError::StripViolation { .. } => "strip_violation",
        KernelError::Domain(_) => "domain",
        KernelError::OrderExceeded { .. } => "order_exceeded",
        KernelError::Parity(_) => "parity",
        KernelError::NonFinite(_) => "non_finite",
    }
}

/// Whether a core error reflects bad input rather than a failed computation.
pub fn is_usage(e: &KernelError) -> bool {
    matches!(
        e,
        KernelError::Domain(_)
            | KernelError::OrderExceeded { .. }
            | KernelError::Parity(_)
            | KernelError::StripViolation { .. }
    )
}

impl CliError {
    /// Sorts a core error raised while evaluating at `r` with `method`.
    pub fn from_eval(e: KernelError, r: f64, method: &str) -> Self {
        if is_usage(&e) {
            CliError::Invalid(e)
        } else {
            CliError::Numeric {
                source: e,
                r,
                method: method.to_string(),
            }
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Numeric { .. } => ExitCode::Numeric,
            _ => ExitCode::Usage,
        }
    }

    /// Machine-readable account of a numerical failure.
    pub fn diagnostic(&self) -> Option<serde_json::Value> {
        match self {
            CliError::Numeric { source, r, method } => {
                let mut v = json!({
                    "error": kind(source),
                    "message": source.to_string(),
                    "r": r,
                    "method": method,
                });
                let extra = match source {
                    KernelError::NoDecay {
                        abscissa,
                        height,
                        near,
                        far,
                    } => json!({"abscissa": abscissa, "height": height, "near": near, "far": far}),
                    KernelError::NonConvergent {
                        what,
                        last_change,
                        iterations,
                    } => json!({"stage": what, "last_change": last_change, "iterations": iterations}),
                    KernelError::PoleHit { re, im } => json!({"re": re, "im": im}),
                    _ => json!({}),
                };
                v["detail"] = extra;
                Some(v)
            }
            _ => None,
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        CliError::from_eval(e, f64::NAN, "")
    }
}
