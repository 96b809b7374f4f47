use thiserror::Error;

/// Failure modes shared by every evaluation path in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("argument {re}{im:+}i hits a pole of the gamma function")]
    PoleHit { re: f64, im: f64 },

    #[error("integrand does not decay along Re z = {abscissa} (|f(c+iT)| = {far:e} > |f(c+iT/2)| = {near:e} at T = {height})")]
    NoDecay {
        abscissa: f64,
        height: f64,
        near: f64,
        far: f64,
    },

    #[error("{what} did not converge: last change {last_change:e} after {iterations} refinements")]
    NonConvergent {
        what: &'static str,
        last_change: f64,
        iterations: usize,
    },

    #[error("abscissa {abscissa} lies outside the admissible strip ({lower}, {upper})")]
    StripViolation { abscissa: f64, lower: f64, upper: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative order {requested} exceeds the available order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("parity error: {0}")]
    Parity(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, KernelError>;
