//! Heat kernels of the rotationally symmetric α-stable process and their
//! fractional derivatives `(-Δ)^{β/2} P_t^α`.

mod closed;
mod envelope;
mod mb;
mod route;
mod series;
mod small_r;

use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};

pub use closed::{gaussian_kernel, kernel_at_origin, poisson_kernel, scaling_reduce, Scaled};
pub use envelope::{
    envelope, envelope_ratio, sum_symbol_envelope, sum_symbol_envelope_check, EnvelopeReport, SumEnvelopeReport,
};
pub use mb::{default_abscissa, mb_integrand, stable_mb, stable_strip};
pub use route::{evaluate, Route};
pub use series::{leading_term, series_terms, stable_series, SeriesApproximation};
pub use small_r::small_r_series;

/// One kernel: dimension, stability index, derivative order and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
}

impl KernelSpec {
    pub fn new(d: u32, alpha: f64, beta: f64, t: f64) -> Result<Self> {
        let spec = Self { d, alpha, beta, t };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(KernelError::Domain(format!(
                "dimension must be at least 2, got {}",
                self.d
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(KernelError::Domain(format!(
                "alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(KernelError::Domain(format!(
                "beta must be nonnegative, got {}",
                self.beta
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(KernelError::Domain(format!("t must be positive, got {}", self.t)));
        }
        Ok(())
    }

    pub fn df(&self) -> f64 {
        self.d as f64
    }

    /// `β ∈ {0, 2, 4, …}`.
    pub fn beta_is_even(&self) -> bool {
        is_even_integer(self.beta)
    }
}

pub fn is_even_integer(x: f64) -> bool {
    let half = 0.5 * x;
    (half - half.round()).abs() < 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MbContour,
    ResidueSeries,
    SmallRSeries,
    ClosedForm,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MbContour => "mb_contour",
            Method::ResidueSeries => "residue_series",
            Method::SmallRSeries => "small_r_series",
            Method::ClosedForm => "closed_form",
            Method::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abscissa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u64>,
    /// Imaginary part left over by the contour quadrature; zero in exact arithmetic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imag_part: Option<f64>,
    /// Integration-by-parts order `k` of a general-symbol contour.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ibp_order: Option<usize>,
    /// Terms of an asymptotic series started growing before the requested count.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub divergence_warning: bool,
}

/// A kernel value with an a-posteriori error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub value: f64,
    pub est_error: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl Approximation {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            est_error: 4.0 * f64::EPSILON * value.abs(),
            method,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn relative_error(&self) -> f64 {
        self.est_error / self.value.abs()
    }
}

/// One residue of the large-`r` expansion: `coefficient · r^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub n: usize,
    pub exponent: f64,
    pub coefficient: f64,
    pub vanished: bool,
}

impl SeriesTerm {
    pub fn at(&self, r: f64) -> f64 {
        if self.vanished {
            0.0
        } else {
            self.coefficient * r.powf(-self.exponent)
        }
    }
}
