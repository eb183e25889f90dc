//! Cross-sectional regressions: classical OLS and the robust MM-estimator.

mod design;
mod mm;
mod ols;

use serde::Serialize;
use thiserror::Error;

use crate::error::ErrorKind;

pub use design::Design;
pub use mm::{mm_fit, MmConfig};
pub use ols::ols;

#[derive(Debug, Error)]
pub enum RegressError {
    #[error("need more observations than coefficients (n = {n}, p = {p})")]
    InsufficientData { n: usize, p: usize },
    #[error("design matrix is rank deficient")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite input")]
    NonFinite,
    #[error("robust fit degenerate: {0}")]
    Degenerate(String),
}

impl RegressError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            RegressError::Dimension(_) | RegressError::NonFinite => ErrorKind::Data,
            _ => ErrorKind::Computation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "OLS")]
    Ols,
    #[serde(rename = "MM")]
    Mm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    /// Two-sided p-value; Student-t for OLS, standard normal for MM.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionFit {
    pub method: Method,
    pub coefficients: Vec<Coefficient>,
    /// R² for OLS, robust pseudo-R² for MM.
    pub r2: f64,
    pub n: usize,
    /// Always true for OLS.
    pub converged: bool,
    /// Subset sampling seed (MM only).
    pub seed: Option<u64>,
    /// Residual scale: classical σ̂ for OLS, the S-scale for MM.
    #[serde(skip)]
    pub scale: f64,
}

impl RegressionFit {
    pub fn coef(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}
