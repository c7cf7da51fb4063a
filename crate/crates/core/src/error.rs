use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Node and refinement statistics reported by the adaptive integrators.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct QuadDiagnostics {
    pub evaluations: usize,
    pub intervals: usize,
    pub max_depth: usize,
    pub error_estimate: f64,
}

impl QuadDiagnostics {
    pub fn merge(&mut self, other: &QuadDiagnostics) {
        self.evaluations += other.evaluations;
        self.intervals += other.intervals;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.error_estimate += other.error_estimate.abs();
    }
}

impl fmt::Display for QuadDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} evaluations, {} intervals, depth {}, error estimate {:.3e}",
            self.evaluations, self.intervals, self.max_depth, self.error_estimate
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("quadrature did not converge: {message} ({diagnostics})")]
    NumericalFailure {
        message: String,
        diagnostics: QuadDiagnostics,
    },

    #[error("d0 is not identifiable from this curve: {0}")]
    NonIdentifiable(String),

    #[error("minimisation did not converge: {0}")]
    Convergence(String),

    #[error("threshold {threshold} is never reached between 1 nm and 100 um")]
    NoCrossover { threshold: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("finite-difference derivative is unreliable: estimate {estimate:.3e}, noise floor {noise_floor:.3e}")]
    UnreliableDerivative { estimate: f64, noise_floor: f64 },

    #[error("regularisation routes disagree: zeta {zeta:.9e} J vs cutoff {cutoff:.9e} J")]
    RegularizationInconsistency { zeta: f64, cutoff: f64 },

    #[error("proximity force approximation invalid: radius/separation = {ratio:.2} < 10")]
    PfaGuard { ratio: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub type Result<T> = std::result::Result<T, Error>;
