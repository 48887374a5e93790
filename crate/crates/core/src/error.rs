use thiserror::Error;

use crate::polytope::ProjectorViolation;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error(
        "matrix is not Hermitian (anti-Hermitian part {residual:.3e} exceeds {tolerance:.3e})"
    )]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("operator trace {0:.3e} is not positive")]
    ZeroTrace(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("not a conical design: {0}")]
    NotADesign(String),

    #[error("invalid design projector: {}", format_violations(.0))]
    InvalidProjector(Vec<ProjectorViolation>),

    #[error("no symmetric decomposition exists: {0}")]
    NoDecomposition(String),

    #[error(
        "no design construction available for d={dim} at contraction parameter {required_kappa:.6} \
         (constructible in-ball limit {inball_limit:.6})"
    )]
    ConstructionUnavailable {
        dim: usize,
        required_kappa: f64,
        inball_limit: f64,
    },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

fn format_violations(v: &[ProjectorViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
