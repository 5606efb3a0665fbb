use num_complex::Complex64;

use crate::opalg::BasisTag;

/// Errors produced by operator construction, spectral calculus and the
/// verification routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: BasisTag, right: BasisTag },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite entries produced by {0}")]
    NonFinite(&'static str),

    #[error("eigensolver failed to converge")]
    EigenSolver,

    #[error(
        "near-defective matrix: eigenvector condition {condition:.3e}, \
         biorthogonality error {biorthogonality:.3e}"
    )]
    NearDefective { condition: f64, biorthogonality: f64 },

    #[error("spectrum not integer: eigenvalue {worst} is {distance:.3e} from the nearest integer")]
    SpectrumNotInteger { worst: Complex64, distance: f64 },

    #[error("metric not positive: minimum interior eigenvalue {min_eig:.3e}")]
    MetricNotPositive { min_eig: f64 },

    #[error("matrix exponential scaling failed (1-norm {norm:.3e})")]
    ScalingFailure { norm: f64 },

    #[error("annihilation residual too large on mode {mode}: {residual:.3e}")]
    AnnihilationResidual { mode: usize, residual: f64 },

    #[error("truncation safety violated: requested {requested}, limit {limit}")]
    TruncationSafety { requested: usize, limit: usize },

    #[error("Hermite degree {degree} exceeds the supported maximum {max}")]
    DegreeLimit { degree: usize, max: usize },

    #[error("insufficient quadrature: node doubling changed the result by {change:.3e}")]
    InsufficientQuadrature { change: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error reflects a numerical failure (as opposed to bad
    /// input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::EigenSolver
                | Error::NearDefective { .. }
                | Error::SpectrumNotInteger { .. }
                | Error::MetricNotPositive { .. }
                | Error::ScalingFailure { .. }
                | Error::AnnihilationResidual { .. }
                | Error::InsufficientQuadrature { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
