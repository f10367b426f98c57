use thiserror::Error;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input is well-formed but fails a physical validity check (CP, TP, ...).
    Validation,
    /// A documented precondition of the operation does not hold.
    Precondition,
    /// An iterative method did not reach its target.
    Numerical,
    /// Reading, writing or parsing external data failed.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("Kraus set is empty")]
    EmptyKraus,

    #[error("map is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("affine representation has imaginary residual {residual:.3e}; map does not preserve Hermiticity")]
    NonRealAffine { residual: f64 },

    #[error("map is not completely positive and trace preserving (min Choi eigenvalue {min_eigenvalue:.3e}, TP residual {tp_residual:.3e})")]
    NotCptp { min_eigenvalue: f64, tp_residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("unknown channel fixture `{0}`")]
    UnknownFixture(String),

    #[error("rotation axis must be a unit vector (norm {norm})")]
    InvalidAxis { norm: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("zero vector passed where a nonzero vector is required")]
    ZeroVector,

    #[error("no phase change on interval [{lo}, {hi}]")]
    NoPhaseChange { lo: f64, hi: f64 },

    #[error("boundary plateau wider than tolerance around {at}")]
    BoundaryPlateau { at: f64 },

    #[error("{value} is not an eigenvalue of the matrix")]
    NotAnEigenvalue { value: String },

    #[error("no convergence: {reason} (best point {best:?}, objective {objective:.3e})")]
    NoConvergence {
        reason: String,
        best: Vec<f64>,
        objective: f64,
    },

    #[error("point {0:?} lies outside the simplex")]
    OutsideSimplex(Vec<f64>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("decomposition residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    DecompositionFailed { residual: f64, tol: f64 },

    #[error("outcome probability {0} outside [0, 1]; channel is not CPTP")]
    ProbabilityOutOfRange(f64),

    #[error("missing tomography setting {0}")]
    MissingSetting(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NotTracePreserving { .. }
            | NonRealAffine { .. }
            | NotCptp { .. }
            | InvalidState(_)
            | ProbabilityOutOfRange(_) => ErrorClass::Validation,
            EmptyKraus
            | InvalidWeights(_)
            | UnknownFixture(_)
            | InvalidAxis { .. }
            | ZeroVector
            | NoPhaseChange { .. }
            | BoundaryPlateau { .. }
            | NotAnEigenvalue { .. }
            | OutsideSimplex(_)
            | InvalidArgument(_)
            | MissingSetting(_) => ErrorClass::Precondition,
            Eigensolver(_) | NoConvergence { .. } | DecompositionFailed { .. } => {
                ErrorClass::Numerical
            }
            Parse(_) | Io(_) | Json(_) => ErrorClass::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
