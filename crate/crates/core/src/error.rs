use thiserror::Error;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("eigen-solver exceeded its budget of {budget} iterations")]
    ConvergenceFailure { budget: usize },
    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("normal quantile requires 0 < q < 1, got {0}")]
    QuantileOutOfDomain(f64),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("degenerate random draw: residual norm below threshold after {attempts} attempts")]
    DegenerateDraw { attempts: usize },
    #[error("invalid block partition: {0}")]
    InvalidPartition(String),
    #[error("spike eigenvalues must be positive and non-increasing")]
    NonDescendingSpectrum,
    #[error("dimension {0} too small, need at least 2")]
    DimensionTooSmall(usize),
    #[error("degenerate eigengap between indices {j} and {k}")]
    DegenerateGap { j: usize, k: usize },
    #[error("debiased eigenvalue {0} is zero")]
    ZeroEigenvalue(usize),
    #[error("degenerate correction: {0}")]
    DegenerateCorrection(String),
    #[error("vector must have unit norm, got norm {0}")]
    NotUnitVector(f64),
    #[error("index {index} out of range (must be < {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("eigenvalue at index {0} is not unique")]
    EigenvalueNotUnique(usize),
    #[error("resolvent is singular at the requested point")]
    SingularResolvent,
    #[error("sample is empty")]
    EmptySample,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("replication with seed stream {stream} failed: {source}")]
    Replication {
        stream: u64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the numbers themselves (degenerate gaps,
    /// non-convergence, singular systems) rather than by malformed input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::NonFinite { .. }
            | Error::ConvergenceFailure { .. }
            | Error::DegenerateDraw { .. }
            | Error::DegenerateGap { .. }
            | Error::ZeroEigenvalue(_)
            | Error::DegenerateCorrection(_)
            | Error::EigenvalueNotUnique(_)
            | Error::SingularResolvent => true,
            Error::Replication { source, .. } => source.is_numeric(),
            _ => false,
        }
    }

    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::RankOutOfRange { .. } => "RankOutOfRange",
            Error::QuantileOutOfDomain(_) => "QuantileOutOfDomain",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotSquare { .. } => "NotSquare",
            Error::DegenerateDraw { .. } => "DegenerateDraw",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::NonDescendingSpectrum => "NonDescendingSpectrum",
            Error::DimensionTooSmall(_) => "DimensionTooSmall",
            Error::DegenerateGap { .. } => "DegenerateGap",
            Error::ZeroEigenvalue(_) => "ZeroEigenvalue",
            Error::DegenerateCorrection(_) => "DegenerateCorrection",
            Error::NotUnitVector(_) => "NotUnitVector",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::EigenvalueNotUnique(_) => "EigenvalueNotUnique",
            Error::SingularResolvent => "SingularResolvent",
            Error::EmptySample => "EmptySample",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse(_) => "Parse",
            Error::Replication { source, .. } => source.kind(),
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
