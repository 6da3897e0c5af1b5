use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entries contain NaN or infinity")]
    NonFinite,
    #[error("entry count {found} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, found: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {smallest:e}, largest {largest:e})")]
    NotPositiveDefinite { smallest: f64, largest: f64 },
    #[error("matrix is not nonnegative definite (smallest eigenvalue {smallest:e}, largest {largest:e})")]
    NotNonnegativeDefinite { smallest: f64, largest: f64 },
    #[error("eigensolver failed: {0}")]
    ConvergenceFailure(String),
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("decomposition has zero rank, nothing to transfer")]
    RankMismatch,
    #[error("requested {requested} components but only {available} are available")]
    RankExceeded { requested: usize, available: usize },
    #[error("need at least {required} rows, got {found}")]
    TooFewRows { required: usize, found: usize },
    #[error("column {column} has (near) zero variance")]
    ZeroVarianceColumn { column: usize },
    #[error("bad row weights: {0}")]
    BadWeights(String),
    #[error("invalid count at ({row}, {col}): {value}")]
    InvalidCount { row: usize, col: usize, value: f64 },
    #[error("contingency table is degenerate: {rows} rows and {cols} columns with positive margins")]
    DegenerateTable { rows: usize, cols: usize },
    #[error("S_xx is singular or ill-conditioned (condition number {condition:e})")]
    SingularSxx { condition: f64 },
    #[error("eigenvalues {rank} and {next} are not separated (gap {gap:e})", next = rank + 1)]
    EigengapViolation { rank: usize, gap: f64 },
    #[error("diagram '{label}' has a zero operator")]
    ZeroOperator { label: String },
    #[error("a collection needs at least 2 diagrams, got {0}")]
    TooFewDiagrams(usize),
    #[error("diagram '{label}' does not share the collection's row metric")]
    MetricMismatch { label: String },
    #[error("duplicate diagram label '{0}'")]
    DuplicateLabel(String),
    #[error("leading eigenvalue is not simple (relative gap {gap:e}); compromise weights are not unique")]
    PerronAmbiguity { gap: f64 },
}

impl Error {
    /// Stable variant name, used for machine-readable reporting.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite => "NonFiniteValue",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NonSquare { .. } => "NonSquare",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NotNonnegativeDefinite { .. } => "NotNonnegativeDefinite",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RankMismatch => "RankMismatch",
            Error::RankExceeded { .. } => "RankExceeded",
            Error::TooFewRows { .. } => "TooFewRows",
            Error::ZeroVarianceColumn { .. } => "ZeroVarianceColumn",
            Error::BadWeights(_) => "BadWeights",
            Error::InvalidCount { .. } => "InvalidCount",
            Error::DegenerateTable { .. } => "DegenerateTable",
            Error::SingularSxx { .. } => "SingularSxx",
            Error::EigengapViolation { .. } => "EigengapViolation",
            Error::ZeroOperator { .. } => "ZeroOperator",
            Error::TooFewDiagrams(_) => "TooFewDiagrams",
            Error::MetricMismatch { .. } => "MetricMismatch",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::PerronAmbiguity { .. } => "PerronAmbiguity",
        }
    }
}
