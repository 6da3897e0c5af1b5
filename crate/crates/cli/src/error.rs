use std::path::PathBuf;

use duality_core::Error as CoreError;

/// Everything `ddtool` can fail with. Each variant (and each core error) has
/// its own exit code; see [`CliError::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("{}: duplicate {axis} id '{id}'", path.display())]
    DuplicateId {
        path: PathBuf,
        axis: &'static str,
        id: String,
    },
    #[error("{}:{line}:{column}: count '{value}' is not a nonnegative integer", path.display())]
    NonIntegerCount {
        path: PathBuf,
        line: u64,
        column: usize,
        value: String,
    },
    #[error("{}:{line}:{column}: value '{value}' is not finite", path.display())]
    NonFiniteValue {
        path: PathBuf,
        line: u64,
        column: usize,
        value: String,
    },
    #[error("method {method} needs {expected} input table(s), got {found}")]
    InputArity {
        method: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("{}: {message}", path.display())]
    RowIdMismatch { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Io { .. } => "IoError",
            CliError::Parse { .. } => "ParseError",
            CliError::DuplicateId { .. } => "DuplicateId",
            CliError::NonIntegerCount { .. } => "NonIntegerCount",
            CliError::NonFiniteValue { .. } => "NonFiniteValue",
            CliError::InputArity { .. } => "InputArity",
            CliError::RowIdMismatch { .. } => "RowIdMismatch",
            CliError::Core(e) => e.name(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Parse { .. } => 4,
            CliError::DuplicateId { .. } => 5,
            CliError::NonIntegerCount { .. } => 6,
            CliError::NonFiniteValue { .. } => 7,
            CliError::InputArity { .. } => 8,
            CliError::RowIdMismatch { .. } => 9,
            CliError::Core(e) => core_exit_code(e),
        }
    }

    /// `{"error": name, "code": n, "message": text}` on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": self.name(),
            "code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        // Same condition as a non-finite cell in an input file.
        CoreError::NonFinite => 7,
        CoreError::ShapeMismatch { .. } => 10,
        CoreError::NonSquare { .. } => 11,
        CoreError::NotSymmetric { .. } => 12,
        CoreError::NotPositiveDefinite { .. } => 13,
        CoreError::NotNonnegativeDefinite { .. } => 14,
        CoreError::ConvergenceFailure(_) => 15,
        CoreError::DimensionMismatch { .. } => 16,
        CoreError::RankMismatch => 17,
        CoreError::RankExceeded { .. } => 18,
        CoreError::TooFewRows { .. } => 19,
        CoreError::ZeroVarianceColumn { .. } => 20,
        CoreError::BadWeights(_) => 21,
        CoreError::InvalidCount { .. } => 22,
        CoreError::DegenerateTable { .. } => 23,
        CoreError::SingularSxx { .. } => 24,
        CoreError::EigengapViolation { .. } => 25,
        CoreError::ZeroOperator { .. } => 26,
        CoreError::TooFewDiagrams(_) => 27,
        CoreError::MetricMismatch { .. } => 28,
        CoreError::DuplicateLabel(_) => 29,
        CoreError::PerronAmbiguity { .. } => 30,
    }
}
