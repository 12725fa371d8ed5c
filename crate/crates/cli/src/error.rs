use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error{}{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default(), field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] loctime_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status. `1` is reserved for failed verdicts and `2` for
    /// usage errors reported by the argument parser.
    pub fn exit_code(&self) -> u8 {
        use loctime_core::Error as E;
        match self {
            CliError::Parse { .. } => 3,
            CliError::Validation(_) => 4,
            CliError::Io { .. } => 5,
            CliError::Csv(_) => 6,
            CliError::Json(_) => 7,
            CliError::Core(e) => match e {
                E::NotPrimitive { .. } => 20,
                E::EmptyRowOrColumn { .. } => 21,
                E::DimensionMismatch { .. } => 22,
                E::NotStochastic { .. } => 23,
                E::BadTransition { .. } => 24,
                E::NonFinite { .. } => 25,
                E::NonconvergentEigen { .. } => 26,
                E::UncenteredObservable => 27,
                E::TooLarge { .. } => 28,
                E::Overflow => 29,
                E::InvalidGrid(_) => 30,
                E::NonconvergentSeries { .. } => 31,
                E::QuadratureImagResidue { .. } => 32,
                E::TooFewSamples { .. } => 33,
                E::DegenerateVariance { .. } => 34,
                E::ProbableLattice { .. } => 35,
                E::InvalidWindow { .. } => 36,
                E::GridTooCoarse { .. } => 37,
                E::BadGridSize { .. } => 38,
                E::InvalidParameter(_) => 39,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
