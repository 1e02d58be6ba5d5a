use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("row {row}: score {score} is outside [0, 1]")]
    ScoreOutOfRange { row: usize, score: f64 },

    #[error("row {row}: response {response} is not 0 or 1")]
    BadResponse { row: usize, response: i64 },

    #[error("more bins than samples (m = {m}, n = {n})")]
    TooManyBins { m: usize, n: usize },

    #[error("number of bins must be at least 1")]
    ZeroBins,

    #[error("degenerate scores: sigma_n is zero")]
    DegenerateSigma,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}, line {line}: {message}")]
    CsvParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: 1 for validation errors, 2 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}
