use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    /// Total sum of squares of the response is zero.
    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("{value} is out of range for {what}")]
    OutOfRange { what: &'static str, value: i64 },

    #[error("schema error: {0}")]
    Schema(String),

    /// `row` is the 1-based line number in the CSV file, header included.
    #[error("row {row}, column \"{column}\": {message}")]
    Parse {
        row: u64,
        column: String,
        message: String,
    },

    #[error("actual value at index {index} is zero; percentage error is undefined")]
    ZeroActual { index: usize },

    #[error("inference unavailable: {0}")]
    InferenceUnavailable(String),
}
