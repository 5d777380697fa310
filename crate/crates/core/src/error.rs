use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid Miwa parameters: {0}")]
    InvalidParams(String),

    #[error("truncation tail mass {tail:e} exceeds the allowed {allowed:e}")]
    Truncation { tail: f64, allowed: f64 },

    #[error("q-series holds {have} coefficients but index {need} is required")]
    SeriesLength { have: usize, need: usize },

    #[error("singular linear system while {0}")]
    Singular(String),

    #[error("numerical consistency check failed: {0}")]
    Consistency(String),

    #[error("problem size {size} exceeds the limit {limit}")]
    Size { size: usize, limit: usize },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that signal a failed numerical self-check rather than
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Consistency(_) | Error::Convergence(_) | Error::Singular(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
