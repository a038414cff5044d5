use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not a matching: {0}")]
    NotAMatching(String),

    #[error("(n, q, r) = ({n}, {q}, {r}) is not admissible: C(n-i, r-i) must be divisible by C(q-i, r-i) for every 0 <= i < r")]
    NotAdmissible { n: usize, q: usize, r: usize },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("retries exhausted: {0}")]
    RetryExhausted(String),

    #[error("missing base data: {0}")]
    MissingBaseData(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
