use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty class: training data needs at least one example of each label")]
    EmptyClass,

    #[error("degenerate model: weight vector has zero norm")]
    DegenerateModel,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty sample pool")]
    EmptyPool,

    #[error("sample pool needs at least {needed} entries, has {found}")]
    PoolTooSmall { needed: usize, found: usize },

    #[error("infeasible solution: {0}")]
    Infeasible(String),

    #[error("oracle guard tripped: {0}")]
    OracleGuard(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("column generation did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
