use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] asp_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    /// 2 bad input or config, 3 oracle guard, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use asp_core::Error as E;
        match self {
            CliError::Core(E::OracleGuard(_)) => 3,
            CliError::Core(E::Numerical(_) | E::NonConvergence { .. }) => 4,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        use asp_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e {
                E::InvalidInput(_) => "invalid_input",
                E::EmptyClass => "empty_class",
                E::DegenerateModel => "degenerate_model",
                E::DimensionMismatch { .. } => "dimension_mismatch",
                E::NonFinite(_) => "non_finite",
                E::EmptyPool => "empty_pool",
                E::PoolTooSmall { .. } => "pool_too_small",
                E::Infeasible(_) => "infeasible",
                E::OracleGuard(_) => "oracle_guard",
                E::Numerical(_) => "numerical",
                E::NonConvergence { .. } => "non_convergence",
                E::Parse(_) => "parse",
                E::Io(_) => "io",
                E::Json(_) => "json",
            },
        }
    }

    /// One-line JSON description for stderr.
    pub fn to_json(&self) -> String {
        let report = ErrorReport { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&report).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}
