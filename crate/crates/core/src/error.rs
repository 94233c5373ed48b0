use thiserror::Error;

pub type Result<T, E = GrovesError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrovesError {
    #[error("invalid setting: {0}")]
    InvalidSetting(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid OEL index k={k} for n={n}, m={m}: {reason}")]
    InvalidOelIndex {
        k: usize,
        n: usize,
        m: usize,
        reason: &'static str,
    },

    #[error("rebate table has no entry for multiset ({0})")]
    MissingTableKey(String),

    #[error("unsupported surplus strategy: {0}")]
    UnsupportedStrategy(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("inconsistent rebate tables: {0}")]
    InconsistentTables(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("baseline mechanism runs a deficit at profile ({0})")]
    BaselineInfeasible(String),

    #[error("baseline mechanism pays agent index {agent} (0-based) at profile ({profile})")]
    BaselineNotPayOnly { profile: String, agent: usize },

    #[error("linear program: {0}")]
    Lp(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
