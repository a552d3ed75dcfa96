use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: String, hi: String },
    #[error("domain width {domain} differs from range width {range}")]
    WidthMismatch { domain: String, range: String },
    #[error("interval [{lo}, {hi}] leaves [1, {n}]")]
    OutOfBounds { lo: String, hi: String, n: String },
    #[error("{x} is outside the domain and range of the pairing")]
    Domain { x: String },
    #[error("pairings cannot be merged: {0}")]
    MergeCondition(String),
    #[error("transmission precondition violated: {0}")]
    Transmission(String),
    #[error("no pairings in the system")]
    EmptySystem,
    #[error("oracle capacity exceeded: n = {n} > cap = {cap}")]
    Capacity { n: String, cap: u64 },
    #[error("weight dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("weight list invalid: {0}")]
    WeightList(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, OrbitError>;
