use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("rank {rank} out of range for {k}-simplices on {n} vertices")]
    RankOutOfRange { rank: u64, k: usize, n: usize },
    #[error("binomial coefficient C({n}, {k}) does not fit in 64 bits")]
    Overflow { n: usize, k: usize },
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("enumeration guard exceeded: {0}")]
    Guard(String),
    #[error("no two disjoint {dim}-simplices exist on {n} vertices")]
    NoDisjointPair { dim: usize, n: usize },
    #[error("empty sample")]
    EmptySample,
    #[error("NaN input")]
    NotANumber,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
