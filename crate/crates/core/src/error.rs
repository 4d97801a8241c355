use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("tower height {height} is not materializable (2^(k) for k <= 4 only)")]
    Unmaterializable { height: u32 },
    #[error("exact value too large to materialize: {0}")]
    Overflow(String),
    #[error("search budget of {budget} exhausted: {what}")]
    BudgetExhausted { what: String, budget: u64 },
    #[error("truncation cap {cap} is below required vertex {needed}")]
    CapTooSmall { cap: u64, needed: u64 },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("enumeration cap {cap} exceeded; partial lower bound {partial_lower_bound}")]
    EnumerationCap { cap: usize, partial_lower_bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
