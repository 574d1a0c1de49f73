use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter not a coordinate: {0}")]
    ParameterNotCoordinate(String),
    #[error("unbound symbol: {0}")]
    Unbound(String),
    #[error("singular evaluation")]
    Singular,
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("non-reducible φ structure: {0}")]
    NonReducible(String),
    #[error("quantum numbers out of range: {0}")]
    OutOfRange(String),
    #[error("invalid ladder move: {0}")]
    InvalidLadderMove(String),
    #[error("plan degenerate: {skipped} of {total} points skipped")]
    PlanDegenerate { skipped: usize, total: usize },
    #[error("proportionality undefined: {0}")]
    ProportionalityUndefined(String),
    #[error("inconclusive: degenerate test battery")]
    Inconclusive,
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator {name}; valid names: {valid}")]
    UnknownGenerator { name: String, valid: String },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
