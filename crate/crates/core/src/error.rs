use thiserror::Error;

/// Failure to read a composition or star-spec from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty entry at position {position} (stray separator)")]
    EmptyToken { position: usize },
    #[error("malformed token `{token}`")]
    Malformed { token: String },
    #[error("zero entry `{token}` is not allowed")]
    ZeroEntry { token: String },
    #[error("separator {value} < 2 in token `{token}`")]
    SeparatorTooSmall { token: String, value: u64 },
    #[error("only 2 may carry a caret exponent, got `{token}`")]
    CaretBase { token: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid star spec: {0}")]
    InvalidSpec(String),
    #[error("brute-force enumeration refused: {count} index tuples exceeds the limit {limit}")]
    TooManyTuples { count: String, limit: u64 },
    #[error("the comma/O-plus expansion requires c_j >= 3, but c_{index} = {value}")]
    SeparatorBelowThree { index: usize, value: u64 },
    #[error("the comma/O-plus expansion needs at least one separator (r >= 1)")]
    NoSeparators,
    #[error(
        "series for {0} does not converge (leading entry must satisfy |s_1| >= 2 or s_1 = -1)"
    )]
    NonConvergent(String),
    #[error("exponent e = {0} must satisfy e > 1")]
    ExponentTooSmall(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
