use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty word has no run count")]
    EmptyWord,
    #[error("complement defined for binary only")]
    NotBinary,
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(usize),
    #[error("symbol {symbol} out of range for alphabet size {q}")]
    SymbolOutOfRange { symbol: usize, q: usize },
    #[error("cannot parse word {0:?}")]
    ParseWord(String),
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("substitution at position {index} does not change the symbol")]
    NoOpSubstitution { index: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("alphabet mismatch: expected q={expected}, found q={found}")]
    AlphabetMismatch { expected: usize, found: usize },
    #[error("error spec infeasible: {0}")]
    InfeasibleSpec(String),
    #[error("parameter domain violated: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("instance too large: needs {required} evaluations, budget is {budget}")]
    TooLarge { required: u128, budget: u128 },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
