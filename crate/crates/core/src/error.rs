use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps these onto process exit codes, see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("operands live in different fields (F_{0} vs F_{1})")]
    FieldMismatch(u32, u32),
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("repeated evaluation point {0}")]
    RepeatedPoint(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field F_{q} too small for length {n}")]
    FieldTooSmall { q: u32, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: {0} evaluations")]
    BudgetExceeded(u64),
    #[error("structural failure: {0}")]
    Structural(String),
    #[error("recovery failure: {0}")]
    Recovery(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Structural(_) => 2,
            Error::Recovery(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
