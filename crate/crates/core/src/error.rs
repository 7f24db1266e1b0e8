use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// `(r-1)` does not divide `s+t-1`, so no connected hypergraph has these parameters.
    #[error("no connected {r}-uniform hypergraph has {s} vertices and nullity {t}: r-1 does not divide s+t-1")]
    NoSuchHypergraph { r: u32, s: u64, t: u64 },

    /// A LogReal magnitude is too large or too small to be represented as an f64.
    #[error("log-magnitude {0} is outside the representable range of f64")]
    OutOfRange(f64),

    /// Exhaustive enumeration would exceed its work guard.
    #[error("brute force over {estimate:.3e} edge subsets exceeds the guard of {limit:.0e}")]
    TooLarge { estimate: f64, limit: f64 },

    /// A forest or code violates a structural invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// A statistical routine was handed too little data.
    #[error("insufficient data: {0}")]
    Insufficient(String),

    /// A numeric self-check failed (for example a pmf that does not sum to one).
    #[error("numeric check failed: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn invalid<T>(what: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(Error::Invalid {
        what,
        reason: reason.into(),
    })
}
