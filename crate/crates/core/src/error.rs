use thiserror::Error;

/// Errors raised by field construction, enumeration, isogeny and census
/// routines.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field of size {p}^{degree} exceeds the configured bound {bound}")]
    FieldTooLarge { p: u64, degree: usize, bound: u64 },
    #[error("{d} does not divide the ambient degree {degree}")]
    NotDivisor { d: usize, degree: usize },
    #[error("subfield of degree {needed} is not available in an ambient field of degree {degree}")]
    SubfieldUnavailable { needed: usize, degree: usize },
    #[error("{what} has size {size}, above the bound {bound}")]
    BoundExceeded { what: String, size: u128, bound: u128 },
    #[error("unsupported group specification: {0}")]
    Unsupported(String),
    #[error("not an isogeny: {0}")]
    NotIsogeny(String),
    #[error("kernel not captured: found {found} of {expected} points up to degree {max_degree}")]
    KernelNotCaptured { found: usize, expected: usize, max_degree: usize },
    #[error("no preimage found up to degree multiplier {s_search}: {detail}")]
    PreimageNotFound { s_search: usize, detail: String },
    #[error("subgroup is not central")]
    NotCentral,
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
