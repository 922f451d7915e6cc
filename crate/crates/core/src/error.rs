use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("{value} has no inverse modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("no primitive root of unity of order {order} modulo {modulus}")]
    NoRootOfUnity { order: u64, modulus: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("polynomial is in the {found} domain, expected {expected}")]
    WrongDomain { expected: &'static str, found: &'static str },
    #[error("operands disagree: {0}")]
    Mismatch(String),
    #[error("level {0} does not allow this operation")]
    LevelExhausted(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u16, found: u16 },
    #[error("malformed data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
