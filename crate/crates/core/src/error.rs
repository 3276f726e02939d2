use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must lie in [2, 2^31], got {0}")]
    InvalidModulus(u64),
    #[error("entry {value} is not reduced modulo {modulus}")]
    InvalidEntry { value: u64, modulus: u64 },
    #[error("mixed moduli {0} and {1}")]
    ModulusMismatch(u64, u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("polynomials over different coefficient fields or variable lists")]
    PolynomialMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("ideal is the whole polynomial ring")]
    UnitIdeal,
    #[error("characteristics differ: {0} vs {1}")]
    CharacteristicMismatch(u64, u64),
    #[error("ring axioms violated: {0}")]
    InvalidRing(String),
    #[error("invalid module data: {0}")]
    InvalidModule(String),
    #[error("invalid module map: {0}")]
    InvalidMap(String),
    #[error("modules live over different rings")]
    RingMismatch,
    #[error("{what} needs {needed} elements, above the cap of {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("module is not projective")]
    NotProjective,
    #[error("not a complete projective resolution: {0}")]
    NotComplete(String),
    #[error("witness rejected: {0}")]
    WitnessRejected(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
