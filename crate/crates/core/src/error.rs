use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported (acuteness is trivial in even characteristic)")]
    EvenCharacteristic,
    #[error("modulus polynomial is reducible over F_{p}")]
    ReduciblePolynomial { p: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {p}^{k} exceeds the supported maximum {max}")]
    FieldTooLarge { p: u64, k: u32, max: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element or point does not belong to this field: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate triple: points {0} and {1} coincide")]
    DegenerateTriple(usize, usize),
    #[error("DuplicatePoint: point at index {second} repeats index {first}")]
    DuplicatePoint { first: usize, second: usize },
    #[error("the principal character is not allowed here")]
    PrincipalCharacter,
    #[error("alpha = {0} is not a quadratic nonresidue")]
    AlphaNotNonResidue(u64),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("search space too large: {size} exceeds cap {cap}")]
    SpaceTooLarge { size: u128, cap: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
