use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomials live in different contexts ({0} vs {1})")]
    ContextMismatch(String, String),
    #[error("degree {degree} outside 0..={trunc}")]
    DegreeOutOfRange { degree: u32, trunc: u32 },
    #[error("series is not a unit: constant term is {0}")]
    NonUnit(String),
    #[error("binding for {var} is not homogeneous of grade {grade}")]
    GradeViolation { var: String, grade: u32 },
    #[error("non-integral coefficient {value} on {monomial}")]
    NonIntegralCoefficient { monomial: String, value: String },
    #[error("unknown bundle symbol {0}")]
    UnknownSymbol(String),
    #[error("variable {0} has no counterpart in the target context")]
    MissingVariable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integrand is not homogeneous of degree {expected} (found degree {found})")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("balanced splitting type {0}: its degeneracy locus is the whole base")]
    Balanced(String),
    #[error("estimated work {estimate} exceeds the budget of {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("fixed-point evaluation failed: {0}")]
    Numerical(String),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
}
