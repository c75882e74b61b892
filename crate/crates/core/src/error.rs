//! Error type shared by all modules, with process exit codes for the CLI.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("lattice too small: {0}")]
    SizeTooSmall(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("state space too large: {0}")]
    TooLarge(String),

    #[error("transfer operator too wide: {0}")]
    TooWide(String),

    #[error("log-space underflow: {0}")]
    NumericalUnderflow(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("too close to the critical singularity: {0}")]
    TooCloseToSingularity(String),

    #[error("series too short: {0}")]
    SeriesTooShort(String),

    #[error("no cumulant crossing in range: {0}")]
    NoCrossing(String),

    #[error("loop not closed: {0}")]
    NotClosed(String),

    #[error("base point mismatch: {0}")]
    BasePointMismatch(String),

    #[error("zero or ambiguous vector on cycle: {0}")]
    ZeroVectorOnCycle(String),

    #[error("winding needs an in-plane field: {0}")]
    InPlaneRequired(String),

    #[error("side not divisible by block size: {0}")]
    NotDivisible(String),

    #[error("tie in an even block without a tie rule: {0}")]
    TieWithoutRule(String),

    #[error("side not a power of the block size: {0}")]
    NotPowerOfB(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// CLI exit code: 2 usage/bad parameters, 3 resource guard,
    /// 4 numerical failure, 5 invariant violation.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            SizeTooSmall(_) | ShapeMismatch(_) | InvalidCoupling(_) | NotClosed(_)
            | BasePointMismatch(_) | NotDivisible(_) | TieWithoutRule(_) | NotPowerOfB(_)
            | Domain(_) | Parse(_) | Io(_) => 2,
            TooLarge(_) | TooWide(_) => 3,
            NumericalUnderflow(_)
            | QuadratureNotConverged(_)
            | TooCloseToSingularity(_)
            | SeriesTooShort(_)
            | NoCrossing(_)
            | ZeroVectorOnCycle(_)
            | InPlaneRequired(_) => 4,
            InvariantViolation(_) => 5,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
