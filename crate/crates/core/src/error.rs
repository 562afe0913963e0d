use thiserror::Error;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input (exit code 2).
    Input,
    /// A mathematical precondition does not hold (exit code 3).
    Precondition,
    /// A numerical procedure failed (exit code 4).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable lists differ")]
    VariableMismatch,
    #[error("frame is not in graphical normal form: {0}")]
    NonGraphical(String),
    #[error("coframe does not annihilate the frame: {0}")]
    CoframePairing(String),
    #[error("invalid document: {0}")]
    Schema(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("covector lies on the zero section")]
    ZeroFiber,
    #[error("point is not on stratum `{stratum}`: {reason}")]
    NotOnStratum { stratum: String, reason: String },
    #[error("kernel rank {found}, expected {expected}")]
    KernelRank { expected: usize, found: usize },
    #[error("kernel rank is not constant on stratum `{stratum}`: {ranks:?}")]
    NonConstantRank { stratum: String, ranks: Vec<usize> },
    #[error("differentials of the defining equations are dependent at the point")]
    DependentEquations,
    #[error("curve is not regular: {0}")]
    NotRegular(String),
    #[error("ill-conditioned variational family (condition number {0:e})")]
    IllConditioned(f64),
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e}, last iterate {last:?})")]
    NewtonDiverged { iterations: usize, residual: f64, last: Vec<f64> },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. }
            | Error::UnknownVariable(_)
            | Error::DimensionMismatch { .. }
            | Error::VariableMismatch
            | Error::NonGraphical(_)
            | Error::CoframePairing(_)
            | Error::Schema(_)
            | Error::InvalidArgument(_)
            | Error::ZeroFiber
            | Error::NotOnStratum { .. }
            | Error::DependentEquations
            | Error::Io(_) => ErrorKind::Input,
            Error::KernelRank { .. }
            | Error::NonConstantRank { .. }
            | Error::NotRegular(_)
            | Error::IllConditioned(_) => ErrorKind::Precondition,
            Error::NewtonDiverged { .. } | Error::Numerical(_) | Error::Invariant(_) => {
                ErrorKind::Numerical
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Input => 2,
            ErrorKind::Precondition => 3,
            ErrorKind::Numerical => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
