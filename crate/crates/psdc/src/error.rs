use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("monomial basis for n={n}, d={d} does not fit in memory indices")]
    SizeOverflow { n: usize, d: u32 },

    #[error("expected a homogeneous polynomial of degree {expected}, found a term of degree {found}")]
    NotHomogeneous { expected: u32, found: u32 },

    #[error("power-sum weights need an even degree, got {0}")]
    OddDegree(u32),

    #[error("homogenization target degree {target} is below the polynomial degree {degree}")]
    TargetDegreeTooLow { target: u32, degree: u32 },

    #[error("basis solve residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("projection did not converge within {sweeps} sweeps")]
    ProjectionStalled { sweeps: usize },

    #[error("point lies outside the feasible set")]
    InfeasiblePoint,

    #[error("direction violates the equality constraints")]
    EqualityViolated,

    #[error("curvature parameter rho must be positive, got {0}")]
    NonPositiveRho(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
