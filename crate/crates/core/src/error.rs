use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    // numerical kernels
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds tolerance)")]
    NotHermitian { asymmetry: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("negative or imaginary power of a numerically singular matrix (min eigenvalue {min_eig:.3e})")]
    SingularNegativePower { min_eig: f64 },
    #[error("linear system is inconsistent (residual {residual:.3e})")]
    Inconsistent { residual: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    // groupoids and measures
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("map is not a right group action: {0}")]
    NotAnAction(String),
    #[error("arrow {0} is not a unit")]
    NotAUnit(usize),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("groupoid has {arrows} arrows, above the size cap {cap}")]
    SizeCapExceeded { arrows: usize, cap: usize },
    #[error("weight must be strictly positive: {0}")]
    NonPositiveWeight(String),
    #[error("bad exponent {0}")]
    BadExponent(f64),
    #[error("functions live on different measured groupoids")]
    BaseMismatch,

    // operator algebra
    #[error("density of the canonical weight is not positive definite (min eigenvalue {min_eig:.3e})")]
    DensityNotPositive { min_eig: f64 },
    #[error("commutant solve failed: {0}")]
    CommutantSolveFailed(String),
    #[error("operator is not in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("operator is not decomposable over the source fibers (off-block mass {off_block:.3e})")]
    NotDecomposable { off_block: f64 },
    #[error("operator is not in L^q: {0}")]
    NotInLq(String),

    // interpolation witnesses
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("epsilon {epsilon} violates the admissibility rule (value {value:.6})")]
    EpsilonRuleViolated { epsilon: f64, value: f64 },

    // oracles and harness
    #[error("group is not abelian")]
    NotAbelian,
    #[error("groupoid is not a pair groupoid with unit Haar weights")]
    NotPairGroupoid,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
