use thiserror::Error;

/// Everything that can go wrong while building states, measures and measurements.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot read input: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix has a negative eigenvalue {eigenvalue:e}")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("bad weights: {0}")]
    BadWeights(String),

    #[error("bad rank {rank} for dimension {dim}")]
    BadRank { dim: usize, rank: usize },

    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    BadAlpha(f64),

    #[error("Bloch vector norm {norm} exceeds 1")]
    BadBlochVector { norm: f64 },

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("member count mismatch: expected {expected}, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("wrong member count: expected {expected}, found {found}")]
    WrongCount { expected: usize, found: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("incoherent-channel construction condition not met (lhs {lhs} > 1)")]
    ConditionNotMet { lhs: f64 },

    #[error("diagonal entry {index} is zero")]
    ZeroDiagonal { index: usize },

    #[error("Kraus operator {index} is not incoherent")]
    NotIncoherent { index: usize },

    #[error("Kraus operators are not complete (max deviation {deviation:e})")]
    IncompleteKraus { deviation: f64 },

    #[error("POVM element {index} is not positive (min eigenvalue {min_eigenvalue:e})")]
    PovmNotPositive { index: usize, min_eigenvalue: f64 },

    #[error("POVM elements do not resolve the identity (max deviation {deviation:e})")]
    IncompletePovm { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("trace has imaginary residue {value:e}")]
    ImaginaryResidue { value: f64 },

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("LSM success {lsm} differs from closed form {closed_form}")]
    ClosedFormMismatch { lsm: f64, closed_form: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
