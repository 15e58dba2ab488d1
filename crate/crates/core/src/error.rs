use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix of dimension {dim} needs {expected} entries, got {got}")]
    EntryCount {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error(
        "subsystem dimensions {dims:?} multiply to {product}, but the operand has dimension {dim}"
    )]
    DimensionMismatch {
        dims: Vec<usize>,
        product: usize,
        dim: usize,
    },
    #[error("empty keep set for partial trace")]
    EmptyKeep,
    #[error("keep set {keep:?} is not a strictly increasing subset of 0..{n}")]
    InvalidKeep { keep: Vec<usize>, n: usize },
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("eigenvalue {0:e} is below the PSD tolerance")]
    NegativeEigenvalue(f64),
    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("expected subsystem dimensions {expected:?}, got {got:?}")]
    WrongDims {
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("invalid subsystem dimensions {0:?}")]
    InvalidDims(Vec<usize>),
    #[error("trace {0} differs from 1")]
    NotUnitTrace(f64),
    #[error("invalid bipartition {side:?} of {n} subsystems")]
    InvalidCut { side: Vec<usize>, n: usize },
    #[error("cut side {0:?} is not a single qubit")]
    CutNotQubit(Vec<usize>),
    #[error("unknown state name `{0}`")]
    UnknownState(String),
    #[error("unknown functional `{0}`")]
    InvalidFunctional(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("rank {rank} must satisfy 1 <= rank <= {dim}")]
    InvalidRank { rank: usize, dim: usize },
    #[error("empty record list")]
    EmptyRecords,
    #[error("empty sample: {0}")]
    EmptySample(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid measurement outcome ({0}, {1})")]
    InvalidOutcome(u8, u8),
}

pub type Result<T> = std::result::Result<T, Error>;
