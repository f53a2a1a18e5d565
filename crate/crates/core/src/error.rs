use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid subsystem layout: {0}")]
    InvalidLayout(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("empty set of subsystems to keep")]
    EmptyKeep,

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("Kraus operators are not normalized (defect {0:.3e})")]
    KrausNotNormalized(f64),

    #[error("vectors are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("parameter `{name}` = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("rank {rank} is out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two independent evaluation routes disagreed; indicates a library bug.
    #[error("internal consistency failure in {quantity}: {left} vs {right}")]
    Inconsistent {
        quantity: &'static str,
        left: f64,
        right: f64,
    },

    /// The deficit passed the tolerance but the recovered states are not orthonormal.
    #[error("tolerance inconsistency: deficit {deficit:.3e} accepted but relative states deviate from orthonormal by {deviation:.3e}")]
    ToleranceInconsistency { deficit: f64, deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
