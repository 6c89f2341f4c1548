use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cell ({row}, {col}) lies outside the diagram")]
    CellOutside { row: usize, col: usize },

    #[error("antisymmetric space of {n} factors of dimension {d} is empty")]
    EmptySpace { d: usize, n: usize },

    #[error("irrep {0} has zero multiplicity in this dimension")]
    ZeroMultiplicity(String),

    #[error("parameters out of range: {0}")]
    OutOfRange(String),

    #[error("operator side {side} exceeds the configured cap {cap}")]
    SizeCap { side: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
