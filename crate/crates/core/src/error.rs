use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {n} outside 1..={max}")]
    QubitCount { n: usize, max: usize },
    #[error("qubit index {q} out of range for {n} qubits")]
    QubitOutOfRange { q: usize, n: usize },
    #[error("parity check needs two distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("forced branch has probability {0:e}, at or below the pruning threshold")]
    ImpossibleBranch(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("amplitude list contains a non-finite value")]
    NonFinite,
    #[error("malformed schedule: {0}")]
    MalformedSchedule(String),
    #[error("two-electron state has weight {0:e} on a doubly occupied arm")]
    Bunched(f64),
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("graph error: {0}")]
    Graph(String),
    #[error("cluster preparation needs at least 2 qubits, got {0}")]
    ChainTooShort(usize),
    #[error("correction table supports 2..={max} qubits, got {n}")]
    TableSize { n: usize, max: usize },
    #[error("no Pauli correction found for outcome pattern {0}")]
    NoCorrectionFound(String),
    #[error("qubit {0} is not a fresh |+> factor")]
    NotFreshPlus(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
