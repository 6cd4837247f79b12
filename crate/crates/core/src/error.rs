use thiserror::Error;

/// Errors produced by the simulator, circuit builders and database model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("qubit {0} used more than once in a single gate")]
    DuplicateQubit(usize),

    #[error("register width mismatch: expected {expected} qubits, got {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("invalid key \"{0}\": expected a non-empty string of '0' and '1'")]
    InvalidKey(String),

    #[error("duplicate key \"{0}\"")]
    DuplicateKey(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("unknown scenario \"{0}\"")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
