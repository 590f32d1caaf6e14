use thiserror::Error;

/// Errors raised by the emulator and its oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("capacity exceeded: {requested} qubits requested, cap is {cap}")]
    Capacity { requested: usize, cap: usize },
    #[error("size cap exceeded: {what} needs {requested} qubits, limit {limit}")]
    SizeCap {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("zero input: {0}")]
    ZeroInput(&'static str),
    #[error("qubit {qubit} out of range for {n_qubits}-qubit state")]
    QubitRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} used more than once in a gate")]
    DuplicateQubit(usize),
    #[error("degenerate projection: block weight {0:e}")]
    DegenerateProjection(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("CFL violation: {0}")]
    Cfl(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
