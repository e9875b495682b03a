use thiserror::Error;

use crate::circuit::GateKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gate {0:?} cannot be decomposed")]
    UnsupportedGate(GateKind),
    #[error("fusion not applicable: {0}")]
    FusionNotApplicable(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("qubit {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid qubit order: {0}")]
    InvalidOrder(String),
    #[error("interaction graph is not complete; use partial routing")]
    NotComplete,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),
    #[error("invalid noise parameter: {0}")]
    InvalidNoise(String),
    #[error("missing duration for gate {0:?}")]
    MissingDuration(GateKind),
    #[error("invalid scale factor {0}")]
    InvalidScale(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error: {field}: {msg}")]
    Validation { field: String, msg: String },
    #[error("no linear chain of length {0} fits the device")]
    NoChain(usize),
    #[error("chain/circuit mismatch: {0}")]
    ChainMismatch(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
