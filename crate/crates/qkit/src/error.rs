use thiserror::Error;

/// Errors raised by toolkit operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),
    #[error("unknown gate '{0}'")]
    UnknownGate(String),
    #[error("gate '{name}' expects {expected} parameters, got {got}")]
    ParamCount { name: String, expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("execution error: {0}")]
    Execution(String),
    #[error("CNOT between qubits {0} and {1} cannot be routed on this topology")]
    Unroutable(usize, usize),
    #[error("problem too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
