use thiserror::Error;

/// Errors reported by table construction, clone operations, circuit
/// evaluation and the constructive gadgets.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("arity {arity} out of range (maximum {max})")]
    ArityOutOfRange { arity: usize, max: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("table of arity {arity} needs {expected} values, got {got}")]
    LengthMismatch {
        arity: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("negative entry {value} at index {index} in a non-negative table")]
    NegativeEntry { index: usize, value: f64 },

    #[error("not a permutation of the argument positions")]
    InvalidPermutation,

    #[error("invalid pinning template: {0}")]
    BadTemplate(String),

    #[error("operation requires a non-negative table")]
    SignedInput,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid circuit: {0}")]
    BadCircuit(String),

    #[error("realized function has negative entry {value} at index {index}")]
    NegativeRealization { index: usize, value: f64 },

    #[error("internal verification failed: {0}")]
    VerificationFailed(String),

    #[error("approximation plan out of range: {0}")]
    PlanOutOfRange(String),

    #[error("malformed witness sequence: {0}")]
    MalformedWitness(String),

    #[error("invalid input: {0}")]
    Json(String),
}
