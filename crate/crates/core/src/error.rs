use alloc::string::String;

/// Errors reported by the synthesis core.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("row operation needs distinct rows, got {0} twice")]
    SameRow(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("invalid gate: control and target are both {0}")]
    InvalidGate(usize),
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("layout invariant violated: {0}")]
    Layout(String),
    #[error("unexpected box input: {0}")]
    UnexpectedBox(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("state {key:#x} missing from {table} table")]
    MissingState { table: &'static str, key: u64 },
    #[error("state budget of {budget} exceeded after {explored} states (depth {depth})")]
    BudgetExceeded {
        budget: usize,
        explored: usize,
        depth: usize,
    },
    #[error("solver mismatch: {0}")]
    SolverMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
