use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: String },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("kernel `{name}` returned {value} at ({x}, {y})")]
    KernelValue { name: String, x: f64, y: f64, value: f64 },

    #[error("dimension {n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("index {index} out of range for dimension {n}")]
    OutOfRange { index: usize, n: usize },

    #[error("no Perron vector for zero atom {atom}")]
    ZeroAtom { atom: usize },

    #[error("power iteration did not converge after {iters} iterations (estimate {estimate}, bracket gap {gap})")]
    NonConvergence { iters: usize, estimate: f64, gap: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("operation requires the exact rational backend")]
    ExactRequired,

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A structural theorem was violated by computed data. `theorem` names it.
    #[error("invariant violation [{theorem}]: {detail}")]
    Invariant { theorem: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invariant(theorem: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            theorem,
            detail: detail.into(),
        }
    }

    /// True for failures that indicate a broken structural invariant rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant { .. })
    }
}
