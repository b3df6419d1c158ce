use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("configuration has {got} entries, graph has {expected} non-sink vertices")]
    ConfigLength { expected: usize, got: usize },

    /// `entry` is a configuration coordinate, not a vertex index.
    #[error("grain count overflow at configuration entry {entry}")]
    Overflow { entry: usize },

    #[error("monoid has {product} elements, above the cap of {cap}")]
    CapExceeded { product: u128, cap: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
