use thiserror::Error;

/// Errors raised by the workbench operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition of the called operation does not hold.
    #[error("input error: {0}")]
    Input(String),

    /// A file or string could not be decoded.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// An exhaustive enumeration hit its configured cap.
    #[error("enumeration cap exceeded ({cap} {what})")]
    CapExceeded { what: &'static str, cap: u64 },

    /// The incompatibility-map sweep ran past its depth budget.
    #[error("depth budget exhausted at {budget} with requirement {pending} pending")]
    BudgetExhausted { budget: usize, pending: String },

    /// A diagonalization stage asked for a row the table does not have.
    #[error("table {table} exhausted: row {row} requested but only {rows} rows")]
    TableExhausted { table: usize, row: usize, rows: usize },

    /// A Gamma-space fragment is larger than the configured cap.
    #[error("fragment too large (more than {cap} elements)")]
    FragmentTooLarge { cap: usize },

    /// An internal consistency check failed. Carries a debugging dump.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
