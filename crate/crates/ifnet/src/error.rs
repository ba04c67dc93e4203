//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{kind} index {index} out of range 1..={limit}")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("empty {0} set in message label")]
    EmptyLabelSet(&'static str),
    #[error("duplicate message label M_{{{tx}}}^{{{rx}}}")]
    DuplicateLabel { tx: String, rx: String },
    #[error("pmf row {row} sums to {sum}, expected 1 within 1e-9")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("pmf entry at ({row},{col}) is negative")]
    NegativePmfEntry { row: usize, col: usize },
    #[error("gain matrix must be {k2}x{k1}, got {rows}x{cols}")]
    BadGainShape {
        k2: usize,
        k1: usize,
        rows: usize,
        cols: usize,
    },
    #[error("non-finite channel gain at ({row},{col})")]
    NonFiniteGain { row: usize, col: usize },
    #[error("power constraint {index} is negative")]
    NegativePower { index: usize },
    #[error("`order` must be a permutation of 1..={k2}")]
    BadOrder { k2: usize },
    #[error("spec has no messages")]
    NoMessages,
    #[error("duplicate transmitter set {0} in graph input")]
    DuplicateTxSet(String),
    #[error("label cap exceeded: {count} labels, cap {cap}")]
    LabelCapExceeded { count: usize, cap: usize },
    #[error("operation requires a single-receiver message set, found rx {0}")]
    MultiReceiverLabel(String),
    #[error("operation requires a single-transmitter message set, found tx {0}")]
    MultiTransmitterLabel(String),
    #[error("receiver order enumeration capped at k2 <= {cap}, spec has {k2}")]
    OrderCapExceeded { k2: usize, cap: usize },
    #[error("enumeration budget exceeded: {needed} evaluations, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("spec has no {0} channel payload")]
    MissingChannel(&'static str),
    #[error("gain row {0} is all zero")]
    ZeroGainRow(usize),
    #[error("channel alphabets do not match: {0}")]
    AlphabetMismatch(String),
    #[error("transmitter groups invalid: {0}")]
    BadStructure(String),
    #[error("declared structure inconsistent with channel: {0}")]
    StructureMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code class: 2 for validation problems, 3 for cap/budget limits.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LabelCapExceeded { .. }
            | Error::OrderCapExceeded { .. }
            | Error::BudgetExceeded { .. } => 3,
            _ => 2,
        }
    }
}
