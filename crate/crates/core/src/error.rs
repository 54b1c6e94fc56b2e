use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed cell token {token:?}")]
    ParseCell { token: String },

    #[error("dimension mismatch in {what}: expected {expected_rows}x{expected_cols}, found {rows}x{cols}")]
    DimensionMismatch {
        what: &'static str,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("ragged panel: row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("insufficient history: {required} date columns required, {available} available")]
    InsufficientHistory { required: usize, available: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-positive {what} at row {row}, column {col}")]
    NonPositive {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("rank {rank} exceeds universe size {universe}")]
    TierOutOfRange { rank: usize, universe: usize },

    #[error("asset {name:?} not found")]
    BitcoinNotFound { name: String },

    #[error("asset {name:?} matched {count} rows")]
    BitcoinAmbiguous { name: String, count: usize },

    #[error("asset {name:?} was removed by the data filters")]
    BitcoinFiltered { name: String },

    #[error("non-finite or non-positive volatility for signaled asset {asset}")]
    BadVolatility { asset: usize },

    #[error("non-finite return for weighted asset {asset}")]
    NonFiniteReturn { asset: usize },

    #[error("series too short: {len} values, at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("zero variance series")]
    ZeroVariance,

    #[error("empty asset selection")]
    EmptySelection,
}
