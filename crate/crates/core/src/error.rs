use thiserror::Error;

/// Errors produced by the nonlinear turbo code toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid octal digit {digit:?} in label {label:?}")]
    InvalidOctalDigit { label: String, digit: char },
    #[error("octal label {label:?} does not encode a {width}-bit row")]
    LabelWidthMismatch { label: String, width: usize },
    #[error("row width {0} is outside the supported range 1..=32")]
    UnsupportedWidth(usize),
    #[error("invalid trellis topology: {0}")]
    InvalidTopology(String),
    #[error("invalid trellis: {0}")]
    InvalidTrellis(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "target ones count {ones} is degenerate for a {rows}x{width} sub-table (all-zero or all-one)"
    )]
    DegenerateOnesCount { ones: usize, rows: usize, width: usize },
    #[error("no sub-table with {ones} ones has branch distance above {floor}; choose a smaller branch-distance floor")]
    BranchInfeasible { ones: usize, floor: u32 },
    #[error("merge distance {floor} not reached after {retries} permutation draws; choose a smaller merge-distance floor")]
    MergeRetriesExhausted { floor: u32, retries: usize },
    #[error("rate point ({r1}, {r2}) lies outside the capacity region")]
    OutsideRegion { r1: f64, r2: f64 },
    #[error("code file: {0}")]
    CodeFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
