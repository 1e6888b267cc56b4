use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("label not present: {0}")]
    LabelNotPresent(f64),
    #[error("degenerate labels: both +1 and -1 are required")]
    DegenerateLabels,
    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("row {row} has length {len}, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("non-positive curvature")]
    NonPositiveCurvature,
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}
