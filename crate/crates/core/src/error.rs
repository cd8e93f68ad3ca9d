use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic 2 is not supported: 2 must be invertible in the coefficient field")]
    CharacteristicTwo,
    #[error("{0} is neither 0 nor an odd prime")]
    BadCharacteristic(u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("window of {size} coordinates exceeds the cap of {cap}")]
    WindowCap { size: usize, cap: usize },
    #[error("element is not supported in the abelian part A")]
    NotInA,
    #[error("T-graph is not simply connected: {0}")]
    NotSimplyConnected(String),
    #[error("box too small: {0}")]
    BoxTooSmall(String),
    #[error("inconsistent tail bound: {0}")]
    InconsistentTail(String),
}

pub type Result<T> = std::result::Result<T, Error>;
