use thiserror::Error;

pub type Result<T> = std::result::Result<T, NccError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NccError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("atlas load error: {0}")]
    Load(String),
    #[error("atlas validation error in row {row}: {msg}")]
    Validation { row: String, msg: String },
}
