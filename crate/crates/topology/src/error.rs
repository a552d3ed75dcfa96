use knotgenus_core::OrbitError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopoError {
    /// The gluing table is not a well-formed involution.
    #[error("malformed gluing table: {0}")]
    Structure(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("construction invariant violated: {0}")]
    Invariant(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("witness rejected: {0}")]
    Witness(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

pub type Result<T> = std::result::Result<T, TopoError>;

impl From<serde_json::Error> for TopoError {
    fn from(e: serde_json::Error) -> Self {
        TopoError::Json(e.to_string())
    }
}
