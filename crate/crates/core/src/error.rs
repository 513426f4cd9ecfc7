use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::observables::ObservableError;
use crate::representation::RepresentationError;
use crate::sharp::BooleanStructureFailure;
use crate::spectral::SpectralError;
use crate::states::StateError;

/// Malformed input documents.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("not a rational number: {0:?}")]
    Rational(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e.to_string())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Sharp(#[from] BooleanStructureFailure),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
