use thiserror::Error;

/// Errors raised by tensor construction, tape operations and the optimizer.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum NumError {
    /// A shape precondition failed; the message names the offending dimension.
    #[error("{op}: {msg}")]
    Shape { op: &'static str, msg: String },

    /// A forward op produced NaN or Inf from finite inputs (overflow is an
    /// error, never a silent value).
    #[error("{op}: non-finite value produced")]
    NonFinite { op: &'static str },

    #[error("backward: loss must be a scalar, got shape {shape:?}")]
    NonScalarLoss { shape: Vec<usize> },

    #[error("backward: loss tensor was not recorded on this tape")]
    NotOnTape,

    #[error("adam: non-finite gradient for parameter {index}")]
    NonFiniteGrad { index: usize },

    #[error("{0}")]
    Invalid(String),
}

impl NumError {
    pub(crate) fn shape(op: &'static str, msg: impl Into<String>) -> Self {
        NumError::Shape { op, msg: msg.into() }
    }
}
