use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("scoring error: {0}")]
    Scoring(String),

    #[error("transcriber error: {0}")]
    Transcriber(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
