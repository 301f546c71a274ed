use thiserror::Error;

#[derive(Debug, Error)]
pub enum GanError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("training error: {0}")]
    Train(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Num(#[from] numcore::NumError),

    #[error(transparent)]
    Feat(#[from] vocoderfeat::FeatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
