use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error("bundle error: {0}")]
    Bundle(String),

    #[error("conversion error: {0}")]
    Convert(String),

    #[error(transparent)]
    Num(#[from] numcore::NumError),

    #[error(transparent)]
    Gan(#[from] cyclegan::GanError),

    #[error(transparent)]
    Feat(#[from] vocoderfeat::FeatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
