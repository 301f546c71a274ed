use thiserror::Error;

#[derive(Error, Debug)]
pub enum FeatError {
    #[error("waveform: {0}")]
    Waveform(String),

    #[error("signal too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("unsupported wav format: {0}")]
    WavFormat(String),

    #[error("feature file: {0}")]
    FeatureFile(String),

    #[error("f0 statistics: {0}")]
    F0Stats(String),

    #[error("{0}")]
    Invalid(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("wav i/o: {0}")]
    Wav(#[from] hound::Error),
}
