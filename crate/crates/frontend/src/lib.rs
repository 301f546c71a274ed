//! Deployable speech conversion front-end.
//!
//! A [`FrontendBundle`] packages one direction of a trained feature mapping
//! with its normalization and corpus F0 statistics. Conversion runs
//! waveform to waveform: analyze, z-score, generator, invert the scaling,
//! re-standardize log-F0, resynthesize. Batch conversion mirrors a corpus
//! manifest into an output directory, recording failures instead of
//! aborting on them.

mod batch;
mod bundle;
mod convert;
mod error;

pub use batch::{batch_convert, ConversionFailure, ConversionRecord, ConversionReport};
pub use bundle::{Direction, FrontendBundle, BUNDLE_MAGIC};
pub use convert::{convert_features, convert_sequence, convert_utterance};
pub use error::FrontendError;
