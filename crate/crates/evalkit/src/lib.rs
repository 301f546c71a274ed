//! Recognition scoring for front-end experiments.
//!
//! Corpus manifests name utterances, their recordings, reference
//! transcripts, and speaking-style labels. Hypotheses come from an external
//! recognizer behind the [`Transcriber`] trait (a deterministic mock serves
//! tests); transcripts are normalized into scoring tokens, aligned with
//! minimal-edit dynamic programming, and pooled into word, sentence, and
//! character error rates with per-condition deltas against the baseline.

mod adapter;
mod align;
mod error;
mod manifest;
mod metrics;
mod report;

pub use adapter::{CommandAdapter, MockAdapter, Transcriber, DEFAULT_ASR_TIMEOUT};
pub use align::{levenshtein_align, EditCounts};
pub use error::EvalError;
pub use manifest::{CorpusManifest, DomainLabel, Gender, ManifestRow, MANIFEST_HEADER};
pub use metrics::{cer, normalize_text, normalize_text_with, ser, wer, NormalizeOptions};
pub use report::{evaluate, Condition, ConditionMetrics, MetricsReport, TranscriptionFailure};
