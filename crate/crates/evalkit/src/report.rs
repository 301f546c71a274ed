use crate::adapter::Transcriber;
use crate::align::{levenshtein_align, EditCounts};
use crate::error::EvalError;
use crate::manifest::CorpusManifest;
use crate::metrics::{normalize_text_with, ser, wer, NormalizeOptions};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// One audio variant to score: the original corpus files, or front-end
/// outputs mirrored under `wav_dir`.
#[derive(Debug, Clone)]
pub struct Condition {
    pub name: String,
    pub wav_dir: Option<PathBuf>,
}

impl Condition {
    pub fn original(name: &str) -> Self {
        Condition { name: name.to_string(), wav_dir: None }
    }

    pub fn converted(name: &str, wav_dir: PathBuf) -> Self {
        Condition { name: name.to_string(), wav_dir: Some(wav_dir) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptionFailure {
    pub utterance_id: String,
    pub message: String,
}

/// Pooled scores for one condition; deltas are against the first condition
/// in the report (error-rate reduction is positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionMetrics {
    pub condition: String,
    pub wer: f64,
    pub ser: f64,
    pub cer: f64,
    pub n: usize,
    pub delta_wer: f64,
    pub delta_ser: f64,
    pub valid: bool,
    pub failures: Vec<TranscriptionFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub conditions: Vec<ConditionMetrics>,
}

impl MetricsReport {
    pub fn to_json(&self) -> Result<String, EvalError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fixed-width table, one condition per row; positive deltas are
    /// error-rate reductions relative to the first condition.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<16} {:>4} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            "condition", "n", "WER%", "SER%", "CER%", "dWER", "dSER"
        ));
        for c in &self.conditions {
            let tag = if c.valid { "" } else { "  [invalid]" };
            out.push_str(&format!(
                "{:<16} {:>4} {:>8.2} {:>8.2} {:>8.2} {:>+8.2} {:>+8.2}{}\n",
                c.condition, c.n, c.wer, c.ser, c.cer, c.delta_wer, c.delta_ser, tag
            ));
        }
        out
    }
}

/// Transcribes every manifest row under every condition and pools scores.
///
/// Rows are processed in utterance-id order so the report is independent of
/// manifest row order. A transcription failure scores as an empty
/// hypothesis (every reference word deleted) and is recorded; a condition
/// where every utterance failed is marked invalid.
pub fn evaluate(
    manifest: &CorpusManifest,
    conditions: &[Condition],
    adapter: &dyn Transcriber,
    opts: &NormalizeOptions,
) -> Result<MetricsReport, EvalError> {
    if manifest.is_empty() {
        return Err(EvalError::Manifest("cannot evaluate an empty manifest".to_string()));
    }
    if conditions.is_empty() {
        return Err(EvalError::Scoring("no conditions to evaluate".to_string()));
    }
    let mut rows: Vec<_> = manifest.rows().iter().collect();
    rows.sort_by(|a, b| a.utterance_id.cmp(&b.utterance_id));

    let mut scored = Vec::new();
    for cond in conditions {
        let mut word_counts =
            EditCounts { substitutions: 0, deletions: 0, insertions: 0, ref_len: 0 };
        let mut char_counts =
            EditCounts { substitutions: 0, deletions: 0, insertions: 0, ref_len: 0 };
        let mut exact = Vec::new();
        let mut failures = Vec::new();
        for row in &rows {
            let ref_tokens = normalize_text_with(&row.transcript, opts);
            if ref_tokens.is_empty() {
                return Err(EvalError::Scoring(format!(
                    "utterance {:?} has an empty reference after normalization",
                    row.utterance_id
                )));
            }
            let wav = match &cond.wav_dir {
                None => row.wav_path.clone(),
                Some(dir) => {
                    let name = row.wav_path.file_name().ok_or_else(|| {
                        EvalError::Manifest(format!(
                            "wav path {:?} has no file name",
                            row.wav_path
                        ))
                    })?;
                    dir.join(name)
                }
            };
            let hyp_tokens = match adapter.transcribe(&row.utterance_id, &wav) {
                Ok(text) => normalize_text_with(&text, opts),
                Err(e) => {
                    failures.push(TranscriptionFailure {
                        utterance_id: row.utterance_id.clone(),
                        message: e.to_string(),
                    });
                    Vec::new()
                }
            };
            let counts = levenshtein_align(&ref_tokens, &hyp_tokens)?;
            word_counts.substitutions += counts.substitutions;
            word_counts.deletions += counts.deletions;
            word_counts.insertions += counts.insertions;
            word_counts.ref_len += counts.ref_len;
            exact.push(counts.total() == 0);

            let ref_chars: Vec<char> = ref_tokens.join(" ").chars().collect();
            let hyp_chars: Vec<char> = hyp_tokens.join(" ").chars().collect();
            let cc = levenshtein_align(&ref_chars, &hyp_chars)?;
            char_counts.substitutions += cc.substitutions;
            char_counts.deletions += cc.deletions;
            char_counts.insertions += cc.insertions;
            char_counts.ref_len += cc.ref_len;
        }
        scored.push(ConditionMetrics {
            condition: cond.name.clone(),
            wer: wer(&word_counts)?,
            ser: ser(&exact)?,
            cer: wer(&char_counts)?,
            n: rows.len(),
            delta_wer: 0.0,
            delta_ser: 0.0,
            valid: failures.len() < rows.len(),
            failures,
        });
    }

    let (base_wer, base_ser) = (scored[0].wer, scored[0].ser);
    for c in &mut scored {
        c.delta_wer = base_wer - c.wer;
        c.delta_ser = base_ser - c.ser;
    }
    Ok(MetricsReport { conditions: scored })
}
