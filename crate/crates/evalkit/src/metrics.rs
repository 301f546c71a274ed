use crate::align::{levenshtein_align, EditCounts};
use crate::error::EvalError;

/// Word error rate in percent: 100·(S+D+I)/ref_len. Insertion-heavy
/// hypotheses can push this past 100; it is deliberately not clamped.
pub fn wer(counts: &EditCounts) -> Result<f64, EvalError> {
    if counts.ref_len == 0 {
        return Err(EvalError::Scoring("reference length must be positive".to_string()));
    }
    if counts.substitutions + counts.deletions > counts.ref_len {
        return Err(EvalError::Scoring(format!(
            "inconsistent counts: S+D = {} exceeds ref_len {}",
            counts.substitutions + counts.deletions,
            counts.ref_len
        )));
    }
    Ok(100.0 * counts.total() as f64 / counts.ref_len as f64)
}

/// Sentence error rate in percent from per-utterance exact-match flags.
pub fn ser(exact_match: &[bool]) -> Result<f64, EvalError> {
    if exact_match.is_empty() {
        return Err(EvalError::Scoring("sentence error rate of zero utterances".to_string()));
    }
    let errors = exact_match.iter().filter(|&&ok| !ok).count();
    Ok(100.0 * errors as f64 / exact_match.len() as f64)
}

/// Character error rate in percent: the word-level formula applied to the
/// character sequences, inter-word spaces included.
pub fn cer(reference: &str, hypothesis: &str) -> Result<f64, EvalError> {
    let r: Vec<char> = reference.chars().collect();
    let h: Vec<char> = hypothesis.chars().collect();
    let counts = levenshtein_align(&r, &h)?;
    wer(&counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Drop bracketed event tags like `[noise]` or `[laughter]` before
    /// scoring so tagging is not conflated with recognition errors.
    pub strip_tags: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { strip_tags: true }
    }
}

/// Canonical scoring form of a transcript: lowercase, bracketed tags
/// dropped, punctuation stripped except apostrophes inside a word,
/// whitespace collapsed into token boundaries.
pub fn normalize_text(raw: &str) -> Vec<String> {
    normalize_text_with(raw, &NormalizeOptions::default())
}

pub fn normalize_text_with(raw: &str, opts: &NormalizeOptions) -> Vec<String> {
    let chars: Vec<char> = raw.chars().collect();
    let mut kept = String::with_capacity(raw.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if opts.strip_tags && c == '[' {
            if let Some(close) = chars[i..].iter().position(|&c| c == ']') {
                kept.push(' ');
                i += close + 1;
                continue;
            }
        }
        if c.is_alphanumeric() {
            kept.extend(c.to_lowercase());
        } else if c == '\'' {
            let prev_ok = i > 0 && chars[i - 1].is_alphanumeric();
            let next_ok = i + 1 < chars.len() && chars[i + 1].is_alphanumeric();
            kept.push(if prev_ok && next_ok { '\'' } else { ' ' });
        } else {
            kept.push(' ');
        }
        i += 1;
    }
    kept.split_whitespace().map(str::to_string).collect()
}
