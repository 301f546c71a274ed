use crate::error::EvalError;
use serde::{Deserialize, Serialize};

/// Outcome of a minimal-cost alignment between a reference and a
/// hypothesis token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub ref_len: usize,
}

impl EditCounts {
    pub fn total(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

/// Minimal unit-cost edit alignment via dynamic programming.
///
/// Among co-optimal alignments the backtrace prefers substitution over
/// insertion over deletion, so the reported split of the (unique) minimal
/// total into S/D/I is deterministic.
pub fn levenshtein_align<T: PartialEq>(refr: &[T], hyp: &[T]) -> Result<EditCounts, EvalError> {
    if refr.is_empty() {
        return Err(EvalError::Scoring("reference must be non-empty".to_string()));
    }
    let n = refr.len();
    let m = hyp.len();
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=m {
        d[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = d[i - 1][j - 1] + usize::from(refr[i - 1] != hyp[j - 1]);
            let ins = d[i][j - 1] + 1;
            let del = d[i - 1][j] + 1;
            d[i][j] = sub.min(ins).min(del);
        }
    }

    let (mut i, mut j) = (n, m);
    let mut counts =
        EditCounts { substitutions: 0, deletions: 0, insertions: 0, ref_len: n };
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && refr[i - 1] == hyp[j - 1] && d[i][j] == d[i - 1][j - 1] {
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1 && refr[i - 1] != hyp[j - 1] {
            counts.substitutions += 1;
            i -= 1;
            j -= 1;
        } else if j > 0 && d[i][j] == d[i][j - 1] + 1 {
            counts.insertions += 1;
            j -= 1;
        } else {
            counts.deletions += 1;
            i -= 1;
        }
    }
    debug_assert!(counts.substitutions + counts.deletions <= n);
    Ok(counts)
}
