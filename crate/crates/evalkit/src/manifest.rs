use crate::error::EvalError;
use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

/// Speaking-style condition an utterance was recorded under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainLabel {
    Normal,
    Laughter,
    Creaky,
}

impl DomainLabel {
    fn parse(s: &str) -> Result<Self, EvalError> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(DomainLabel::Normal),
            "laughter" => Ok(DomainLabel::Laughter),
            "creaky" => Ok(DomainLabel::Creaky),
            other => Err(EvalError::Manifest(format!(
                "unknown domain label {other:?}; expected normal, laughter, or creaky"
            ))),
        }
    }
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainLabel::Normal => "normal",
            DomainLabel::Laughter => "laughter",
            DomainLabel::Creaky => "creaky",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    fn parse(s: &str) -> Result<Self, EvalError> {
        match s.to_ascii_lowercase().as_str() {
            "f" | "female" => Ok(Gender::Female),
            "m" | "male" => Ok(Gender::Male),
            other => {
                Err(EvalError::Manifest(format!("unknown gender {other:?}; expected f or m")))
            }
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Female => "f",
            Gender::Male => "m",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub utterance_id: String,
    pub wav_path: PathBuf,
    pub transcript: String,
    pub label: DomainLabel,
    pub speaker_id: String,
    pub gender: Gender,
}

pub const MANIFEST_HEADER: &str = "utterance_id\twav_path\ttranscript\tlabel\tspeaker_id\tgender";

/// A corpus listing: one row per utterance, unique ids, labels from the
/// closed normal/laughter/creaky set.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    rows: Vec<ManifestRow>,
}

impl CorpusManifest {
    pub fn new(rows: Vec<ManifestRow>) -> Result<Self, EvalError> {
        let mut seen = HashSet::new();
        for row in &rows {
            if row.utterance_id.is_empty() {
                return Err(EvalError::Manifest("empty utterance_id".to_string()));
            }
            if !seen.insert(row.utterance_id.clone()) {
                return Err(EvalError::Manifest(format!(
                    "duplicate utterance_id {:?}",
                    row.utterance_id
                )));
            }
        }
        Ok(CorpusManifest { rows })
    }

    /// Parses the tab-separated form: a fixed header line, then one
    /// 6-column row per utterance. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) => break l,
                None => return Err(EvalError::Manifest("empty manifest".to_string())),
            }
        };
        if header.trim_end() != MANIFEST_HEADER {
            return Err(EvalError::Manifest(format!(
                "bad header {header:?}; expected {MANIFEST_HEADER:?}"
            )));
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 6 {
                return Err(EvalError::Manifest(format!(
                    "line {}: expected 6 tab-separated fields, found {}",
                    idx + 1,
                    fields.len()
                )));
            }
            rows.push(ManifestRow {
                utterance_id: fields[0].to_string(),
                wav_path: PathBuf::from(fields[1]),
                transcript: fields[2].to_string(),
                label: DomainLabel::parse(fields[3])
                    .map_err(|e| EvalError::Manifest(format!("line {}: {e}", idx + 1)))?,
                speaker_id: fields[4].to_string(),
                gender: Gender::parse(fields[5])
                    .map_err(|e| EvalError::Manifest(format!("line {}: {e}", idx + 1)))?,
            });
        }
        CorpusManifest::new(rows)
    }

    pub fn read(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)?;
        CorpusManifest::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), EvalError> {
        let mut out = String::from(MANIFEST_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.utterance_id,
                r.wav_path.display(),
                r.transcript,
                r.label,
                r.speaker_id,
                r.gender
            ));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn rows(&self) -> &[ManifestRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
