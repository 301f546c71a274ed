use crate::bundle::FrontendBundle;
use crate::convert::convert_utterance;
use crate::error::FrontendError;
use evalkit::CorpusManifest;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use vocoderfeat::Waveform;

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionRecord {
    pub utterance_id: String,
    pub output_path: PathBuf,
    pub input_samples: usize,
    pub output_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionFailure {
    pub utterance_id: String,
    pub message: String,
}

/// What a batch run produced: one record per converted utterance plus the
/// rows that could not be converted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConversionReport {
    pub converted: Vec<ConversionRecord>,
    pub failures: Vec<ConversionFailure>,
}

/// Converts every manifest row into `out_dir`, mirroring input filenames.
///
/// Rows are processed in manifest order; a row that cannot be read,
/// converted, or written is recorded as a failure and the batch continues.
/// Only an unusable output directory (or two rows mapping to the same
/// output name) aborts, since that breaks the one-output-per-row contract.
pub fn batch_convert(
    manifest: &CorpusManifest,
    bundle: &FrontendBundle,
    out_dir: &Path,
) -> Result<ConversionReport, FrontendError> {
    bundle.validate()?;
    std::fs::create_dir_all(out_dir)?;

    let mut claimed: HashMap<PathBuf, String> = HashMap::new();
    let mut report = ConversionReport::default();
    for row in manifest.rows() {
        let name = match row.wav_path.file_name() {
            Some(n) => n.to_owned(),
            None => {
                report.failures.push(ConversionFailure {
                    utterance_id: row.utterance_id.clone(),
                    message: format!("input path {:?} has no file name", row.wav_path),
                });
                continue;
            }
        };
        let out_path = out_dir.join(&name);
        if let Some(other) = claimed.insert(out_path.clone(), row.utterance_id.clone()) {
            return Err(FrontendError::Convert(format!(
                "rows {other:?} and {:?} both map to output {out_path:?}",
                row.utterance_id
            )));
        }
        let result = Waveform::read_wav(&row.wav_path)
            .map_err(FrontendError::from)
            .and_then(|wav| Ok((wav.len(), convert_utterance(&wav, bundle)?)))
            .and_then(|(input_samples, out)| {
                out.write_wav(&out_path)?;
                Ok((input_samples, out.len()))
            });
        match result {
            Ok((input_samples, output_samples)) => report.converted.push(ConversionRecord {
                utterance_id: row.utterance_id.clone(),
                output_path: out_path,
                input_samples,
                output_samples,
            }),
            Err(e) => report.failures.push(ConversionFailure {
                utterance_id: row.utterance_id.clone(),
                message: e.to_string(),
            }),
        }
    }
    Ok(report)
}
