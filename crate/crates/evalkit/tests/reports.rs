//! End-to-end scoring across conditions.

use evalkit::{
    evaluate, Condition, CorpusManifest, EvalError, MetricsReport, MockAdapter,
    NormalizeOptions, Transcriber, MANIFEST_HEADER,
};
use std::path::{Path, PathBuf};

fn manifest() -> CorpusManifest {
    let text = format!(
        "{MANIFEST_HEADER}\n\
         u1\twav/u1.wav\tsee anything out there\tnormal\tspk1\tf\n\
         u2\twav/u2.wav\tthink they should get rid of it\tcreaky\tspk1\tf\n\
         u3\twav/u3.wav\tdid you watch the game\tlaughter\tspk2\tm\n"
    );
    CorpusManifest::parse(&text).unwrap()
}

fn echo_adapter(m: &CorpusManifest) -> MockAdapter {
    MockAdapter::new(
        m.rows().iter().map(|r| (r.utterance_id.clone(), r.transcript.clone())),
    )
}

/// Transcriber whose answer depends on which directory the WAV lives in,
/// standing in for original vs converted audio.
struct PerDirAdapter {
    by_dir: Vec<(PathBuf, MockAdapter)>,
}

impl Transcriber for PerDirAdapter {
    fn transcribe(&self, utterance_id: &str, wav_path: &Path) -> Result<String, EvalError> {
        let parent = wav_path.parent().unwrap_or(Path::new(""));
        for (dir, mock) in &self.by_dir {
            if parent == dir {
                return mock.transcribe(utterance_id, wav_path);
            }
        }
        Err(EvalError::Transcriber(format!("no adapter for {wav_path:?}")))
    }
}

#[test]
fn echoed_references_score_zero_everywhere() {
    let m = manifest();
    let conditions = vec![
        Condition::original("no-FE"),
        Condition::converted("FE-MFB", PathBuf::from("converted/mfb")),
        Condition::converted("FE-MFB-AP", PathBuf::from("converted/mfb_ap")),
    ];
    let report =
        evaluate(&m, &conditions, &echo_adapter(&m), &NormalizeOptions::default()).unwrap();
    assert_eq!(report.conditions.len(), 3);
    for c in &report.conditions {
        assert_eq!((c.wer, c.ser, c.cer), (0.0, 0.0, 0.0), "{}", c.condition);
        assert_eq!((c.delta_wer, c.delta_ser), (0.0, 0.0));
        assert_eq!(c.n, 3);
        assert!(c.valid);
        assert!(c.failures.is_empty());
    }
}

#[test]
fn one_missing_word_scores_wer_and_ser_together() {
    let text = format!(
        "{MANIFEST_HEADER}\nu1\twav/u1.wav\tthink they should get rid of it\tcreaky\tspk1\tf\n"
    );
    let m = CorpusManifest::parse(&text).unwrap();
    let mock = MockAdapter::new([("u1".to_string(), "think they should get rid of".to_string())]);
    let report = evaluate(
        &m,
        &[Condition::original("no-FE")],
        &mock,
        &NormalizeOptions::default(),
    )
    .unwrap();
    let c = &report.conditions[0];
    assert!((c.wer - 100.0 / 7.0).abs() < 1e-12, "{}", c.wer);
    assert_eq!(c.ser, 100.0);
    assert!(c.cer > 0.0 && c.cer < c.wer);
}

#[test]
fn deltas_equal_baseline_minus_condition_exactly() {
    let m = manifest();
    let worse = MockAdapter::new([
        ("u1".to_string(), "see anything out".to_string()),
        ("u2".to_string(), "think they should get rid of it".to_string()),
        ("u3".to_string(), "did you watch a game".to_string()),
    ]);
    let adapter = PerDirAdapter {
        by_dir: vec![
            (PathBuf::from("wav"), worse),
            (PathBuf::from("converted"), echo_adapter(&m)),
        ],
    };
    let conditions = vec![
        Condition::original("no-FE"),
        Condition::converted("FE", PathBuf::from("converted")),
    ];
    let report = evaluate(&m, &conditions, &adapter, &NormalizeOptions::default()).unwrap();
    let base = &report.conditions[0];
    assert!(base.wer > 0.0);
    for c in &report.conditions {
        assert_eq!(c.delta_wer, base.wer - c.wer);
        assert_eq!(c.delta_ser, base.ser - c.ser);
    }
    let fe = &report.conditions[1];
    assert_eq!(fe.wer, 0.0);
    assert_eq!(fe.delta_wer, base.wer);
}

#[test]
fn report_is_invariant_to_manifest_row_order() {
    let m = manifest();
    let mut rows = m.rows().to_vec();
    rows.reverse();
    let reversed = CorpusManifest::new(rows).unwrap();
    let adapter = MockAdapter::new([
        ("u1".to_string(), "see anything".to_string()),
        ("u2".to_string(), "they should get rid of it".to_string()),
        ("u3".to_string(), "did you watch the game".to_string()),
    ]);
    let conditions = vec![Condition::original("no-FE")];
    let opts = NormalizeOptions::default();
    let a = evaluate(&m, &conditions, &adapter, &opts).unwrap();
    let b = evaluate(&reversed, &conditions, &adapter, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn failures_score_as_empty_hypotheses_and_all_failed_marks_invalid() {
    let m = manifest();
    let partial = MockAdapter::new([
        ("u1".to_string(), "see anything out there".to_string()),
        ("u3".to_string(), "did you watch the game".to_string()),
    ]);
    let report = evaluate(
        &m,
        &[Condition::original("no-FE")],
        &partial,
        &NormalizeOptions::default(),
    )
    .unwrap();
    let c = &report.conditions[0];
    assert!(c.valid);
    assert_eq!(c.failures.len(), 1);
    assert_eq!(c.failures[0].utterance_id, "u2");
    assert!((c.wer - 100.0 * 7.0 / 16.0).abs() < 1e-12, "{}", c.wer);
    assert!((c.ser - 100.0 / 3.0).abs() < 1e-12);

    let none = MockAdapter::default();
    let report =
        evaluate(&m, &[Condition::original("no-FE")], &none, &NormalizeOptions::default())
            .unwrap();
    let c = &report.conditions[0];
    assert!(!c.valid);
    assert_eq!(c.failures.len(), 3);
    assert_eq!(c.wer, 100.0);
    assert_eq!(c.ser, 100.0);
}

#[test]
fn reports_round_trip_through_json_and_render_as_a_table() {
    let m = manifest();
    let report = evaluate(
        &m,
        &[Condition::original("no-FE"), Condition::converted("FE", PathBuf::from("c"))],
        &echo_adapter(&m),
        &NormalizeOptions::default(),
    )
    .unwrap();
    let json = report.to_json().unwrap();
    assert_eq!(MetricsReport::from_json(&json).unwrap(), report);

    let table = report.to_table();
    assert!(table.contains("no-FE"), "{table}");
    assert!(table.contains("WER%"), "{table}");
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn empty_manifests_cannot_be_evaluated() {
    let m = CorpusManifest::parse(&format!("{MANIFEST_HEADER}\n")).unwrap();
    assert!(m.is_empty());
    let err = evaluate(
        &m,
        &[Condition::original("no-FE")],
        &MockAdapter::default(),
        &NormalizeOptions::default(),
    )
    .unwrap_err();
    assert!(err.to_string().contains("empty"), "{err}");
}
