//! Transcriber adapters: the mock table and external commands.

use evalkit::{normalize_text, CommandAdapter, MockAdapter, Transcriber};
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::Duration;

fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    let mut perms = std::fs::metadata(&path).unwrap().permissions();
    perms.set_mode(0o755);
    std::fs::set_permissions(&path, perms).unwrap();
    path
}

#[test]
fn mock_adapter_returns_mapped_strings() {
    let mock = MockAdapter::new([
        ("u1".to_string(), "see anything out there".to_string()),
        ("u2".to_string(), "think they should get rid of it".to_string()),
    ]);
    assert_eq!(
        mock.transcribe("u1", Path::new("ignored.wav")).unwrap(),
        "see anything out there"
    );
    assert_eq!(
        mock.transcribe("u2", Path::new("ignored.wav")).unwrap(),
        "think they should get rid of it"
    );
    let err = mock.transcribe("u3", Path::new("ignored.wav")).unwrap_err();
    assert!(err.to_string().contains("u3"), "{err}");
}

#[test]
fn command_output_with_trailing_newline_scores_like_without() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(dir.path(), "asr", r#"echo "see anything out there""#);
    let adapter = CommandAdapter::new(&format!("{} {{wav}}", cmd.display()));
    let hyp = adapter.transcribe("u1", Path::new("x.wav")).unwrap();
    assert!(hyp.ends_with('\n'));
    assert_eq!(normalize_text(&hyp), normalize_text("see anything out there"));
}

#[test]
fn wav_path_reaches_the_command_as_an_argument() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(dir.path(), "echo-arg", r#"echo "$1""#);
    let with_placeholder = CommandAdapter::new(&format!("{} {{wav}}", cmd.display()));
    let out = with_placeholder.transcribe("u1", Path::new("/tmp/clip.wav")).unwrap();
    assert_eq!(out.trim_end(), "/tmp/clip.wav");

    let appended = CommandAdapter::new(&cmd.display().to_string());
    let out = appended.transcribe("u1", Path::new("/tmp/clip.wav")).unwrap();
    assert_eq!(out.trim_end(), "/tmp/clip.wav");
}

#[test]
fn missing_command_is_an_error() {
    let adapter = CommandAdapter::new("definitely-not-a-real-recognizer {wav}");
    let err = adapter.transcribe("u1", Path::new("x.wav")).unwrap_err();
    assert!(err.to_string().contains("spawn"), "{err}");
}

#[test]
fn nonzero_exit_reports_captured_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(dir.path(), "broken", "echo 'model not found' >&2\nexit 3");
    let adapter = CommandAdapter::new(&format!("{} {{wav}}", cmd.display()));
    let err = adapter.transcribe("u1", Path::new("x.wav")).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("model not found"), "{msg}");
}

#[test]
fn slow_commands_hit_the_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = script(dir.path(), "slow", "sleep 5");
    let mut adapter = CommandAdapter::new(&format!("{} {{wav}}", cmd.display()));
    adapter.timeout = Duration::from_millis(60);
    let err = adapter.transcribe("u1", Path::new("x.wav")).unwrap_err();
    assert!(err.to_string().contains("timed out"), "{err}");
}
