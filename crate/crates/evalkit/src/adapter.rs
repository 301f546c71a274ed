use crate::error::EvalError;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

/// Something that turns a WAV file into a hypothesis transcript.
pub trait Transcriber {
    fn transcribe(&self, utterance_id: &str, wav_path: &Path) -> Result<String, EvalError>;
}

/// Deterministic lookup-table transcriber keyed by utterance id; the test
/// stand-in for an external recognizer.
#[derive(Debug, Clone, Default)]
pub struct MockAdapter {
    table: BTreeMap<String, String>,
}

impl MockAdapter {
    pub fn new(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        MockAdapter { table: entries.into_iter().collect() }
    }
}

impl Transcriber for MockAdapter {
    fn transcribe(&self, utterance_id: &str, _wav_path: &Path) -> Result<String, EvalError> {
        self.table
            .get(utterance_id)
            .cloned()
            .ok_or_else(|| EvalError::Transcriber(format!("no mock entry for {utterance_id:?}")))
    }
}

pub const DEFAULT_ASR_TIMEOUT: Duration = Duration::from_secs(60);

/// Shells out to an external recognizer.
///
/// The template is split on whitespace into argv; every `{wav}` placeholder
/// is replaced with the WAV path, and if the template mentions no
/// placeholder the path is appended as the final argument. Standard output
/// is the hypothesis; nonzero exit or a timeout is an error the caller
/// records per utterance.
#[derive(Debug, Clone)]
pub struct CommandAdapter {
    pub template: String,
    pub timeout: Duration,
}

impl CommandAdapter {
    pub fn new(template: &str) -> Self {
        CommandAdapter { template: template.to_string(), timeout: DEFAULT_ASR_TIMEOUT }
    }

    fn argv(&self, wav_path: &Path) -> Result<Vec<String>, EvalError> {
        let wav = wav_path.to_string_lossy();
        let mut argv: Vec<String> =
            self.template.split_whitespace().map(str::to_string).collect();
        if argv.is_empty() {
            return Err(EvalError::Transcriber("empty command template".to_string()));
        }
        let mut substituted = false;
        for arg in &mut argv {
            if arg.contains("{wav}") {
                *arg = arg.replace("{wav}", &wav);
                substituted = true;
            }
        }
        if !substituted {
            argv.push(wav.into_owned());
        }
        Ok(argv)
    }
}

fn drain(pipe: Option<impl Read + Send + 'static>) -> std::thread::JoinHandle<String> {
    std::thread::spawn(move || {
        let mut buf = String::new();
        if let Some(mut pipe) = pipe {
            let _ = pipe.read_to_string(&mut buf);
        }
        buf
    })
}

impl Transcriber for CommandAdapter {
    fn transcribe(&self, _utterance_id: &str, wav_path: &Path) -> Result<String, EvalError> {
        let argv = self.argv(wav_path)?;
        let mut child = Command::new(&argv[0])
            .args(&argv[1..])
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| EvalError::Transcriber(format!("failed to spawn {:?}: {e}", argv[0])))?;

        let stdout = drain(child.stdout.take());
        let stderr = drain(child.stderr.take());
        let deadline = Instant::now() + self.timeout;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) => {
                    if Instant::now() >= deadline {
                        let _ = child.kill();
                        let _ = child.wait();
                        return Err(EvalError::Transcriber(format!(
                            "{:?} timed out after {:?}",
                            argv[0], self.timeout
                        )));
                    }
                    std::thread::sleep(Duration::from_millis(5));
                }
                Err(e) => return Err(EvalError::Transcriber(format!("wait failed: {e}"))),
            }
        };

        let stdout = stdout.join().unwrap_or_default();
        let stderr = stderr.join().unwrap_or_default();
        if !status.success() {
            return Err(EvalError::Transcriber(format!(
                "{:?} exited with {status}: {}",
                argv[0],
                stderr.trim()
            )));
        }
        Ok(stdout)
    }
}
