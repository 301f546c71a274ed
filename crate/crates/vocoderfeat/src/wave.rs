use std::path::Path;

use crate::error::FeatError;

/// The only sample rate the pipeline operates at.
pub const SAMPLE_RATE: u32 = 16_000;

/// Mono 16 kHz audio held as 64-bit samples in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self, FeatError> {
        if sample_rate != SAMPLE_RATE {
            return Err(FeatError::Waveform(format!(
                "sample rate {sample_rate} Hz unsupported, expected {SAMPLE_RATE}"
            )));
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite()) {
            return Err(FeatError::Waveform(format!("non-finite sample {bad}")));
        }
        if let Some(bad) = samples.iter().find(|s| s.abs() > 1.0) {
            return Err(FeatError::Waveform(format!("sample {bad} outside [-1, 1]")));
        }
        Ok(Waveform { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Reads a RIFF PCM wav file, insisting on mono 16-bit 16 kHz.
    pub fn read_wav(path: &Path) -> Result<Self, FeatError> {
        let mut reader = hound::WavReader::open(path)?;
        let spec = reader.spec();
        if spec.channels != 1 {
            return Err(FeatError::WavFormat(format!(
                "{}: {} channels, expected mono",
                path.display(),
                spec.channels
            )));
        }
        if spec.sample_rate != SAMPLE_RATE {
            return Err(FeatError::WavFormat(format!(
                "{}: {} Hz, expected {} Hz",
                path.display(),
                spec.sample_rate,
                SAMPLE_RATE
            )));
        }
        if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
            return Err(FeatError::WavFormat(format!(
                "{}: expected 16-bit integer PCM, got {:?} at {} bits",
                path.display(),
                spec.sample_format,
                spec.bits_per_sample
            )));
        }
        let samples: Result<Vec<i16>, _> = reader.samples::<i16>().collect();
        let samples = samples?;
        let scaled = samples.iter().map(|&s| f64::from(s) / 32768.0).collect();
        Waveform::new(scaled, SAMPLE_RATE)
    }

    /// Writes 16-bit PCM; values are clamped to [-1, 1] and rounded.
    pub fn write_wav(&self, path: &Path) -> Result<(), FeatError> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut writer = hound::WavWriter::create(path, spec)?;
        for &s in &self.samples {
            let q = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
            writer.write_sample(q)?;
        }
        writer.finalize()?;
        Ok(())
    }
}
