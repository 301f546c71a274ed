use crate::error::FeatError;
use crate::wave::Waveform;

/// Short-time analysis geometry: 20 ms Hann windows every 5 ms at 16 kHz,
/// transformed at 512 points.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub window_len: usize,
    pub hop: usize,
    pub fft_size: usize,
}

impl Default for FrameSpec {
    fn default() -> Self {
        FrameSpec { window_len: 320, hop: 80, fft_size: 512 }
    }
}

impl FrameSpec {
    pub fn validate(&self) -> Result<(), FeatError> {
        if self.hop == 0 || self.hop > self.window_len {
            return Err(FeatError::Invalid(format!(
                "hop {} must be in 1..={}",
                self.hop, self.window_len
            )));
        }
        if self.fft_size < self.window_len {
            return Err(FeatError::Invalid(format!(
                "fft size {} smaller than window {}",
                self.fft_size, self.window_len
            )));
        }
        Ok(())
    }

    /// Number of analysis frames a signal of `len` samples yields.
    pub fn frame_count(&self, len: usize) -> Result<usize, FeatError> {
        if len < self.window_len {
            return Err(FeatError::TooShort { len, min: self.window_len });
        }
        Ok(1 + (len - self.window_len) / self.hop)
    }

    /// Periodic Hann window of `window_len` points.
    pub fn hann(&self) -> Vec<f64> {
        let n = self.window_len as f64;
        (0..self.window_len)
            .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n).cos())
            .collect()
    }

    /// One-sided spectrum length for `fft_size`.
    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }
}

/// Cuts the signal into Hann-windowed frames of `spec.window_len` samples,
/// advancing by `spec.hop`.
pub fn frame_signal(wav: &Waveform, spec: &FrameSpec) -> Result<Vec<Vec<f64>>, FeatError> {
    spec.validate()?;
    let t = spec.frame_count(wav.len())?;
    let window = spec.hann();
    let samples = wav.samples();
    let mut frames = Vec::with_capacity(t);
    for fi in 0..t {
        let start = fi * spec.hop;
        let frame: Vec<f64> = window
            .iter()
            .zip(&samples[start..start + spec.window_len])
            .map(|(w, s)| w * s)
            .collect();
        frames.push(frame);
    }
    Ok(frames)
}

/// Raw (unwindowed) frame slices under the same geometry; pitch tracking
/// wants the undistorted signal.
pub fn raw_frames<'a>(
    wav: &'a Waveform,
    spec: &FrameSpec,
) -> Result<Vec<&'a [f64]>, FeatError> {
    spec.validate()?;
    let t = spec.frame_count(wav.len())?;
    let samples = wav.samples();
    Ok((0..t).map(|fi| &samples[fi * spec.hop..fi * spec.hop + spec.window_len]).collect())
}
