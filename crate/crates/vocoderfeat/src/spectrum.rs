use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::frame::FrameSpec;

/// Planned forward/inverse transforms of one size, reused across frames.
pub struct FftPair {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPair {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Full complex spectrum of a real signal zero-padded to the FFT size.
    pub fn forward_real(&self, time: &[f64]) -> Vec<Complex<f64>> {
        assert!(time.len() <= self.size, "frame longer than fft size");
        let mut buf: Vec<Complex<f64>> = time
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(self.size)
            .collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Real time signal from a full complex spectrum (normalized by 1/N).
    pub fn inverse_to_real(&self, spectrum: &[Complex<f64>]) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.size);
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}

/// Builds the full Hermitian spectrum from one-sided complex bins.
pub fn one_sided_to_full(one_sided: &[Complex<f64>], size: usize) -> Vec<Complex<f64>> {
    let n_bins = size / 2 + 1;
    assert_eq!(one_sided.len(), n_bins);
    let mut full = vec![Complex::new(0.0, 0.0); size];
    full[..n_bins].copy_from_slice(one_sided);
    for k in 1..size / 2 {
        full[size - k] = one_sided[k].conj();
    }
    full
}

/// Magnitudes of the one-sided spectrum for every windowed frame.
pub fn stft_mag(frames: &[Vec<f64>], spec: &FrameSpec) -> Vec<Vec<f64>> {
    let fft = FftPair::new(spec.fft_size);
    let n_bins = spec.n_bins();
    frames
        .iter()
        .map(|frame| {
            let full = fft.forward_real(frame);
            full[..n_bins].iter().map(|c| c.norm()).collect()
        })
        .collect()
}

/// Sums one-sided power with Hermitian-symmetry weights: interior bins count
/// twice, DC and Nyquist once.
pub fn one_sided_power_sum(mag: &[f64]) -> f64 {
    let n = mag.len();
    mag.iter()
        .enumerate()
        .map(|(k, &m)| {
            let w = if k == 0 || k == n - 1 { 1.0 } else { 2.0 };
            w * m * m
        })
        .sum()
}
