use crate::frame::FrameSpec;
use crate::wave::SAMPLE_RATE;

/// Mel-band count used throughout the pipeline.
pub const N_MELS: usize = 24;

/// Log-energy floor applied before the logarithm.
pub const MFB_FLOOR: f64 = 1e-10;

pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10.0_f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters with peak 1.0 on mel-spaced centers, evaluated at the
/// one-sided FFT bin frequencies. Adjacent filters share edges, so between
/// the first and last peaks the columns sum to exactly 1.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `N_MELS x n_bins`, row-major.
    weights: Vec<f64>,
    n_bins: usize,
    /// Center frequency of each filter in Hz.
    centers: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(spec: &FrameSpec, f_min: f64, f_max: f64) -> Self {
        let n_bins = spec.n_bins();
        let bin_hz = f64::from(SAMPLE_RATE) / spec.fft_size as f64;
        let (m_min, m_max) = (hz_to_mel(f_min), hz_to_mel(f_max));
        let edges: Vec<f64> = (0..N_MELS + 2)
            .map(|j| mel_to_hz(m_min + (m_max - m_min) * j as f64 / (N_MELS + 1) as f64))
            .collect();
        let mut weights = vec![0.0; N_MELS * n_bins];
        for b in 0..N_MELS {
            let (left, center, right) = (edges[b], edges[b + 1], edges[b + 2]);
            for k in 0..n_bins {
                let f = k as f64 * bin_hz;
                let w = if f <= left || f >= right {
                    0.0
                } else if f <= center {
                    (f - left) / (center - left)
                } else {
                    (right - f) / (right - center)
                };
                weights[b * n_bins + k] = w;
            }
        }
        MelFilterbank { weights, n_bins, centers: edges[1..=N_MELS].to_vec() }
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn row(&self, b: usize) -> &[f64] {
        &self.weights[b * self.n_bins..(b + 1) * self.n_bins]
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.centers
    }

    /// Filter index b, bin k.
    pub fn weight(&self, b: usize, k: usize) -> f64 {
        self.weights[b * self.n_bins + k]
    }

    /// Band energies: filterbank applied to a one-sided power spectrum.
    pub fn apply_power(&self, power: &[f64]) -> Vec<f64> {
        assert_eq!(power.len(), self.n_bins);
        (0..N_MELS)
            .map(|b| self.row(b).iter().zip(power).map(|(w, p)| w * p).sum())
            .collect()
    }
}

/// Log mel-band energies for every frame of a magnitude spectrogram.
pub fn extract_mfb(spectra: &[Vec<f64>], bank: &MelFilterbank) -> Vec<Vec<f64>> {
    spectra
        .iter()
        .map(|mag| {
            let power: Vec<f64> = mag.iter().map(|m| m * m).collect();
            bank.apply_power(&power)
                .into_iter()
                .map(|e| e.max(MFB_FLOOR).ln())
                .collect()
        })
        .collect()
}
