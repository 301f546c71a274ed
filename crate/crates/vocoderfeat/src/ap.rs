use std::f64::consts::TAU;

use crate::error::FeatError;
use crate::frame::FrameSpec;
use crate::mel::{MelFilterbank, N_MELS};
use crate::spectrum::FftPair;
use crate::wave::SAMPLE_RATE;

/// Hermitian-symmetry weight for a one-sided bin.
fn sym_weight(k: usize, n_bins: usize) -> f64 {
    if k == 0 || k == n_bins - 1 {
        1.0
    } else {
        2.0
    }
}

/// Normalized autocorrelation of the analysis window itself at a (possibly
/// fractional) lag, via its power spectrum. This is the ceiling any perfectly
/// periodic signal can reach under the window, so per-band ratios are divided
/// by it to undo the window bias.
pub struct WindowBias {
    power: Vec<f64>,
    total: f64,
    fft_size: usize,
}

impl WindowBias {
    pub fn new(spec: &FrameSpec) -> Self {
        let fft = FftPair::new(spec.fft_size);
        let full = fft.forward_real(&spec.hann());
        let n_bins = spec.n_bins();
        let power: Vec<f64> = full[..n_bins].iter().map(|c| c.norm_sqr()).collect();
        let total = power
            .iter()
            .enumerate()
            .map(|(k, &p)| sym_weight(k, n_bins) * p)
            .sum();
        WindowBias { power, total, fft_size: spec.fft_size }
    }

    pub fn at_lag(&self, lag: f64) -> f64 {
        let n_bins = self.power.len();
        let r: f64 = self
            .power
            .iter()
            .enumerate()
            .map(|(k, &p)| sym_weight(k, n_bins) * p * (TAU * k as f64 * lag / self.fft_size as f64).cos())
            .sum();
        r / self.total
    }
}

/// Band aperiodicities in [0, 1]: per mel band, one minus the bias-corrected
/// normalized autocorrelation of the band-weighted power spectrum at the
/// pitch lag. Unvoiced frames are all-ones by definition.
pub fn estimate_ap(
    spectra: &[Vec<f64>],
    f0: &[f64],
    vuv: &[bool],
    bank: &MelFilterbank,
    spec: &FrameSpec,
) -> Result<Vec<Vec<f64>>, FeatError> {
    if spectra.len() != f0.len() || spectra.len() != vuv.len() {
        return Err(FeatError::Invalid(format!(
            "misaligned inputs: {} spectra, {} f0, {} vuv",
            spectra.len(),
            f0.len(),
            vuv.len()
        )));
    }
    let n_bins = spec.n_bins();
    let bias = WindowBias::new(spec);
    let mut out = Vec::with_capacity(spectra.len());
    for (t, mag) in spectra.iter().enumerate() {
        if !vuv[t] {
            out.push(vec![1.0; N_MELS]);
            continue;
        }
        let lag = f64::from(SAMPLE_RATE) / f0[t];
        // The window ceiling shrinks with lag; below this floor the ratio is
        // dominated by correction noise, so the estimate saturates instead.
        let ceiling = bias.at_lag(lag).max(0.05);
        let cosines: Vec<f64> =
            (0..n_bins).map(|k| (TAU * k as f64 * lag / spec.fft_size as f64).cos()).collect();
        let power: Vec<f64> = mag.iter().map(|m| m * m).collect();
        let mut row = Vec::with_capacity(N_MELS);
        for b in 0..N_MELS {
            let weights = bank.row(b);
            let mut r0 = 0.0;
            let mut r_lag = 0.0;
            for k in 0..n_bins {
                let w = sym_weight(k, n_bins) * weights[k] * power[k];
                r0 += w;
                r_lag += w * cosines[k];
            }
            if r0 <= 1e-300 {
                row.push(1.0);
                continue;
            }
            let periodicity = (r_lag / r0 / ceiling).clamp(-1.0, 1.0);
            row.push((1.0 - periodicity).clamp(0.0, 1.0));
        }
        out.push(row);
    }
    Ok(out)
}
