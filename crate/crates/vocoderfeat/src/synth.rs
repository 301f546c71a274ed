use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::FeatError;
use crate::features::FeatureSequence;
use crate::frame::FrameSpec;
use crate::mel::{MelFilterbank, N_MELS};
use crate::spectrum::{one_sided_to_full, FftPair};
use crate::wave::{Waveform, SAMPLE_RATE};

/// Fixed seed for the synthesis noise source; synthesis must be a pure
/// function of its inputs, so the generator never varies.
const NOISE_SEED: u64 = 0x5d_e5_9e_ed;

/// Damping for the filterbank pseudo-inversion.
const TIKHONOV: f64 = 1e-3;
const NNLS_ITERS: usize = 50;

/// Non-negative spectral envelopes solved per frame from band energies.
///
/// Minimizes |F e - y|^2 + damping*|e|^2 over e >= 0 by multiplicative
/// updates, where F is the filterbank matrix and y the linear band energies.
struct EnvelopeSolver {
    bank: MelFilterbank,
    /// Gram matrix F^T F stored densely with per-row nonzero ranges.
    gram: Vec<f64>,
    row_lo: Vec<usize>,
    row_hi: Vec<usize>,
    /// Sum of each filter's weights, for the initial energy-spreading guess.
    filter_sums: Vec<f64>,
    n_bins: usize,
}

impl EnvelopeSolver {
    fn new(bank: MelFilterbank) -> Self {
        let n = bank.n_bins();
        let mut gram = vec![0.0; n * n];
        let mut filter_sums = Vec::with_capacity(N_MELS);
        for b in 0..N_MELS {
            let row = bank.row(b);
            filter_sums.push(row.iter().sum());
            let nz: Vec<usize> = (0..n).filter(|&k| row[k] > 0.0).collect();
            for &i in &nz {
                for &j in &nz {
                    gram[i * n + j] += row[i] * row[j];
                }
            }
        }
        let mut row_lo = vec![0; n];
        let mut row_hi = vec![0; n];
        for i in 0..n {
            let r = &gram[i * n..(i + 1) * n];
            row_lo[i] = r.iter().position(|&v| v != 0.0).unwrap_or(0);
            row_hi[i] = r.iter().rposition(|&v| v != 0.0).map_or(0, |p| p + 1);
        }
        EnvelopeSolver { bank, gram, row_lo, row_hi, filter_sums, n_bins: n }
    }

    /// Power envelope over the one-sided bins for one frame of band energies.
    fn solve(&self, band_energy: &[f64]) -> Vec<f64> {
        let n = self.n_bins;
        let mut numer = vec![0.0; n];
        let mut e = vec![0.0; n];
        for b in 0..N_MELS {
            let row = self.bank.row(b);
            let spread = band_energy[b] / self.filter_sums[b].max(1e-12);
            for k in 0..n {
                numer[k] += row[k] * band_energy[b];
                e[k] += row[k] * spread;
            }
        }
        for v in &mut e {
            *v = v.max(1e-12);
        }
        for _ in 0..NNLS_ITERS {
            for i in 0..n {
                let mut ge = 0.0;
                let g = &self.gram[i * n..(i + 1) * n];
                for j in self.row_lo[i]..self.row_hi[i] {
                    ge += g[j] * e[j];
                }
                let denom = ge + TIKHONOV * e[i] + 1e-30;
                e[i] *= numer[i] / denom;
            }
        }
        e
    }
}

/// Interpolates 24 band values onto the one-sided bin grid with filterbank
/// weights; bins no filter covers default to `fallback`.
fn bands_to_bins(bank: &MelFilterbank, bands: &[f64], fallback: f64) -> Vec<f64> {
    let n = bank.n_bins();
    (0..n)
        .map(|k| {
            let mut num = 0.0;
            let mut den = 0.0;
            for b in 0..N_MELS {
                let w = bank.weight(b, k);
                num += w * bands[b];
                den += w;
            }
            if den > 1e-12 {
                num / den
            } else {
                fallback
            }
        })
        .collect()
}

/// Excitation-filter resynthesis.
///
/// A phase-continuous pulse train (voiced) and seeded white noise are mixed
/// per spectral bin by the interpolated aperiodicity, shaped by the envelope
/// recovered from the band energies, and overlap-added under the analysis
/// window geometry. The result is peak-limited to 0.99.
pub fn synthesize(seq: &FeatureSequence, spec: &FrameSpec) -> Result<Waveform, FeatError> {
    seq.validate()?;
    spec.validate()?;
    let t_frames = seq.len();
    if t_frames == 0 {
        return Err(FeatError::Invalid("cannot synthesize an empty sequence".to_string()));
    }
    let total_len = (t_frames - 1) * spec.hop + spec.window_len;
    let window = spec.hann();
    let fft = FftPair::new(spec.fft_size);
    let n_bins = spec.n_bins();
    let bank = MelFilterbank::new(spec, 0.0, f64::from(SAMPLE_RATE) / 2.0);
    let solver = EnvelopeSolver::new(bank.clone());

    // Noise excitation: uniform with unit variance, fixed seed.
    let mut rng = ChaCha8Rng::seed_from_u64(NOISE_SEED);
    let spread = 3.0_f64.sqrt();
    let noise: Vec<f64> = (0..total_len).map(|_| rng.random_range(-spread..spread)).collect();

    // Pulse excitation: one sqrt(period) impulse per period, phase carried
    // across voiced frames and reset over unvoiced stretches.
    let mut pulses = vec![0.0; total_len];
    let mut pos = 0.0_f64;
    for t in 0..t_frames {
        let region_end = if t + 1 == t_frames { total_len as f64 } else { ((t + 1) * spec.hop) as f64 };
        if seq.vuv[t] {
            let f0 = seq.log_f0[t].exp();
            if !(f0.is_finite() && f0 > 1.0) {
                return Err(FeatError::Invalid(format!(
                    "frame {t}: voiced with implausible f0 {f0}"
                )));
            }
            let period = f64::from(SAMPLE_RATE) / f0;
            pos = pos.max((t * spec.hop) as f64);
            while pos < region_end {
                let idx = pos.round() as usize;
                if idx < total_len {
                    pulses[idx] += period.sqrt();
                }
                pos += period;
            }
        } else {
            pos = pos.max(region_end);
        }
    }

    let mut out = vec![0.0; total_len + spec.fft_size];
    for t in 0..t_frames {
        let start = t * spec.hop;
        let seg = start..start + spec.window_len;
        let p_seg: Vec<f64> =
            window.iter().zip(&pulses[seg.clone()]).map(|(w, s)| w * s).collect();
        let n_seg: Vec<f64> = window.iter().zip(&noise[seg]).map(|(w, s)| w * s).collect();
        let p_energy: f64 = p_seg.iter().map(|v| v * v).sum();
        let n_energy: f64 = n_seg.iter().map(|v| v * v).sum();
        let beta_p = if p_energy > 1e-30 { 1.0 / p_energy.sqrt() } else { 0.0 };
        let beta_n = if n_energy > 1e-30 { 1.0 / n_energy.sqrt() } else { 0.0 };
        let p_spec = fft.forward_real(&p_seg);
        let n_spec = fft.forward_real(&n_seg);

        let band_energy: Vec<f64> = seq.mfb[t].iter().map(|&m| m.exp()).collect();
        let envelope = solver.solve(&band_energy);
        let ap_bins = bands_to_bins(&bank, &seq.ap[t], 1.0);

        let mut one_sided = Vec::with_capacity(n_bins);
        for k in 0..n_bins {
            let ap = ap_bins[k].clamp(0.0, 1.0);
            let amp = envelope[k].max(0.0).sqrt();
            let mixed = p_spec[k] * (beta_p * (1.0 - ap).sqrt()) + n_spec[k] * (beta_n * ap.sqrt());
            one_sided.push(mixed * amp);
        }
        let full = one_sided_to_full(&one_sided, spec.fft_size);
        let frame_time = fft.inverse_to_real(&full);
        for (i, v) in frame_time.iter().enumerate() {
            out[start + i] += v;
        }
    }
    out.truncate(total_len);

    // Overlap-add gain of the shifted Hann windows.
    let cola = window.iter().sum::<f64>() / spec.hop as f64;
    for v in &mut out {
        *v /= cola;
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(FeatError::Invalid("synthesis produced non-finite samples".to_string()));
    }
    let peak = out.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if peak > 0.99 {
        let scale = 0.99 / peak;
        for v in &mut out {
            *v *= scale;
        }
    }
    Waveform::new(out, SAMPLE_RATE)
}
