use crate::config::FeatureMode;
use crate::error::GanError;
use numcore::Tensor;
use vocoderfeat::{FeatureSequence, N_MELS};

/// Per-channel mean and standard deviation used to z-score features before
/// the generator and invert afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    /// Identity statistics (no shift, unit scale) for `channels` dimensions.
    pub fn identity(channels: usize) -> Self {
        NormStats { mean: vec![0.0; channels], std: vec![1.0; channels] }
    }

    pub fn channels(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<(), GanError> {
        if self.mean.len() != self.std.len() {
            return Err(GanError::Shape(format!(
                "norm stats mean/std lengths differ: {} vs {}",
                self.mean.len(),
                self.std.len()
            )));
        }
        if self.mean.iter().chain(&self.std).any(|v| !v.is_finite()) {
            return Err(GanError::Shape("norm stats must be finite".to_string()));
        }
        if self.std.iter().any(|&s| s <= 0.0) {
            return Err(GanError::Shape("norm stats std must be positive".to_string()));
        }
        Ok(())
    }
}

/// Pools every frame of every utterance; channels with (numerically) zero
/// spread get unit scale so constant dimensions pass through unharmed.
pub fn compute_norm_stats(corpus: &[Tensor], channels: usize) -> Result<NormStats, GanError> {
    let mut count = 0usize;
    let mut sum = vec![0.0; channels];
    for x in corpus {
        let s = x.shape();
        if s.len() != 2 || s[0] != channels {
            return Err(GanError::Shape(format!(
                "corpus tensor has shape {s:?}, expected [{channels}, T]"
            )));
        }
        let t = s[1];
        for c in 0..channels {
            sum[c] += x.data()[c * t..(c + 1) * t].iter().sum::<f64>();
        }
        count += t;
    }
    if count == 0 {
        return Err(GanError::Shape("cannot compute statistics of an empty corpus".to_string()));
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
    let mut sq = vec![0.0; channels];
    for x in corpus {
        let t = x.shape()[1];
        for c in 0..channels {
            sq[c] += x.data()[c * t..(c + 1) * t].iter().map(|v| (v - mean[c]).powi(2)).sum::<f64>();
        }
    }
    let std: Vec<f64> = sq
        .iter()
        .map(|s| {
            let sigma = (s / count as f64).sqrt();
            if sigma < 1e-6 {
                1.0
            } else {
                sigma
            }
        })
        .collect();
    Ok(NormStats { mean, std })
}

pub fn normalize(x: &Tensor, stats: &NormStats) -> Result<Tensor, GanError> {
    affine(x, stats, |v, m, s| (v - m) / s)
}

pub fn denormalize(x: &Tensor, stats: &NormStats) -> Result<Tensor, GanError> {
    affine(x, stats, |v, m, s| v * s + m)
}

fn affine(
    x: &Tensor,
    stats: &NormStats,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<Tensor, GanError> {
    stats.validate()?;
    let s = x.shape();
    if s.len() != 2 || s[0] != stats.channels() {
        return Err(GanError::Shape(format!(
            "tensor shape {s:?} does not match {}-channel statistics",
            stats.channels()
        )));
    }
    let t = s[1];
    let mut data = x.data().to_vec();
    for c in 0..s[0] {
        for v in &mut data[c * t..(c + 1) * t] {
            *v = f(*v, stats.mean[c], stats.std[c]);
        }
    }
    Tensor::new(s, data).map_err(GanError::from)
}

/// Lays a feature sequence out as a [C, T] tensor: MFB rows first, AP rows
/// appended in the joint mode.
pub fn sequence_to_matrix(seq: &FeatureSequence, mode: FeatureMode) -> Result<Tensor, GanError> {
    seq.validate()?;
    let t = seq.len();
    let c = mode.channels();
    let mut data = vec![0.0; c * t];
    for ti in 0..t {
        for b in 0..N_MELS {
            data[b * t + ti] = seq.mfb[ti][b];
        }
        if mode == FeatureMode::MfbAp {
            for b in 0..N_MELS {
                data[(N_MELS + b) * t + ti] = seq.ap[ti][b];
            }
        }
    }
    Tensor::new(&[c, t], data).map_err(GanError::from)
}

/// Splits a [C, T] matrix back into per-frame MFB rows and, in the joint
/// mode, AP rows clamped to the unit interval.
pub fn matrix_to_rows(
    x: &Tensor,
    mode: FeatureMode,
) -> Result<(Vec<Vec<f64>>, Option<Vec<Vec<f64>>>), GanError> {
    let s = x.shape();
    if s.len() != 2 || s[0] != mode.channels() {
        return Err(GanError::Shape(format!(
            "matrix shape {s:?} does not match mode with {} channels",
            mode.channels()
        )));
    }
    let t = s[1];
    let data = x.data();
    let mut mfb = vec![vec![0.0; N_MELS]; t];
    for ti in 0..t {
        for b in 0..N_MELS {
            mfb[ti][b] = data[b * t + ti];
        }
    }
    let ap = match mode {
        FeatureMode::Mfb => None,
        FeatureMode::MfbAp => {
            let mut rows = vec![vec![0.0; N_MELS]; t];
            for ti in 0..t {
                for b in 0..N_MELS {
                    rows[ti][b] = data[(N_MELS + b) * t + ti].clamp(0.0, 1.0);
                }
            }
            Some(rows)
        }
    };
    Ok((mfb, ap))
}
