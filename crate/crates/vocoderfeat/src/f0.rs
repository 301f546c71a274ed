use crate::error::FeatError;
use crate::frame::FrameSpec;
use crate::wave::{Waveform, SAMPLE_RATE};

/// Pitch search range and voicing gates. The range covers adult speech with
/// margin; both thresholds are deliberate, documented defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub voicing_threshold: f64,
    pub min_rms: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        PitchConfig { f_min: 60.0, f_max: 400.0, voicing_threshold: 0.3, min_rms: 1e-4 }
    }
}

/// Per-frame fundamental frequency (Hz, 0 where unvoiced) and voicing flags,
/// from a normalized-autocorrelation peak search over the pitch lag range.
pub fn estimate_f0(
    wav: &Waveform,
    spec: &FrameSpec,
    cfg: &PitchConfig,
) -> Result<(Vec<f64>, Vec<bool>), FeatError> {
    if !(0.0 < cfg.f_min && cfg.f_min < cfg.f_max) {
        return Err(FeatError::Invalid(format!(
            "pitch range [{}, {}] is not ordered and positive",
            cfg.f_min, cfg.f_max
        )));
    }
    let sr = f64::from(SAMPLE_RATE);
    let lag_min = (sr / cfg.f_max).floor() as usize;
    let lag_max = ((sr / cfg.f_min).ceil() as usize).min(spec.window_len - 2);
    if lag_min < 2 || lag_min >= lag_max {
        return Err(FeatError::Invalid(format!(
            "pitch range [{}, {}] leaves no usable lags for window {}",
            cfg.f_min, cfg.f_max, spec.window_len
        )));
    }

    spec.validate()?;
    let t = spec.frame_count(wav.len())?;
    let samples = wav.samples();
    let half = spec.window_len / 2;
    let mut f0 = Vec::with_capacity(t);
    let mut vuv = Vec::with_capacity(t);
    for fi in 0..t {
        let start = fi * spec.hop;
        let frame = &samples[start..start + spec.window_len];
        let rms =
            (frame.iter().map(|v| v * v).sum::<f64>() / spec.window_len as f64).sqrt();
        // Correlate over a segment twice the frame, centered on it: the extra
        // context keeps the long-lag autocorrelation estimates from drowning
        // in variance, which would voice random noise.
        let seg_lo = start.saturating_sub(half);
        let seg_hi = (start + spec.window_len + half).min(samples.len());
        let segment = &samples[seg_lo..seg_hi];
        let seg_lag_max = lag_max.min(segment.len() - 2);
        let pitch = if rms < cfg.min_rms {
            None
        } else {
            frame_pitch(segment, lag_min, seg_lag_max, cfg)
        };
        match pitch {
            Some(hz) => {
                f0.push(hz);
                vuv.push(true);
            }
            None => {
                f0.push(0.0);
                vuv.push(false);
            }
        }
    }
    Ok((f0, vuv))
}

/// Normalized autocorrelation n(tau) = 2*r(tau) / (m0(tau) + m1(tau)) over
/// the lag range; the frame is voiced when the chosen peak clears the
/// threshold.
fn frame_pitch(frame: &[f64], lag_min: usize, lag_max: usize, cfg: &PitchConfig) -> Option<f64> {
    let w = frame.len();
    if lag_max <= lag_min {
        return None;
    }
    let mut nsdf = vec![0.0; lag_max + 1];
    for (tau, value) in nsdf.iter_mut().enumerate().take(lag_max + 1).skip(lag_min) {
        let n = w - tau;
        let mut r = 0.0;
        let mut m = 0.0;
        for j in 0..n {
            r += frame[j] * frame[j + tau];
            m += frame[j] * frame[j] + frame[j + tau] * frame[j + tau];
        }
        *value = if m > 0.0 { 2.0 * r / m } else { 0.0 };
    }

    // Local maxima strictly inside the search range.
    let mut peaks: Vec<usize> = Vec::new();
    for tau in (lag_min + 1)..lag_max {
        if nsdf[tau] >= nsdf[tau - 1] && nsdf[tau] > nsdf[tau + 1] {
            peaks.push(tau);
        }
    }
    let best_value = peaks.iter().map(|&t| nsdf[t]).fold(f64::NEG_INFINITY, f64::max);
    if !(best_value >= cfg.voicing_threshold) {
        return None;
    }
    // Smallest lag whose peak is nearly as good as the best kills octave
    // halving: a period-doubled peak never beats this gate.
    let chosen = *peaks.iter().find(|&&t| nsdf[t] >= 0.9 * best_value)?;

    let refined = parabolic_peak(&nsdf, chosen);
    let hz = f64::from(SAMPLE_RATE) / refined;
    Some(hz.clamp(cfg.f_min, cfg.f_max))
}

/// Quadratic interpolation through the peak and its two neighbors.
fn parabolic_peak(values: &[f64], tau: usize) -> f64 {
    let (ym, y0, yp) = (values[tau - 1], values[tau], values[tau + 1]);
    let denom = ym - 2.0 * y0 + yp;
    if denom.abs() < 1e-12 {
        return tau as f64;
    }
    let delta = 0.5 * (ym - yp) / denom;
    tau as f64 + delta.clamp(-0.5, 0.5)
}

/// Mean and population standard deviation of pooled voiced log-F0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F0Stats {
    pub mu: f64,
    pub sigma: f64,
    pub count: usize,
}

/// Pools voiced log-F0 values across utterances.
///
/// `sequences` yields (log_f0, vuv) pairs; only frames flagged voiced enter
/// the pool.
pub fn f0_stats<'a, I>(sequences: I) -> Result<F0Stats, FeatError>
where
    I: IntoIterator<Item = (&'a [f64], &'a [bool])>,
{
    let mut pooled = Vec::new();
    for (log_f0, vuv) in sequences {
        for (v, &voiced) in log_f0.iter().zip(vuv) {
            if voiced {
                pooled.push(*v);
            }
        }
    }
    if pooled.len() < 2 {
        return Err(FeatError::F0Stats(format!(
            "need at least 2 voiced frames, found {}",
            pooled.len()
        )));
    }
    let n = pooled.len() as f64;
    let mu = pooled.iter().sum::<f64>() / n;
    let var = pooled.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n;
    let sigma = var.sqrt();
    if sigma <= 0.0 {
        return Err(FeatError::F0Stats(format!(
            "voiced log-F0 is degenerate (all values {mu}); cannot scale"
        )));
    }
    Ok(F0Stats { mu, sigma, count: pooled.len() })
}

/// Log-Gaussian normalized transform: re-standardizes voiced log-F0 from the
/// source distribution into the target one. Unvoiced entries pass through.
pub fn transform_f0(
    log_f0: &[f64],
    vuv: &[bool],
    src: &F0Stats,
    tgt: &F0Stats,
) -> Result<Vec<f64>, FeatError> {
    if !(src.sigma > 0.0) {
        return Err(FeatError::F0Stats(format!("source sigma {} must be positive", src.sigma)));
    }
    if log_f0.len() != vuv.len() {
        return Err(FeatError::Invalid(format!(
            "log_f0 length {} != vuv length {}",
            log_f0.len(),
            vuv.len()
        )));
    }
    Ok(log_f0
        .iter()
        .zip(vuv)
        .map(|(&v, &voiced)| {
            if voiced {
                (v - src.mu) / src.sigma * tgt.sigma + tgt.mu
            } else {
                v
            }
        })
        .collect())
}
