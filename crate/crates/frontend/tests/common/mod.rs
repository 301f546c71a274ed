//! Shared fixtures for the front-end tests.
#![allow(dead_code)] // each test binary uses a different subset

use cyclegan::{CycleGanConfig, FeatureMode, GeneratorParams, NormStats};
use frontend::FrontendBundle;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vocoderfeat::{F0Stats, FeatureSequence, Waveform, N_MELS, SAMPLE_RATE};

/// Harmonic complex with formant-like spectral bumps, loosely resembling a
/// sustained vowel at the given fundamental.
pub fn vowel(f0: f64, len: usize, amp: f64) -> Waveform {
    let sr = f64::from(SAMPLE_RATE);
    let formants = [(700.0, 130.0, 1.0), (1220.0, 160.0, 0.5), (2600.0, 250.0, 0.25)];
    let mut samples = vec![0.0; len];
    let mut h = 1.0;
    while h * f0 < 7000.0 {
        let f = h * f0;
        let gain: f64 = formants
            .iter()
            .map(|(fc, bw, g)| g * (-(f - fc) * (f - fc) / (2.0 * bw * bw)).exp())
            .sum::<f64>()
            + 0.02;
        let phase = 0.37 * h;
        for (n, s) in samples.iter_mut().enumerate() {
            *s += gain * (std::f64::consts::TAU * f * n as f64 / sr + phase).sin();
        }
        h += 1.0;
    }
    let peak = samples.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    for s in &mut samples {
        *s *= amp / peak;
    }
    Waveform::new(samples, SAMPLE_RATE).unwrap()
}

/// A deterministic, mildly structured feature sequence with mixed voicing.
pub fn demo_sequence(t: usize) -> FeatureSequence {
    let mut mfb = vec![vec![0.0; N_MELS]; t];
    let mut ap = vec![vec![0.0; N_MELS]; t];
    let mut log_f0 = vec![0.0; t];
    let mut vuv = vec![false; t];
    for ti in 0..t {
        for b in 0..N_MELS {
            mfb[ti][b] = -2.0 + (0.31 * ti as f64 + 0.7 * b as f64).sin();
            ap[ti][b] = 0.5 + 0.4 * (0.17 * ti as f64 + b as f64).cos();
        }
        if ti % 3 != 0 {
            vuv[ti] = true;
            log_f0[ti] = 5.3 + 0.05 * (ti as f64 * 0.2).sin();
        }
    }
    FeatureSequence { mfb, ap, log_f0, vuv }
}

pub fn toy_f0_stats() -> (F0Stats, F0Stats) {
    let src = F0Stats { mu: 5.3, sigma: 0.2, count: 100 };
    let tgt = F0Stats { mu: 5.0, sigma: 0.1, count: 120 };
    (src, tgt)
}

/// Bundle around a freshly initialized (untrained) generator.
pub fn random_bundle(mode: FeatureMode, seed: u64) -> FrontendBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = mode.channels();
    let (src_f0, tgt_f0) = toy_f0_stats();
    FrontendBundle {
        generator: Some(GeneratorParams::init(c, 2, 1, &mut rng)),
        feature_mode: mode,
        src_f0,
        tgt_f0,
        src_norm: NormStats::identity(c),
        tgt_norm: NormStats::identity(c),
    }
}

pub fn tiny_config(mode: FeatureMode) -> CycleGanConfig {
    CycleGanConfig {
        feature_mode: mode,
        width: 2,
        res_blocks: 1,
        disc_width: 2,
        seed: 5,
        ..CycleGanConfig::default()
    }
}
