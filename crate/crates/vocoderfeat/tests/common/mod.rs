//! Shared synthetic signals for the codec tests.
#![allow(dead_code)] // each test binary uses a different subset

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vocoderfeat::{Waveform, SAMPLE_RATE};

pub fn sine(freq: f64, len: usize, amp: f64) -> Waveform {
    let sr = f64::from(SAMPLE_RATE);
    let samples = (0..len)
        .map(|n| amp * (std::f64::consts::TAU * freq * n as f64 / sr).sin())
        .collect();
    Waveform::new(samples, SAMPLE_RATE).unwrap()
}

pub fn silence(len: usize) -> Waveform {
    Waveform::new(vec![0.0; len], SAMPLE_RATE).unwrap()
}

pub fn white_noise(len: usize, amp: f64, seed: u64) -> Waveform {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..len).map(|_| rng.random_range(-amp..amp)).collect();
    Waveform::new(samples, SAMPLE_RATE).unwrap()
}

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
