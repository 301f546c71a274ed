//! Resynthesis behavior: analysis-of-synthesis oracles and round trips.

mod common;

use common::vowel;
use vocoderfeat::{
    analyze, estimate_f0, synthesize, FeatureSequence, FrameSpec, PitchConfig, N_MELS,
};

fn flat_sequence(t: usize, mfb_level: f64) -> FeatureSequence {
    FeatureSequence {
        mfb: vec![vec![mfb_level; N_MELS]; t],
        ap: vec![vec![1.0; N_MELS]; t],
        log_f0: vec![0.0; t],
        vuv: vec![false; t],
    }
}

#[test]
fn unvoiced_flat_synthesis_is_aperiodic_noise() {
    let spec = FrameSpec::default();
    let seq = flat_sequence(100, -4.0);
    let wav = synthesize(&seq, &spec).unwrap();
    assert_eq!(wav.len(), 99 * spec.hop + spec.window_len);
    let (_, vuv) = estimate_f0(&wav, &spec, &PitchConfig::default()).unwrap();
    let voiced = vuv.iter().filter(|&&v| v).count();
    assert!(
        voiced * 10 < vuv.len(),
        "{voiced}/{} frames of shaped noise came back voiced",
        vuv.len()
    );
}

#[test]
fn voiced_synthesis_round_trips_f0_within_five_hertz() {
    let spec = FrameSpec::default();
    let t = 120;
    let f0_hz = 200.0_f64;
    let mut mfb = vec![vec![-2.0; N_MELS]; t];
    for row in &mut mfb {
        // Vowel-ish tilt: strong low bands, fading highs.
        for (b, v) in row.iter_mut().enumerate() {
            *v = 1.5 - 0.25 * b as f64;
        }
    }
    let seq = FeatureSequence {
        mfb,
        ap: vec![vec![0.05; N_MELS]; t],
        log_f0: vec![f0_hz.ln(); t],
        vuv: vec![true; t],
    };
    let wav = synthesize(&seq, &spec).unwrap();
    let (f0, vuv) = estimate_f0(&wav, &spec, &PitchConfig::default()).unwrap();
    let voiced: Vec<f64> =
        f0.iter().zip(&vuv).filter(|(_, &v)| v).map(|(&hz, _)| hz).collect();
    assert!(voiced.len() * 2 > vuv.len(), "too few voiced frames: {}", voiced.len());
    let close = voiced.iter().filter(|&&hz| (hz - f0_hz).abs() <= 5.0).count();
    assert!(
        close * 100 >= voiced.len() * 80,
        "{close}/{} voiced frames within 5 Hz",
        voiced.len()
    );
}

#[test]
fn single_frame_synthesis_is_window_sized_and_finite() {
    let spec = FrameSpec::default();
    let seq = flat_sequence(1, -3.0);
    let wav = synthesize(&seq, &spec).unwrap();
    assert_eq!(wav.len(), spec.window_len);
    assert!(wav.samples().iter().all(|s| s.is_finite()));
}

#[test]
fn synthesis_is_deterministic() {
    let spec = FrameSpec::default();
    let seq = flat_sequence(40, -3.0);
    let a = synthesize(&seq, &spec).unwrap();
    let b = synthesize(&seq, &spec).unwrap();
    let bits_a: Vec<u64> = a.samples().iter().map(|v| v.to_bits()).collect();
    let bits_b: Vec<u64> = b.samples().iter().map(|v| v.to_bits()).collect();
    assert_eq!(bits_a, bits_b);
}

#[test]
fn synthesis_peak_never_exceeds_limit() {
    let spec = FrameSpec::default();
    // Hot levels to force the limiter.
    let mut seq = flat_sequence(40, 6.0);
    seq.ap = vec![vec![1.0; N_MELS]; 40];
    let wav = synthesize(&seq, &spec).unwrap();
    let peak = wav.samples().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    assert!(peak <= 0.99 + 1e-12, "peak {peak}");
}

#[test]
fn empty_sequence_is_rejected() {
    let spec = FrameSpec::default();
    let seq = flat_sequence(0, -3.0);
    assert!(synthesize(&seq, &spec).is_err());
}

#[test]
fn analysis_synthesis_round_trip_preserves_mfb() {
    let spec = FrameSpec::default();
    let pitch = PitchConfig::default();
    let mut total_err = 0.0;
    let mut count = 0usize;
    for f0 in [180.0, 210.0] {
        let wav = vowel(f0, 8000, 0.35);
        let original = analyze(&wav, &spec, &pitch).unwrap();
        let rebuilt_wav = synthesize(&original, &spec).unwrap();
        let rebuilt = analyze(&rebuilt_wav, &spec, &pitch).unwrap();
        assert_eq!(original.len(), rebuilt.len());
        for (orig_row, new_row) in original.mfb.iter().zip(&rebuilt.mfb) {
            for (o, n) in orig_row.iter().zip(new_row) {
                total_err += (o - n).abs();
                count += 1;
            }
        }
    }
    let mae = total_err / count as f64;
    assert!(mae <= 1.5, "round-trip MFB mean absolute error {mae}");
}
