//! F0 statistics pooling and the log-Gaussian transform.

use vocoderfeat::{f0_stats, transform_f0, F0Stats};

#[test]
fn two_point_pool_gives_population_moments() {
    let log_f0 = [4.0, 6.0];
    let vuv = [true, true];
    let stats = f0_stats([(&log_f0[..], &vuv[..])]).unwrap();
    assert_eq!(stats.mu, 5.0);
    assert_eq!(stats.sigma, 1.0);
    assert_eq!(stats.count, 2);
}

#[test]
fn constant_pool_is_degenerate() {
    let log_f0 = [5.0, 5.0, 5.0];
    let vuv = [true, true, true];
    let err = f0_stats([(&log_f0[..], &vuv[..])]).unwrap_err();
    assert!(err.to_string().contains("degenerate"), "unexpected message: {err}");
}

#[test]
fn unvoiced_frames_stay_out_of_the_pool() {
    let log_f0 = [4.0, 99.0, 6.0];
    let vuv = [true, false, true];
    let stats = f0_stats([(&log_f0[..], &vuv[..])]).unwrap();
    assert_eq!(stats.mu, 5.0);
    assert_eq!(stats.count, 2);
}

#[test]
fn fewer_than_two_voiced_frames_is_an_error() {
    let log_f0 = [4.0];
    let vuv = [true];
    assert!(f0_stats([(&log_f0[..], &vuv[..])]).is_err());
    assert!(f0_stats(std::iter::empty::<(&[f64], &[bool])>()).is_err());
}

#[test]
fn stats_match_naive_two_pass_oracle() {
    let values: Vec<f64> = (0..100).map(|i| 4.5 + 0.013 * (i as f64 * 1.7).sin()).collect();
    let vuv = vec![true; 100];
    let stats = f0_stats([(&values[..], &vuv[..])]).unwrap();
    let mean = values.iter().sum::<f64>() / 100.0;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 100.0;
    assert!((stats.mu - mean).abs() < 1e-14);
    assert!((stats.sigma - var.sqrt()).abs() < 1e-14);
}

#[test]
fn identity_transform_when_stats_match() {
    let stats = F0Stats { mu: 5.0, sigma: 0.3, count: 10 };
    let log_f0 = [4.7, 5.0, 5.3];
    let vuv = [true, true, true];
    let out = transform_f0(&log_f0, &vuv, &stats, &stats).unwrap();
    for (a, b) in out.iter().zip(&log_f0) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn source_mean_maps_to_target_mean() {
    let src = F0Stats { mu: 5.0, sigma: 0.3, count: 10 };
    let tgt = F0Stats { mu: 5.5, sigma: 0.2, count: 10 };
    let out = transform_f0(&[5.0], &[true], &src, &tgt).unwrap();
    assert!((out[0] - 5.5).abs() < 1e-15);
}

#[test]
fn transform_is_exactly_affine() {
    let src = F0Stats { mu: 4.8, sigma: 0.25, count: 50 };
    let tgt = F0Stats { mu: 5.4, sigma: 0.4, count: 50 };
    let slope = tgt.sigma / src.sigma;
    let intercept = tgt.mu - src.mu * slope;
    for &x in &[3.9, 4.8, 5.1, 6.2] {
        let out = transform_f0(&[x], &[true], &src, &tgt).unwrap();
        assert!((out[0] - (slope * x + intercept)).abs() < 1e-12);
    }
}

#[test]
fn unvoiced_frames_pass_through_unchanged() {
    let src = F0Stats { mu: 4.8, sigma: 0.25, count: 50 };
    let tgt = F0Stats { mu: 5.4, sigma: 0.4, count: 50 };
    let out = transform_f0(&[0.0, 4.8], &[false, true], &src, &tgt).unwrap();
    assert_eq!(out[0], 0.0);
    assert!((out[1] - 5.4).abs() < 1e-15);
}

#[test]
fn transform_round_trip_is_identity() {
    let src = F0Stats { mu: 4.8, sigma: 0.25, count: 50 };
    let tgt = F0Stats { mu: 5.4, sigma: 0.4, count: 50 };
    let input = [4.5, 4.8, 5.0, 5.2];
    let vuv = [true; 4];
    let there = transform_f0(&input, &vuv, &src, &tgt).unwrap();
    let back = transform_f0(&there, &vuv, &tgt, &src).unwrap();
    for (a, b) in back.iter().zip(&input) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn degenerate_source_sigma_is_rejected() {
    let src = F0Stats { mu: 5.0, sigma: 0.0, count: 10 };
    let tgt = F0Stats { mu: 5.4, sigma: 0.4, count: 50 };
    assert!(transform_f0(&[5.0], &[true], &src, &tgt).is_err());
}

#[test]
fn mismatched_lengths_are_rejected() {
    let stats = F0Stats { mu: 5.0, sigma: 0.3, count: 10 };
    assert!(transform_f0(&[5.0, 5.1], &[true], &stats, &stats).is_err());
}
