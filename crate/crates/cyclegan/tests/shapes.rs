//! Architecture shape contracts for both networks.

use cyclegan::{
    CycleGanConfig, DiscriminatorParams, FeatureMode, GeneratorParams, ModelPair,
};
use numcore::Tensor;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rand_input(seed: u64, c: usize, t: usize) -> Tensor {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..c * t).map(|_| rng.random_range(-1.0..1.0)).collect();
    Tensor::new(&[c, t], data).unwrap()
}

#[test]
fn full_width_generator_preserves_24x128() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = GeneratorParams::init(24, 128, 6, &mut rng);
    let x = rand_input(0, 24, 128);
    let y = g.infer(&x).unwrap();
    assert_eq!(y.shape(), &[24, 128]);
}

#[test]
fn joint_mode_generator_carries_48_channels() {
    let config = CycleGanConfig {
        feature_mode: FeatureMode::MfbAp,
        width: 2,
        res_blocks: 1,
        disc_width: 1,
        ..CycleGanConfig::default()
    };
    let models = ModelPair::init(config).unwrap();
    assert_eq!(models.g_xy.channels, 48);
    let x = rand_input(1, 48, 16);
    let y = models.g_xy.infer(&x).unwrap();
    assert_eq!(y.shape(), &[48, 16]);
}

#[test]
fn zeroed_generator_maps_everything_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut g = GeneratorParams::init(5, 2, 2, &mut rng);
    g.params.flat.fill(0.0);
    let x = rand_input(2, 5, 16);
    let y = g.infer(&x).unwrap();
    assert!(y.data().iter().all(|&v| v == 0.0), "zero parameters must give a zero map");
}

#[test]
fn generator_rejects_unpadded_frame_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = GeneratorParams::init(4, 2, 1, &mut rng);
    let err = g.infer(&rand_input(3, 4, 30)).unwrap_err().to_string();
    assert!(err.contains("pad"), "error should instruct the caller to pad: {err}");
    let err = g.infer(&rand_input(3, 4, 4)).unwrap_err().to_string();
    assert!(err.contains(">= 8"), "T=4 leaves no frames after downsampling: {err}");
}

#[test]
fn generator_rejects_wrong_channel_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = GeneratorParams::init(4, 2, 1, &mut rng);
    let err = g.infer(&rand_input(3, 6, 16)).unwrap_err().to_string();
    assert!(err.contains("[4, T]"), "{err}");
}

#[test]
fn discriminator_grid_matches_stride_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d = DiscriminatorParams::init(24, 4, &mut rng);
    let x = rand_input(4, 24, 128);
    let grid = d.infer(&x).unwrap();

    let mut w = 128usize;
    for _ in 0..4 {
        w = (w + 2 * 1 - 3) / 2 + 1;
    }
    assert_eq!(grid.shape(), &[24, w]);
    assert_eq!(grid.shape(), &[24, 8]);
    assert_eq!(d.grid_shape(128), (24, 8));
}

#[test]
fn zeroed_discriminator_outputs_zero_logits() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut d = DiscriminatorParams::init(6, 2, &mut rng);
    d.params.flat.fill(0.0);
    let grid = d.infer(&rand_input(5, 6, 32)).unwrap();
    assert!(grid.data().iter().all(|&v| v == 0.0));
}

#[test]
fn discriminator_rejects_short_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = DiscriminatorParams::init(6, 2, &mut rng);
    let err = d.infer(&rand_input(6, 6, 15)).unwrap_err().to_string();
    assert!(err.contains(">= 16"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_preserves_every_valid_shape(
        tq in 2usize..=16,
        c in 1usize..=6,
        seed in 0u64..1000,
    ) {
        let t = 4 * tq;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GeneratorParams::init(c, 2, 1, &mut rng);
        let x = rand_input(seed, c, t);
        let y = g.infer(&x).unwrap();
        prop_assert_eq!(y.shape(), x.shape());
    }
}
