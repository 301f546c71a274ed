//! Arithmetic contracts of the adversarial, cycle, identity, and composite
//! losses.

use cyclegan::{
    adv_losses, cycle_loss, generator_objective, identity_loss, CycleGanConfig, FeatureMode,
    GanError, ModelPair,
};
use numcore::{Tape, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_input(seed: u64, c: usize, t: usize) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..c * t).map(|_| rng.random_range(-1.0..1.0)).collect();
    Tensor::new(&[c, t], data).unwrap()
}

fn identity_map(tape: &mut Tape, v: &Tensor) -> Result<Tensor, GanError> {
    tape.scale(v, 1.0).map_err(GanError::from)
}

fn shift_map(c: f64) -> impl Fn(&mut Tape, &Tensor) -> Result<Tensor, GanError> {
    move |tape, v| {
        let offset = Tensor::filled(v.shape(), c)?;
        tape.add(v, &offset).map_err(GanError::from)
    }
}

#[test]
fn perfect_discriminator_has_zero_loss() {
    let mut tape = Tape::no_grad();
    let d_real = Tensor::filled(&[4, 5], 1.0).unwrap();
    let d_fake = Tensor::zeros(&[4, 5]);
    let (loss_d, _) = adv_losses(&mut tape, &d_real, &d_fake).unwrap();
    assert_eq!(loss_d.item().unwrap(), 0.0);
}

#[test]
fn perfectly_fooled_discriminator_gives_zero_generator_loss() {
    let mut tape = Tape::no_grad();
    let d_real = Tensor::zeros(&[3, 3]);
    let d_fake = Tensor::filled(&[3, 3], 1.0).unwrap();
    let (_, loss_g) = adv_losses(&mut tape, &d_real, &d_fake).unwrap();
    assert_eq!(loss_g.item().unwrap(), 0.0);
}

#[test]
fn half_confident_grids_give_half_and_quarter() {
    let mut tape = Tape::no_grad();
    let d_real = Tensor::filled(&[2, 6], 0.5).unwrap();
    let d_fake = Tensor::filled(&[2, 6], 0.5).unwrap();
    let (loss_d, loss_g) = adv_losses(&mut tape, &d_real, &d_fake).unwrap();
    assert_eq!(loss_d.item().unwrap(), 0.5);
    assert_eq!(loss_g.item().unwrap(), 0.25);
}

#[test]
fn mismatched_grids_are_rejected() {
    let mut tape = Tape::no_grad();
    let d_real = Tensor::zeros(&[2, 6]);
    let d_fake = Tensor::zeros(&[2, 5]);
    assert!(adv_losses(&mut tape, &d_real, &d_fake).is_err());
}

#[test]
fn identity_generators_have_zero_cycle_loss() {
    let mut tape = Tape::no_grad();
    let x = rand_input(20, 4, 12);
    let y = rand_input(21, 4, 12);
    let loss = cycle_loss(&mut tape, &x, &y, identity_map, identity_map).unwrap();
    assert_eq!(loss.item().unwrap(), 0.0);
}

#[test]
fn exact_inverse_shift_pair_has_zero_cycle_loss() {
    // Inputs on a coarse dyadic grid keep x + 0.5 - 0.5 exact in binary.
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let data: Vec<f64> = (0..4 * 12).map(|_| rng.random_range(-1024i32..1024) as f64 / 1024.0).collect();
    let x = Tensor::new(&[4, 12], data.clone()).unwrap();
    let y = Tensor::new(&[4, 12], data.into_iter().rev().collect()).unwrap();
    let mut tape = Tape::no_grad();
    let loss = cycle_loss(&mut tape, &x, &y, shift_map(0.5), shift_map(-0.5)).unwrap();
    assert_eq!(loss.item().unwrap(), 0.0);
}

#[test]
fn cycle_loss_matches_hand_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let g_xy = cyclegan::GeneratorParams::init(3, 2, 1, &mut rng);
    let g_yx = cyclegan::GeneratorParams::init(3, 2, 1, &mut rng);
    let x = rand_input(24, 3, 8);
    let y = rand_input(25, 3, 8);

    let mut tape = Tape::no_grad();
    let loss = cycle_loss(
        &mut tape,
        &x,
        &y,
        |t, v| {
            let h = g_xy.params.const_all()?;
            g_xy.forward_with(t, &h, v)
        },
        |t, v| {
            let h = g_yx.params.const_all()?;
            g_yx.forward_with(t, &h, v)
        },
    )
    .unwrap();

    let rec_x = g_yx.infer(&g_xy.infer(&x).unwrap()).unwrap();
    let rec_y = g_xy.infer(&g_yx.infer(&y).unwrap()).unwrap();
    let mean_abs = |a: &Tensor, b: &Tensor| {
        a.data().iter().zip(b.data()).map(|(p, q)| (p - q).abs()).sum::<f64>()
            / a.numel() as f64
    };
    let expected = mean_abs(&rec_x, &x) + mean_abs(&rec_y, &y);
    assert!((loss.item().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn identity_generators_have_zero_identity_loss() {
    let mut tape = Tape::no_grad();
    let x = rand_input(26, 4, 12);
    let y = rand_input(27, 4, 12);
    let loss = identity_loss(&mut tape, &x, &y, identity_map, identity_map).unwrap();
    assert_eq!(loss.item().unwrap(), 0.0);
}

#[test]
fn unit_shift_contributes_exactly_one() {
    let mut tape = Tape::no_grad();
    let x = rand_input(28, 4, 12);
    let y = rand_input(29, 4, 12);
    let loss = identity_loss(&mut tape, &x, &y, identity_map, shift_map(1.0)).unwrap();
    assert!((loss.item().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn identity_loss_matches_hand_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let g_xy = cyclegan::GeneratorParams::init(3, 2, 1, &mut rng);
    let g_yx = cyclegan::GeneratorParams::init(3, 2, 1, &mut rng);
    let x = rand_input(31, 3, 8);
    let y = rand_input(32, 3, 8);

    let mut tape = Tape::no_grad();
    let loss = identity_loss(
        &mut tape,
        &x,
        &y,
        |t, v| {
            let h = g_xy.params.const_all()?;
            g_xy.forward_with(t, &h, v)
        },
        |t, v| {
            let h = g_yx.params.const_all()?;
            g_yx.forward_with(t, &h, v)
        },
    )
    .unwrap();

    let id_x = g_yx.infer(&x).unwrap();
    let id_y = g_xy.infer(&y).unwrap();
    let mean_abs = |a: &Tensor, b: &Tensor| {
        a.data().iter().zip(b.data()).map(|(p, q)| (p - q).abs()).sum::<f64>()
            / a.numel() as f64
    };
    let expected = mean_abs(&id_x, &x) + mean_abs(&id_y, &y);
    assert!((loss.item().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn lambda_cyc_scales_cycle_into_total() {
    let x = rand_input(33, 4, 12);
    let y = rand_input(34, 4, 12);
    let zero_d = |t: &mut Tape, v: &Tensor| t.scale(v, 0.0).map_err(GanError::from);
    let mut tape = Tape::no_grad();
    let (_, breakdown) = generator_objective(
        &mut tape,
        &x,
        &y,
        shift_map(0.1),
        identity_map,
        zero_d,
        zero_d,
        10.0,
        0.0,
    )
    .unwrap();
    assert!((breakdown.cycle - 2.0).abs() < 1e-12, "cycle contribution {}", breakdown.cycle);
    assert_eq!(breakdown.identity, 0.0);
}

#[test]
fn identity_multiplier_is_zero_past_the_cutoff_epoch() {
    let config = CycleGanConfig::default();
    assert_eq!(config.lambda_id_at(100), 1.0);
    assert_eq!(config.lambda_id_at(101), 0.0);
    assert_eq!(config.lambda_id_at(3000), 0.0);

    let small = CycleGanConfig {
        feature_mode: FeatureMode::Mfb,
        width: 1,
        res_blocks: 1,
        disc_width: 1,
        crop_len: 16,
        ..CycleGanConfig::default()
    };
    let models = ModelPair::init(small).unwrap();
    let x = rand_input(35, 24, 16);
    let y = rand_input(36, 24, 16);
    let past = models.total_loss(&x, &y, 101).unwrap();
    assert_eq!(past.identity, 0.0, "identity term must vanish after the cutoff");
    let during = models.total_loss(&x, &y, 100).unwrap();
    assert!(during.identity > 0.0, "identity term should be active at the cutoff epoch");
}

#[test]
fn breakdown_components_sum_to_total() {
    let small = CycleGanConfig {
        feature_mode: FeatureMode::Mfb,
        width: 2,
        res_blocks: 2,
        disc_width: 2,
        crop_len: 16,
        ..CycleGanConfig::default()
    };
    let models = ModelPair::init(small).unwrap();
    let x = rand_input(37, 24, 16);
    let y = rand_input(38, 24, 16);
    for epoch in [1u32, 50, 100, 101, 200] {
        let b = models.total_loss(&x, &y, epoch).unwrap();
        let sum = b.adv_g_xy + b.adv_g_yx + b.cycle + b.identity;
        assert!(
            (b.total - sum).abs() <= 1e-12,
            "epoch {epoch}: total {} != component sum {sum}",
            b.total
        );
    }
}
