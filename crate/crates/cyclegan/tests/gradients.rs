//! Finite-difference verification of both networks' full parameter
//! gradients on reduced configurations.

use cyclegan::{DiscriminatorParams, GanError, GeneratorParams};
use numcore::gradcheck::check_gradients;
use numcore::{NumError, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_num(e: GanError) -> NumError {
    NumError::Invalid(e.to_string())
}

fn rand_input(rng: &mut ChaCha8Rng, c: usize, t: usize) -> Tensor {
    let data: Vec<f64> = (0..c * t).map(|_| rng.random_range(-1.0..1.0)).collect();
    Tensor::new(&[c, t], data).unwrap()
}

#[test]
fn generator_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = GeneratorParams::init(6, 2, 2, &mut rng);
    let x = rand_input(&mut rng, 6, 8);

    let mut inputs = g.params.const_all().unwrap();
    inputs.push(x);
    let n_segs = inputs.len() - 1;
    let coeffs: Vec<f64> = (0..6 * 8).map(|_| rng.random_range(-1.0..1.0)).collect();

    let report = check_gradients("generator", &inputs, 1e-5, 1e-4, |tape, ins| {
        let out = g.forward_with(tape, &ins[..n_segs], &ins[n_segs]).map_err(to_num)?;
        tape.weighted_sum(&out, &coeffs)
    })
    .unwrap();
    assert!(
        report.passed(),
        "generator gradient check failed: max rel err {} over {} elements",
        report.max_rel_err,
        report.checked
    );
    assert!(report.checked > g.num_params(), "every parameter and input must be probed");
}

#[test]
fn discriminator_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let d = DiscriminatorParams::init(5, 2, &mut rng);
    let x = rand_input(&mut rng, 5, 16);

    let mut inputs = d.params.const_all().unwrap();
    inputs.push(x);
    let n_segs = inputs.len() - 1;
    let (gh, gw) = d.grid_shape(16);
    let coeffs: Vec<f64> = (0..gh * gw).map(|_| rng.random_range(-1.0..1.0)).collect();

    let report = check_gradients("discriminator", &inputs, 1e-5, 1e-4, |tape, ins| {
        let grid = d.forward_with(tape, &ins[..n_segs], &ins[n_segs]).map_err(to_num)?;
        tape.weighted_sum(&grid, &coeffs)
    })
    .unwrap();
    assert!(
        report.passed(),
        "discriminator gradient check failed: max rel err {} over {} elements",
        report.max_rel_err,
        report.checked
    );
}

#[test]
fn adversarial_objective_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = GeneratorParams::init(3, 1, 1, &mut rng);
    let d = DiscriminatorParams::init(3, 1, &mut rng);
    let x = rand_input(&mut rng, 3, 16);

    let g_segs = g.params.const_all().unwrap();
    let n_g = g_segs.len();
    let mut inputs = g_segs;
    inputs.extend(d.params.const_all().unwrap());

    let report = check_gradients("lsgan_through_both_nets", &inputs, 1e-5, 1e-4, |tape, ins| {
        let fake = g.forward_with(tape, &ins[..n_g], &x).map_err(to_num)?;
        let grid = d.forward_with(tape, &ins[n_g..], &fake).map_err(to_num)?;
        tape.mse_loss_scalar(&grid, 1.0)
    })
    .unwrap();
    assert!(
        report.passed(),
        "composite gradient check failed: max rel err {} over {} elements",
        report.max_rel_err,
        report.checked
    );
}
