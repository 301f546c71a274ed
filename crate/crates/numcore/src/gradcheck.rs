//! Finite-difference validation of the tape's analytic gradients.
//!
//! Every differentiable op is exercised by [`standard_battery`] with random
//! inputs; [`check_gradients`] compares reverse-mode gradients against
//! central differences element by element.

use crate::error::NumError;
use crate::tape::Tape;
use crate::tensor::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one finite-difference comparison.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub max_rel_err: f64,
    pub checked: usize,
    pub tol: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= self.tol
    }
}

/// Relative error with an absolute floor so gradients near zero are compared
/// on an absolute scale instead of blowing up the ratio.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3)
}

/// Compares analytic gradients of `f` against central differences with step
/// `h`, for every element of every input.
///
/// `f` receives the inputs already watched on the given tape and must build
/// a scalar loss from them without re-watching.
pub fn check_gradients<F>(
    name: &str,
    inputs: &[Tensor],
    h: f64,
    tol: f64,
    f: F,
) -> Result<CheckReport, NumError>
where
    F: Fn(&mut Tape, &[Tensor]) -> Result<Tensor, NumError>,
{
    let mut tape = Tape::new();
    let watched: Vec<Tensor> = inputs.iter().map(|t| tape.watch(t)).collect();
    let loss = f(&mut tape, &watched)?;
    let grads = tape.backward(&loss)?;
    let analytic: Vec<Vec<f64>> = watched
        .iter()
        .map(|t| grads.wrt(t).expect("watched leaves always have gradients").to_vec())
        .collect();

    let eval = |pts: &[Tensor]| -> Result<f64, NumError> {
        let mut fwd = Tape::no_grad();
        f(&mut fwd, pts)?.item()
    };

    let mut max_rel = 0.0_f64;
    let mut checked = 0;
    for (pi, input) in inputs.iter().enumerate() {
        for ei in 0..input.numel() {
            let mut plus = inputs.to_vec();
            let mut minus = inputs.to_vec();
            plus[pi] = input.nudged(ei, h)?;
            minus[pi] = input.nudged(ei, -h)?;
            let fd = (eval(&plus)? - eval(&minus)?) / (2.0 * h);
            max_rel = max_rel.max(relative_error(analytic[pi][ei], fd));
            checked += 1;
        }
    }
    Ok(CheckReport { name: name.to_string(), max_rel_err: max_rel, checked, tol })
}

fn rand_tensor(rng: &mut ChaCha8Rng, shape: &[usize], scale: f64) -> Tensor {
    let n: usize = shape.iter().product();
    let data: Vec<f64> = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
    Tensor::new(shape, data).expect("random tensor construction")
}

/// Like `rand_tensor`, but guarantees every element differs from the paired
/// tensor by at least `gap` so kinked losses stay away from their ties.
fn rand_tensor_apart(rng: &mut ChaCha8Rng, base: &Tensor, gap: f64) -> Tensor {
    let data: Vec<f64> = base
        .data()
        .iter()
        .map(|&v| {
            let mag = rng.random_range(gap..1.0);
            if rng.random_range(0..2) == 0 {
                v + mag
            } else {
                v - mag
            }
        })
        .collect();
    Tensor::new(base.shape(), data).expect("offset tensor construction")
}

fn rand_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Runs one finite-difference check per differentiable op (plus a stacked
/// composite) with inputs drawn from the seeded generator. Central
/// differences use step `h`; each report carries `tol` for the caller to
/// enforce.
pub fn standard_battery(seed: u64, h: f64, tol: f64) -> Result<Vec<CheckReport>, NumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();

    {
        let x = rand_tensor(&mut rng, &[3, 8], 1.5);
        let w = rand_tensor(&mut rng, &[4, 3, 5], 0.5);
        let b = rand_tensor(&mut rng, &[4], 0.5);
        let coeffs = rand_coeffs(&mut rng, 4 * 8);
        reports.push(check_gradients("conv1d_s1", &[x, w, b], h, tol, |tp, ts| {
            let y = tp.conv1d(&ts[0], &ts[1], &ts[2], 1, 2)?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let x = rand_tensor(&mut rng, &[2, 9], 1.5);
        let w = rand_tensor(&mut rng, &[3, 2, 3], 0.5);
        let b = rand_tensor(&mut rng, &[3], 0.5);
        let coeffs = rand_coeffs(&mut rng, 3 * 5);
        reports.push(check_gradients("conv1d_s2", &[x, w, b], h, tol, |tp, ts| {
            let y = tp.conv1d(&ts[0], &ts[1], &ts[2], 2, 1)?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let x = rand_tensor(&mut rng, &[2, 5, 8], 1.5);
        let w = rand_tensor(&mut rng, &[3, 2, 3, 3], 0.5);
        let b = rand_tensor(&mut rng, &[3], 0.5);
        let coeffs = rand_coeffs(&mut rng, 3 * 5 * 4);
        reports.push(check_gradients("conv2d_s12", &[x, w, b], h, tol, |tp, ts| {
            let y = tp.conv2d(&ts[0], &ts[1], &ts[2], (1, 2), (1, 1))?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let x = rand_tensor(&mut rng, &[4, 6], 1.5);
        let coeffs = rand_coeffs(&mut rng, 2 * 6);
        reports.push(check_gradients("glu", &[x], h, tol, |tp, ts| {
            let y = tp.glu(&ts[0])?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let x = rand_tensor(&mut rng, &[3, 7], 1.5);
        let gamma = rand_tensor(&mut rng, &[3], 1.0);
        let beta = rand_tensor(&mut rng, &[3], 1.0);
        let coeffs = rand_coeffs(&mut rng, 3 * 7);
        reports.push(check_gradients("instance_norm", &[x, gamma, beta], h, tol, |tp, ts| {
            let y = tp.instance_norm(&ts[0], &ts[1], &ts[2], 1e-5)?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let x = rand_tensor(&mut rng, &[6, 4], 1.5);
        let coeffs = rand_coeffs(&mut rng, 3 * 8);
        reports.push(check_gradients("pixel_shuffle_1d", &[x], h, tol, |tp, ts| {
            let y = tp.pixel_shuffle_1d(&ts[0], 2)?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let a = rand_tensor(&mut rng, &[3, 5], 1.5);
        let b = rand_tensor(&mut rng, &[3, 5], 1.5);
        let coeffs = rand_coeffs(&mut rng, 3 * 5);
        reports.push(check_gradients("add_scale", &[a, b], h, tol, |tp, ts| {
            let s = tp.add(&ts[0], &ts[1])?;
            let y = tp.scale(&s, 0.7)?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let x = rand_tensor(&mut rng, &[4, 3], 1.5);
        reports.push(check_gradients("sum", &[x], h, tol, |tp, ts| tp.sum(&ts[0]))?);
    }
    {
        let x = rand_tensor(&mut rng, &[2, 3, 4], 1.5);
        let coeffs = rand_coeffs(&mut rng, 24);
        reports.push(check_gradients("reshape", &[x], h, tol, |tp, ts| {
            let y = tp.reshape(&ts[0], &[6, 4])?;
            tp.weighted_sum(&y, &coeffs)
        })?);
    }
    {
        let a = rand_tensor(&mut rng, &[3, 6], 1.5);
        let b = rand_tensor_apart(&mut rng, &a, 100.0 * h);
        reports.push(check_gradients("l1_loss", &[a, b], h, tol, |tp, ts| {
            tp.l1_loss(&ts[0], &ts[1])
        })?);
    }
    {
        let a = rand_tensor(&mut rng, &[3, 6], 1.5);
        let b = rand_tensor(&mut rng, &[3, 6], 1.5);
        reports.push(check_gradients("mse_loss", &[a, b], h, tol, |tp, ts| {
            tp.mse_loss(&ts[0], &ts[1])
        })?);
    }
    {
        let a = rand_tensor(&mut rng, &[2, 7], 1.5);
        reports.push(check_gradients("mse_loss_scalar", &[a], h, tol, |tp, ts| {
            tp.mse_loss_scalar(&ts[0], 1.0)
        })?);
    }
    {
        // Stacked slice of a gated convolutional network.
        let x = rand_tensor(&mut rng, &[2, 8], 1.0);
        let w1 = rand_tensor(&mut rng, &[8, 2, 3], 0.4);
        let b1 = rand_tensor(&mut rng, &[8], 0.2);
        let gamma = rand_tensor(&mut rng, &[4], 1.0);
        let beta = rand_tensor(&mut rng, &[4], 0.3);
        let w2 = rand_tensor(&mut rng, &[2, 4, 3], 0.4);
        let b2 = rand_tensor(&mut rng, &[2], 0.2);
        reports.push(check_gradients(
            "conv_glu_norm_conv",
            &[x, w1, b1, gamma, beta, w2, b2],
            h,
            tol,
            |tp, ts| {
                let h1 = tp.conv1d(&ts[0], &ts[1], &ts[2], 1, 1)?;
                let h2 = tp.glu(&h1)?;
                let h3 = tp.instance_norm(&h2, &ts[3], &ts[4], 1e-5)?;
                let h4 = tp.conv1d(&h3, &ts[5], &ts[6], 1, 1)?;
                tp.mse_loss_scalar(&h4, 0.5)
            },
        )?);
    }
    Ok(reports)
}
