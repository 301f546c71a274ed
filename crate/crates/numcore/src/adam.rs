use crate::error::NumError;

/// First/second moment estimates and hyper-parameters for one parameter
/// vector under Adam. `step` counts completed updates and drives the bias
/// correction, so a freshly created state always replays identically.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(len: usize, beta1: f64, beta2: f64, eps: f64) -> Self {
        AdamState { m: vec![0.0; len], v: vec![0.0; len], step: 0, beta1, beta2, eps }
    }
}

/// One in-place Adam update of `params` from `grads`.
///
/// `lr` may be zero (the parameters then stay put while the moments still
/// advance), which is how a schedule that has decayed to nothing behaves.
pub fn adam_step(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    lr: f64,
) -> Result<(), NumError> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(NumError::Invalid(format!(
            "adam: {} params, {} grads, {} moments",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if !(lr.is_finite() && lr >= 0.0) {
        return Err(NumError::Invalid(format!("adam: learning rate {lr} must be finite and >= 0")));
    }
    if let Some(index) = grads.iter().position(|v| !v.is_finite()) {
        return Err(NumError::NonFiniteGrad { index });
    }
    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - state.beta1.powi(t);
    let bias2 = 1.0 - state.beta2.powi(t);
    for i in 0..params.len() {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        let m_hat = state.m[i] / bias1;
        let v_hat = state.v[i] / bias2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}
