use crate::error::GanError;
use numcore::{Tape, Tensor};

/// Least-squares adversarial pair: the discriminator is pushed toward 1 on
/// real and 0 on fake grids, the generator toward 1 on fake grids.
pub fn adv_losses(
    tape: &mut Tape,
    d_real: &Tensor,
    d_fake: &Tensor,
) -> Result<(Tensor, Tensor), GanError> {
    if d_real.shape() != d_fake.shape() {
        return Err(GanError::Shape(format!(
            "real/fake logit grids differ: {:?} vs {:?}",
            d_real.shape(),
            d_fake.shape()
        )));
    }
    let real_term = tape.mse_loss_scalar(d_real, 1.0)?;
    let fake_term = tape.mse_loss_scalar(d_fake, 0.0)?;
    let loss_d = tape.add(&real_term, &fake_term)?;
    let loss_g = tape.mse_loss_scalar(d_fake, 1.0)?;
    Ok((loss_d, loss_g))
}

/// Mean-L1 reconstruction error after mapping through both generators, in
/// both directions.
pub fn cycle_loss<Fxy, Fyx>(
    tape: &mut Tape,
    x: &Tensor,
    y: &Tensor,
    mut g_xy: Fxy,
    mut g_yx: Fyx,
) -> Result<Tensor, GanError>
where
    Fxy: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
    Fyx: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
{
    let fake_y = g_xy(tape, x)?;
    let rec_x = g_yx(tape, &fake_y)?;
    let fake_x = g_yx(tape, y)?;
    let rec_y = g_xy(tape, &fake_x)?;
    let term_x = tape.l1_loss(&rec_x, x)?;
    let term_y = tape.l1_loss(&rec_y, y)?;
    tape.add(&term_x, &term_y).map_err(GanError::from)
}

/// Mean-L1 penalty for changing inputs already in each generator's target
/// domain: g_yx is fed x, g_xy is fed y.
pub fn identity_loss<Fxy, Fyx>(
    tape: &mut Tape,
    x: &Tensor,
    y: &Tensor,
    mut g_xy: Fxy,
    mut g_yx: Fyx,
) -> Result<Tensor, GanError>
where
    Fxy: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
    Fyx: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
{
    let id_x = g_yx(tape, x)?;
    let id_y = g_xy(tape, y)?;
    let term_x = tape.l1_loss(&id_x, x)?;
    let term_y = tape.l1_loss(&id_y, y)?;
    tape.add(&term_x, &term_y).map_err(GanError::from)
}

/// Per-component values of one generator-side objective evaluation; cycle
/// and identity are reported already scaled by their multipliers, so the
/// components sum to the total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub adv_g_xy: f64,
    pub adv_g_yx: f64,
    pub cycle: f64,
    pub identity: f64,
    pub total: f64,
}

/// Builds the full generator objective on the tape from closures:
/// adversarial terms for both mapping directions, the scaled cycle term,
/// and the scaled identity term (skipped entirely when its multiplier is
/// zero). Returns the scalar loss tensor plus the numeric breakdown.
#[allow(clippy::too_many_arguments)]
pub fn generator_objective<Fxy, Fyx, Dx, Dy>(
    tape: &mut Tape,
    x: &Tensor,
    y: &Tensor,
    mut g_xy: Fxy,
    mut g_yx: Fyx,
    mut d_x: Dx,
    mut d_y: Dy,
    lambda_cyc: f64,
    lambda_id: f64,
) -> Result<(Tensor, LossBreakdown), GanError>
where
    Fxy: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
    Fyx: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
    Dx: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
    Dy: FnMut(&mut Tape, &Tensor) -> Result<Tensor, GanError>,
{
    let fake_y = g_xy(tape, x)?;
    let fake_x = g_yx(tape, y)?;

    let d_y_fake = d_y(tape, &fake_y)?;
    let d_x_fake = d_x(tape, &fake_x)?;
    let adv_xy = tape.mse_loss_scalar(&d_y_fake, 1.0)?;
    let adv_yx = tape.mse_loss_scalar(&d_x_fake, 1.0)?;

    let rec_x = g_yx(tape, &fake_y)?;
    let rec_y = g_xy(tape, &fake_x)?;
    let cyc_x = tape.l1_loss(&rec_x, x)?;
    let cyc_y = tape.l1_loss(&rec_y, y)?;
    let cyc_raw = tape.add(&cyc_x, &cyc_y)?;
    let cyc = tape.scale(&cyc_raw, lambda_cyc)?;

    let adv = tape.add(&adv_xy, &adv_yx)?;
    let mut total = tape.add(&adv, &cyc)?;

    let mut identity = 0.0;
    if lambda_id != 0.0 {
        let id_x = g_yx(tape, x)?;
        let id_y = g_xy(tape, y)?;
        let id_tx = tape.l1_loss(&id_x, x)?;
        let id_ty = tape.l1_loss(&id_y, y)?;
        let id_raw = tape.add(&id_tx, &id_ty)?;
        let id = tape.scale(&id_raw, lambda_id)?;
        identity = id.item()?;
        total = tape.add(&total, &id)?;
    }

    let breakdown = LossBreakdown {
        adv_g_xy: adv_xy.item()?,
        adv_g_yx: adv_yx.item()?,
        cycle: cyc.item()?,
        identity,
        total: total.item()?,
    };
    Ok((total, breakdown))
}
