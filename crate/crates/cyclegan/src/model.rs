use crate::config::CycleGanConfig;
use crate::discriminator::DiscriminatorParams;
use crate::error::GanError;
use crate::features::NormStats;
use crate::generator::GeneratorParams;
use crate::log::LossRecord;
use crate::loss::{adv_losses, generator_objective, LossBreakdown};
use numcore::{adam_step, AdamState, Tape, Tensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ADAM_BETA1: f64 = 0.5;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Both mapping directions with their discriminators, optimizer state,
/// normalization statistics, counters, and the training RNG; everything a
/// checkpoint round-trips.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPair {
    pub config: CycleGanConfig,
    pub g_xy: GeneratorParams,
    pub g_yx: GeneratorParams,
    pub d_x: DiscriminatorParams,
    pub d_y: DiscriminatorParams,
    pub opt_g_xy: AdamState,
    pub opt_g_yx: AdamState,
    pub opt_d_x: AdamState,
    pub opt_d_y: AdamState,
    pub norm_x: NormStats,
    pub norm_y: NormStats,
    pub epoch: u32,
    pub iter: u64,
    pub decay_steps: u64,
    pub rng: ChaCha8Rng,
}

impl ModelPair {
    /// Fresh pair seeded from the config; normalization statistics start as
    /// the identity until a trainer fills them in.
    pub fn init(config: CycleGanConfig) -> Result<Self, GanError> {
        config.validate()?;
        let c = config.feature_mode.channels();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let g_xy = GeneratorParams::init(c, config.width, config.res_blocks, &mut rng);
        let g_yx = GeneratorParams::init(c, config.width, config.res_blocks, &mut rng);
        let d_x = DiscriminatorParams::init(c, config.disc_width, &mut rng);
        let d_y = DiscriminatorParams::init(c, config.disc_width, &mut rng);
        let opt_g_xy = AdamState::new(g_xy.num_params(), ADAM_BETA1, ADAM_BETA2, ADAM_EPS);
        let opt_g_yx = AdamState::new(g_yx.num_params(), ADAM_BETA1, ADAM_BETA2, ADAM_EPS);
        let opt_d_x = AdamState::new(d_x.num_params(), ADAM_BETA1, ADAM_BETA2, ADAM_EPS);
        let opt_d_y = AdamState::new(d_y.num_params(), ADAM_BETA1, ADAM_BETA2, ADAM_EPS);
        Ok(ModelPair {
            norm_x: NormStats::identity(c),
            norm_y: NormStats::identity(c),
            config,
            g_xy,
            g_yx,
            d_x,
            d_y,
            opt_g_xy,
            opt_g_yx,
            opt_d_x,
            opt_d_y,
            epoch: 0,
            iter: 0,
            decay_steps: 0,
            rng,
        })
    }

    /// Generator-side objective on normalized crops without touching any
    /// state; the breakdown components sum to the total.
    pub fn total_loss(&self, x: &Tensor, y: &Tensor, epoch: u32) -> Result<LossBreakdown, GanError> {
        let mut tape = Tape::no_grad();
        let hg_xy = self.g_xy.params.const_all()?;
        let hg_yx = self.g_yx.params.const_all()?;
        let hd_x = self.d_x.params.const_all()?;
        let hd_y = self.d_y.params.const_all()?;
        let (_, breakdown) = generator_objective(
            &mut tape,
            x,
            y,
            |t, v| self.g_xy.forward_with(t, &hg_xy, v),
            |t, v| self.g_yx.forward_with(t, &hg_yx, v),
            |t, v| self.d_x.forward_with(t, &hd_x, v),
            |t, v| self.d_y.forward_with(t, &hd_y, v),
            self.config.lambda_cyc,
            self.config.lambda_id_at(epoch),
        )?;
        Ok(breakdown)
    }

    /// Learning rates in force for a step taken during `epoch`, given the
    /// decay counter.
    pub fn current_lrs(&self, epoch: u32) -> (f64, f64) {
        if epoch > self.config.id_cutoff_epoch {
            (
                CycleGanConfig::decayed_lr(self.config.lr_g, self.decay_steps),
                CycleGanConfig::decayed_lr(self.config.lr_d, self.decay_steps),
            )
        } else {
            (self.config.lr_g, self.config.lr_d)
        }
    }

    /// One batch-size-1 update: generators step on the full objective
    /// against frozen discriminators, then discriminators step on the
    /// least-squares real/fake loss against the updated (detached)
    /// generators. Advances the iteration and decay counters.
    pub fn train_step(&mut self, x: &Tensor, y: &Tensor, epoch: u32) -> Result<LossRecord, GanError> {
        let (lr_g, lr_d) = self.current_lrs(epoch);

        let mut tape = Tape::new();
        let hx = self.g_xy.watch_params(&mut tape)?;
        let hy = self.g_yx.watch_params(&mut tape)?;
        let dx_const = self.d_x.params.const_all()?;
        let dy_const = self.d_y.params.const_all()?;
        let (total, breakdown) = generator_objective(
            &mut tape,
            x,
            y,
            |t, v| self.g_xy.forward_with(t, &hx, v),
            |t, v| self.g_yx.forward_with(t, &hy, v),
            |t, v| self.d_x.forward_with(t, &dx_const, v),
            |t, v| self.d_y.forward_with(t, &dy_const, v),
            self.config.lambda_cyc,
            self.config.lambda_id_at(epoch),
        )?;
        let grads = tape.backward(&total)?;
        let gxy_grad = self.g_xy.params.gather_grads(&grads, &hx)?;
        let gyx_grad = self.g_yx.params.gather_grads(&grads, &hy)?;
        adam_step(&mut self.g_xy.params.flat, &gxy_grad, &mut self.opt_g_xy, lr_g)?;
        adam_step(&mut self.g_yx.params.flat, &gyx_grad, &mut self.opt_g_yx, lr_g)?;

        let fake_y = self.g_xy.infer(x)?;
        let fake_x = self.g_yx.infer(y)?;
        let mut tape = Tape::new();
        let hdx = self.d_x.watch_params(&mut tape)?;
        let hdy = self.d_y.watch_params(&mut tape)?;
        let d_real_x = self.d_x.forward_with(&mut tape, &hdx, x)?;
        let d_fake_x = self.d_x.forward_with(&mut tape, &hdx, &fake_x)?;
        let (loss_d_x, _) = adv_losses(&mut tape, &d_real_x, &d_fake_x)?;
        let d_real_y = self.d_y.forward_with(&mut tape, &hdy, y)?;
        let d_fake_y = self.d_y.forward_with(&mut tape, &hdy, &fake_y)?;
        let (loss_d_y, _) = adv_losses(&mut tape, &d_real_y, &d_fake_y)?;
        let loss_d = tape.add(&loss_d_x, &loss_d_y)?;
        let grads = tape.backward(&loss_d)?;
        let dx_grad = self.d_x.params.gather_grads(&grads, &hdx)?;
        let dy_grad = self.d_y.params.gather_grads(&grads, &hdy)?;
        adam_step(&mut self.d_x.params.flat, &dx_grad, &mut self.opt_d_x, lr_d)?;
        adam_step(&mut self.d_y.params.flat, &dy_grad, &mut self.opt_d_y, lr_d)?;

        self.iter += 1;
        if epoch > self.config.id_cutoff_epoch {
            self.decay_steps += 1;
        }
        Ok(LossRecord {
            epoch,
            iter: self.iter,
            loss_d_x: loss_d_x.item()?,
            loss_d_y: loss_d_y.item()?,
            loss_g_adv: breakdown.adv_g_xy + breakdown.adv_g_yx,
            loss_cyc: breakdown.cycle,
            loss_id: breakdown.identity,
            total: breakdown.total,
        })
    }
}
