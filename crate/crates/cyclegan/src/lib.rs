//! Two-domain adversarial feature mapping for speech feature matrices.
//!
//! A pair of 1-D gated convolutional generators maps [C, T] feature
//! matrices between domains X and Y; a pair of 2-D patch discriminators
//! scores realism. Training optimizes least-squares adversarial losses plus
//! a cycle-consistency term and an identity term that switches off after a
//! configurable epoch. Everything is deterministic given the config seed,
//! and checkpoints round-trip the complete training state.

mod checkpoint;
mod config;
mod discriminator;
mod error;
mod features;
mod generator;
mod log;
mod loss;
mod model;
mod params;
mod train;

pub use checkpoint::{crc32, load_checkpoint, save_checkpoint, CKPT_MAGIC, CKPT_VERSION};
pub use config::{CycleGanConfig, FeatureMode, DECAY_ITERS};
pub use discriminator::{DiscriminatorParams, MIN_DISC_FRAMES};
pub use error::GanError;
pub use features::{
    compute_norm_stats, denormalize, matrix_to_rows, normalize, sequence_to_matrix, NormStats,
};
pub use generator::{GeneratorParams, IN_EPS};
pub use log::{append_loss_log, read_loss_log, LossRecord, LOSS_LOG_HEADER};
pub use loss::{adv_losses, cycle_loss, generator_objective, identity_loss, LossBreakdown};
pub use model::{ModelPair, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use params::{LayoutBuilder, ParamFeed, ParamKind, ParamVec, Segment, WEIGHT_INIT_STD};
pub use train::{train, train_loop, TrainOptions};
