use crate::checkpoint::save_checkpoint;
use crate::config::CycleGanConfig;
use crate::error::GanError;
use crate::features::{compute_norm_stats, normalize};
use crate::log::{append_loss_log, LossRecord};
use crate::model::ModelPair;
use numcore::Tensor;
use rand::seq::SliceRandom;
use rand::Rng;
use std::path::PathBuf;

/// Where the trainer writes artifacts; both outputs are optional so library
/// callers can train purely in memory.
#[derive(Debug, Default, Clone)]
pub struct TrainOptions {
    pub checkpoint_dir: Option<PathBuf>,
    pub loss_log: Option<PathBuf>,
}

/// Contiguous [C, crop_len] slice of an utterance starting at `start`.
fn crop(x: &Tensor, start: usize, len: usize) -> Result<Tensor, GanError> {
    let s = x.shape();
    let (c, t) = (s[0], s[1]);
    if start + len > t {
        return Err(GanError::Train(format!(
            "crop [{start}, {}) exceeds utterance length {t}",
            start + len
        )));
    }
    let data = x.data();
    let mut out = Vec::with_capacity(c * len);
    for ci in 0..c {
        out.extend_from_slice(&data[ci * t + start..ci * t + start + len]);
    }
    Tensor::new(&[c, len], out).map_err(GanError::from)
}

fn check_corpus(
    corpus: &[Tensor],
    channels: usize,
    crop_len: usize,
    domain: &str,
) -> Result<(), GanError> {
    if corpus.is_empty() {
        return Err(GanError::Train(format!("domain {domain} has no utterances")));
    }
    for (i, x) in corpus.iter().enumerate() {
        let s = x.shape();
        if s.len() != 2 || s[0] != channels {
            return Err(GanError::Train(format!(
                "domain {domain} utterance {i} has shape {s:?}, expected [{channels}, T]"
            )));
        }
        if s[1] < crop_len {
            return Err(GanError::Train(format!(
                "domain {domain} utterance {i} has {} frames, need at least crop_len = {crop_len}",
                s[1]
            )));
        }
    }
    Ok(())
}

/// Initializes a fresh model pair (computing normalization statistics from
/// the corpora) and trains for the configured number of epochs.
pub fn train(
    corpus_x: &[Tensor],
    corpus_y: &[Tensor],
    config: &CycleGanConfig,
    opts: &TrainOptions,
) -> Result<(ModelPair, Vec<LossRecord>), GanError> {
    config.validate()?;
    let channels = config.feature_mode.channels();
    check_corpus(corpus_x, channels, config.crop_len, "X")?;
    check_corpus(corpus_y, channels, config.crop_len, "Y")?;
    let mut models = ModelPair::init(config.clone())?;
    models.norm_x = compute_norm_stats(corpus_x, channels)?;
    models.norm_y = compute_norm_stats(corpus_y, channels)?;
    let records = train_loop(&mut models, corpus_x, corpus_y, opts)?;
    Ok((models, records))
}

/// Runs epochs models.epoch+1 ..= config.epochs: per epoch, shuffles each
/// domain independently, pairs them, trains on uniformly-placed crops, and
/// (when configured) writes an end-of-epoch checkpoint and log rows. Safe to
/// call on a freshly loaded checkpoint to resume an interrupted run.
pub fn train_loop(
    models: &mut ModelPair,
    corpus_x: &[Tensor],
    corpus_y: &[Tensor],
    opts: &TrainOptions,
) -> Result<Vec<LossRecord>, GanError> {
    let config = models.config.clone();
    let channels = config.feature_mode.channels();
    check_corpus(corpus_x, channels, config.crop_len, "X")?;
    check_corpus(corpus_y, channels, config.crop_len, "Y")?;

    let xs: Vec<Tensor> =
        corpus_x.iter().map(|t| normalize(t, &models.norm_x)).collect::<Result<_, _>>()?;
    let ys: Vec<Tensor> =
        corpus_y.iter().map(|t| normalize(t, &models.norm_y)).collect::<Result<_, _>>()?;

    let mut last_checkpoint: Option<PathBuf> = None;
    let mut all_records = Vec::new();
    let steps = xs.len().min(ys.len());

    for epoch in models.epoch + 1..=config.epochs {
        let mut order_x: Vec<usize> = (0..xs.len()).collect();
        order_x.shuffle(&mut models.rng);
        let mut order_y: Vec<usize> = (0..ys.len()).collect();
        order_y.shuffle(&mut models.rng);

        let mut epoch_records = Vec::with_capacity(steps);
        for i in 0..steps {
            let ux = &xs[order_x[i]];
            let uy = &ys[order_y[i]];
            let x = crop(ux, crop_start(models, ux, config.crop_len), config.crop_len)?;
            let y = crop(uy, crop_start(models, uy, config.crop_len), config.crop_len)?;
            let record = models.train_step(&x, &y, epoch).map_err(|e| halt_error(e, epoch, &last_checkpoint))?;
            epoch_records.push(record);
        }

        models.epoch = epoch;
        if let Some(dir) = &opts.checkpoint_dir {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("epoch_{epoch:04}.dspkckpt"));
            save_checkpoint(models, &path)?;
            last_checkpoint = Some(path);
        }
        if let Some(log) = &opts.loss_log {
            append_loss_log(log, &epoch_records)?;
        }
        all_records.extend(epoch_records);
    }
    Ok(all_records)
}

fn crop_start(models: &mut ModelPair, x: &Tensor, crop_len: usize) -> usize {
    let t = x.shape()[1];
    if t > crop_len {
        models.rng.random_range(0..=t - crop_len)
    } else {
        0
    }
}

fn halt_error(e: GanError, epoch: u32, last_checkpoint: &Option<PathBuf>) -> GanError {
    let resume = match last_checkpoint {
        Some(p) => format!("last good checkpoint: {}", p.display()),
        None => "no checkpoint has been written yet".to_string(),
    };
    GanError::Train(format!("training halted during epoch {epoch}: {e}; {resume}"))
}
