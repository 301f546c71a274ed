use crate::error::GanError;
use sha2::{Digest, Sha256};

/// Which feature channels the networks transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// 24 log mel-band energies per frame.
    Mfb,
    /// 24 log mel-band energies concatenated with 24 band aperiodicities.
    MfbAp,
}

impl FeatureMode {
    pub fn channels(self) -> usize {
        match self {
            FeatureMode::Mfb => 24,
            FeatureMode::MfbAp => 48,
        }
    }

    fn tag(self) -> u8 {
        match self {
            FeatureMode::Mfb => 0,
            FeatureMode::MfbAp => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self, GanError> {
        match tag {
            0 => Ok(FeatureMode::Mfb),
            1 => Ok(FeatureMode::MfbAp),
            other => Err(GanError::Checkpoint(format!("unknown feature mode tag {other}"))),
        }
    }
}

/// Hyperparameters for the two-domain adversarial trainer. Numeric defaults
/// follow the training recipe this crate implements; `width`, `res_blocks`,
/// and `disc_width` scale the networks down for fast experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleGanConfig {
    pub feature_mode: FeatureMode,
    pub lambda_cyc: f64,
    pub lambda_id: f64,
    pub id_cutoff_epoch: u32,
    pub lr_g: f64,
    pub lr_d: f64,
    pub epochs: u32,
    pub crop_len: usize,
    pub seed: u64,
    pub width: usize,
    pub res_blocks: usize,
    pub disc_width: usize,
}

impl Default for CycleGanConfig {
    fn default() -> Self {
        CycleGanConfig {
            feature_mode: FeatureMode::Mfb,
            lambda_cyc: 10.0,
            lambda_id: 1.0,
            id_cutoff_epoch: 100,
            lr_g: 0.0002,
            lr_d: 0.0001,
            epochs: 200,
            crop_len: 128,
            seed: 0,
            width: 128,
            res_blocks: 6,
            disc_width: 64,
        }
    }
}

/// Learning-rate decay horizon: after the identity cutoff epoch, each
/// iteration subtracts initial_lr / DECAY_ITERS from the rate.
pub const DECAY_ITERS: f64 = 200_000.0;

impl CycleGanConfig {
    pub fn validate(&self) -> Result<(), GanError> {
        if !(self.lambda_cyc > 0.0) {
            return Err(GanError::Config(format!(
                "lambda_cyc must be positive, got {}",
                self.lambda_cyc
            )));
        }
        if !(self.lambda_id >= 0.0) {
            return Err(GanError::Config(format!(
                "lambda_id must be non-negative, got {}",
                self.lambda_id
            )));
        }
        if self.crop_len == 0 || self.crop_len % 4 != 0 {
            return Err(GanError::Config(format!(
                "crop_len must be a positive multiple of 4, got {}",
                self.crop_len
            )));
        }
        if !(self.lr_g.is_finite() && self.lr_g >= 0.0 && self.lr_d.is_finite() && self.lr_d >= 0.0)
        {
            return Err(GanError::Config(format!(
                "learning rates must be finite and non-negative, got lr_g={} lr_d={}",
                self.lr_g, self.lr_d
            )));
        }
        if self.epochs == 0 {
            return Err(GanError::Config("epochs must be at least 1".to_string()));
        }
        if self.width == 0 || self.res_blocks == 0 || self.disc_width == 0 {
            return Err(GanError::Config(format!(
                "width {} / res_blocks {} / disc_width {} must all be positive",
                self.width, self.res_blocks, self.disc_width
            )));
        }
        Ok(())
    }

    /// Identity-loss multiplier for a given 1-indexed epoch: the configured
    /// value through the cutoff epoch, exactly zero afterwards.
    pub fn lambda_id_at(&self, epoch: u32) -> f64 {
        if epoch <= self.id_cutoff_epoch {
            self.lambda_id
        } else {
            0.0
        }
    }

    /// Learning rate after `decay_steps` post-cutoff iterations: linear
    /// subtractive decay from the initial rate, floored at zero.
    pub fn decayed_lr(initial: f64, decay_steps: u64) -> f64 {
        (initial * (1.0 - decay_steps as f64 / DECAY_ITERS)).max(0.0)
    }

    /// Canonical byte serialization, the basis of the checkpoint digest.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64);
        out.push(self.feature_mode.tag());
        out.extend_from_slice(&self.lambda_cyc.to_le_bytes());
        out.extend_from_slice(&self.lambda_id.to_le_bytes());
        out.extend_from_slice(&self.id_cutoff_epoch.to_le_bytes());
        out.extend_from_slice(&self.lr_g.to_le_bytes());
        out.extend_from_slice(&self.lr_d.to_le_bytes());
        out.extend_from_slice(&self.epochs.to_le_bytes());
        out.extend_from_slice(&(self.crop_len as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.width as u64).to_le_bytes());
        out.extend_from_slice(&(self.res_blocks as u64).to_le_bytes());
        out.extend_from_slice(&(self.disc_width as u64).to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GanError> {
        let mut cur = Cursor { bytes, pos: 0 };
        let cfg = CycleGanConfig {
            feature_mode: FeatureMode::from_tag(cur.u8()?)?,
            lambda_cyc: cur.f64()?,
            lambda_id: cur.f64()?,
            id_cutoff_epoch: cur.u32()?,
            lr_g: cur.f64()?,
            lr_d: cur.f64()?,
            epochs: cur.u32()?,
            crop_len: cur.u64()? as usize,
            seed: cur.u64()?,
            width: cur.u64()? as usize,
            res_blocks: cur.u64()? as usize,
            disc_width: cur.u64()? as usize,
        };
        if cur.pos != bytes.len() {
            return Err(GanError::Checkpoint(format!(
                "config section has {} trailing bytes",
                bytes.len() - cur.pos
            )));
        }
        cfg.validate().map_err(|e| GanError::Checkpoint(format!("stored config invalid: {e}")))?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical serialization.
    pub fn digest(&self) -> [u8; 32] {
        let d = Sha256::digest(self.to_bytes());
        let mut out = [0u8; 32];
        out.copy_from_slice(&d);
        out
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], GanError> {
        if self.pos + n > self.bytes.len() {
            return Err(GanError::Checkpoint("config section truncated".to_string()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, GanError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, GanError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, GanError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, GanError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
