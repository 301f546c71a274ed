use crate::config::CycleGanConfig;
use crate::discriminator::DiscriminatorParams;
use crate::error::GanError;
use crate::features::NormStats;
use crate::generator::GeneratorParams;
use crate::model::{ModelPair, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
use numcore::AdamState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

pub const CKPT_MAGIC: &[u8; 8] = b"DSPKCKPT";
pub const CKPT_VERSION: u16 = 1;

/// IEEE CRC-32 (reflected, polynomial 0xEDB88320), bitwise.
pub fn crc32(bytes: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bytes {
        crc ^= u32::from(b);
        for _ in 0..8 {
            let mask = (crc & 1).wrapping_neg();
            crc = (crc >> 1) ^ (0xEDB8_8320 & mask);
        }
    }
    !crc
}

fn put_blob(out: &mut Vec<u8>, values: &[f64]) {
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn put_adam(out: &mut Vec<u8>, state: &AdamState) {
    put_blob(out, &state.m);
    put_blob(out, &state.v);
    out.extend_from_slice(&state.step.to_le_bytes());
}

/// Serializes the full training state behind a magic header, format
/// version, config digest, and CRC-32 trailer.
pub fn save_checkpoint(models: &ModelPair, path: &Path) -> Result<(), GanError> {
    let mut out = Vec::new();
    out.extend_from_slice(CKPT_MAGIC);
    out.extend_from_slice(&CKPT_VERSION.to_le_bytes());

    let config_bytes = models.config.to_bytes();
    out.extend_from_slice(&(config_bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&config_bytes);
    out.extend_from_slice(&models.config.digest());

    put_blob(&mut out, &models.norm_x.mean);
    put_blob(&mut out, &models.norm_x.std);
    put_blob(&mut out, &models.norm_y.mean);
    put_blob(&mut out, &models.norm_y.std);

    put_blob(&mut out, &models.g_xy.params.flat);
    put_blob(&mut out, &models.g_yx.params.flat);
    put_blob(&mut out, &models.d_x.params.flat);
    put_blob(&mut out, &models.d_y.params.flat);

    put_adam(&mut out, &models.opt_g_xy);
    put_adam(&mut out, &models.opt_g_yx);
    put_adam(&mut out, &models.opt_d_x);
    put_adam(&mut out, &models.opt_d_y);

    out.extend_from_slice(&models.epoch.to_le_bytes());
    out.extend_from_slice(&models.iter.to_le_bytes());
    out.extend_from_slice(&models.decay_steps.to_le_bytes());

    out.extend_from_slice(&models.rng.get_seed());
    out.extend_from_slice(&models.rng.get_word_pos().to_le_bytes());

    let crc = crc32(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    std::fs::write(path, out)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GanError> {
        if self.pos + n > self.bytes.len() {
            return Err(GanError::Checkpoint(format!(
                "truncated checkpoint: wanted {n} bytes at offset {}, only {} remain",
                self.pos,
                self.bytes.len() - self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u16(&mut self) -> Result<u16, GanError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, GanError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, GanError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u128(&mut self) -> Result<u128, GanError> {
        Ok(u128::from_le_bytes(self.take(16)?.try_into().unwrap()))
    }

    fn blob(&mut self) -> Result<Vec<f64>, GanError> {
        let n = self.u64()? as usize;
        let raw = self.take(n * 8)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn adam(&mut self, expected_len: usize) -> Result<AdamState, GanError> {
        let m = self.blob()?;
        let v = self.blob()?;
        let step = self.u64()?;
        if m.len() != expected_len || v.len() != expected_len {
            return Err(GanError::Checkpoint(format!(
                "optimizer moments hold {}/{} values, parameters hold {expected_len}",
                m.len(),
                v.len()
            )));
        }
        Ok(AdamState { m, v, step, beta1: ADAM_BETA1, beta2: ADAM_BETA2, eps: ADAM_EPS })
    }
}

/// Reads a checkpoint back into a ModelPair, verifying magic, version,
/// CRC-32, and the config digest before trusting any field.
pub fn load_checkpoint(path: &Path) -> Result<ModelPair, GanError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < CKPT_MAGIC.len() + 2 + 4 {
        return Err(GanError::Checkpoint(format!(
            "{} is too small ({} bytes) to be a checkpoint",
            path.display(),
            bytes.len()
        )));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored_crc = u32::from_le_bytes(trailer.try_into().unwrap());
    let actual_crc = crc32(body);
    if stored_crc != actual_crc {
        return Err(GanError::Checkpoint(format!(
            "checksum mismatch in {}: stored {stored_crc:#010x}, computed {actual_crc:#010x}",
            path.display()
        )));
    }

    let mut r = Reader { bytes: body, pos: 0 };
    let magic = r.take(8)?;
    if magic != CKPT_MAGIC {
        return Err(GanError::Checkpoint(format!(
            "{} does not start with the checkpoint magic",
            path.display()
        )));
    }
    let version = r.u16()?;
    if version != CKPT_VERSION {
        return Err(GanError::Checkpoint(format!(
            "unsupported checkpoint version {version}, this build reads {CKPT_VERSION}"
        )));
    }

    let config_len = r.u32()? as usize;
    let config_bytes = r.take(config_len)?.to_vec();
    let stored_digest = r.take(32)?.to_vec();
    let config = CycleGanConfig::from_bytes(&config_bytes)?;
    if stored_digest != config.digest() {
        return Err(GanError::Checkpoint(
            "config digest does not match the stored configuration".to_string(),
        ));
    }

    let norm_x = NormStats { mean: r.blob()?, std: r.blob()? };
    let norm_y = NormStats { mean: r.blob()?, std: r.blob()? };
    norm_x.validate()?;
    norm_y.validate()?;

    let c = config.feature_mode.channels();
    let g_xy = GeneratorParams::from_flat(c, config.width, config.res_blocks, r.blob()?)?;
    let g_yx = GeneratorParams::from_flat(c, config.width, config.res_blocks, r.blob()?)?;
    let d_x = DiscriminatorParams::from_flat(c, config.disc_width, r.blob()?)?;
    let d_y = DiscriminatorParams::from_flat(c, config.disc_width, r.blob()?)?;

    let opt_g_xy = r.adam(g_xy.num_params())?;
    let opt_g_yx = r.adam(g_yx.num_params())?;
    let opt_d_x = r.adam(d_x.num_params())?;
    let opt_d_y = r.adam(d_y.num_params())?;

    let epoch = r.u32()?;
    let iter = r.u64()?;
    let decay_steps = r.u64()?;

    let seed: [u8; 32] = r.take(32)?.try_into().unwrap();
    let word_pos = r.u128()?;
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_word_pos(word_pos);

    if r.pos != body.len() {
        return Err(GanError::Checkpoint(format!(
            "checkpoint has {} unread bytes before the trailer",
            body.len() - r.pos
        )));
    }

    Ok(ModelPair {
        config,
        g_xy,
        g_yx,
        d_x,
        d_y,
        opt_g_xy,
        opt_g_yx,
        opt_d_x,
        opt_d_y,
        norm_x,
        norm_y,
        epoch,
        iter,
        decay_steps,
        rng,
    })
}
