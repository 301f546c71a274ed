use crate::error::FrontendError;
use cyclegan::{crc32, FeatureMode, GeneratorParams, ModelPair, NormStats};
use std::path::Path;
use vocoderfeat::F0Stats;

pub const BUNDLE_MAGIC: &[u8; 8] = b"DSPKFE01";

/// Which trained mapping to package for deployment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    XtoY,
    YtoX,
}

/// Everything inference needs: the forward generator (or none, for the
/// degenerate pass-through bundle), the feature layout it was trained on,
/// corpus-level F0 statistics for both domains, and the per-channel
/// normalization applied around the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontendBundle {
    pub generator: Option<GeneratorParams>,
    pub feature_mode: FeatureMode,
    pub src_f0: F0Stats,
    pub tgt_f0: F0Stats,
    pub src_norm: NormStats,
    pub tgt_norm: NormStats,
}

fn check_f0(name: &str, stats: &F0Stats) -> Result<(), FrontendError> {
    if !(stats.mu.is_finite() && stats.sigma.is_finite() && stats.sigma > 0.0) {
        return Err(FrontendError::Bundle(format!(
            "{name} F0 statistics invalid: mu {}, sigma {}",
            stats.mu, stats.sigma
        )));
    }
    Ok(())
}

impl FrontendBundle {
    /// Pass-through bundle: no generator, zero-mean/unit-scale statistics,
    /// so features and F0 survive conversion unchanged.
    pub fn identity(feature_mode: FeatureMode) -> Self {
        let unit = F0Stats { mu: 0.0, sigma: 1.0, count: 0 };
        let c = feature_mode.channels();
        FrontendBundle {
            generator: None,
            feature_mode,
            src_f0: unit,
            tgt_f0: unit,
            src_norm: NormStats::identity(c),
            tgt_norm: NormStats::identity(c),
        }
    }

    /// Packages one direction of a trained pair with corpus F0 statistics.
    pub fn from_models(
        models: &ModelPair,
        direction: Direction,
        src_f0: F0Stats,
        tgt_f0: F0Stats,
    ) -> Result<Self, FrontendError> {
        let (generator, src_norm, tgt_norm) = match direction {
            Direction::XtoY => (&models.g_xy, &models.norm_x, &models.norm_y),
            Direction::YtoX => (&models.g_yx, &models.norm_y, &models.norm_x),
        };
        let bundle = FrontendBundle {
            generator: Some(generator.clone()),
            feature_mode: models.config.feature_mode,
            src_f0,
            tgt_f0,
            src_norm: src_norm.clone(),
            tgt_norm: tgt_norm.clone(),
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn validate(&self) -> Result<(), FrontendError> {
        let c = self.feature_mode.channels();
        if let Some(g) = &self.generator {
            if g.channels != c {
                return Err(FrontendError::Bundle(format!(
                    "generator works on {} channels but the feature mode has {c}",
                    g.channels
                )));
            }
        }
        for (name, stats) in [("source", &self.src_norm), ("target", &self.tgt_norm)] {
            stats.validate()?;
            if stats.channels() != c {
                return Err(FrontendError::Bundle(format!(
                    "{name} normalization covers {} channels, feature mode has {c}",
                    stats.channels()
                )));
            }
        }
        check_f0("source", &self.src_f0)?;
        check_f0("target", &self.tgt_f0)
    }

    pub fn save(&self, path: &Path) -> Result<(), FrontendError> {
        self.validate()?;
        let mut out = Vec::new();
        out.extend_from_slice(BUNDLE_MAGIC);
        out.push(match self.feature_mode {
            FeatureMode::Mfb => 0,
            FeatureMode::MfbAp => 1,
        });
        match &self.generator {
            None => out.push(0),
            Some(g) => {
                out.push(1);
                out.extend_from_slice(&(g.width as u64).to_le_bytes());
                out.extend_from_slice(&(g.res_blocks as u64).to_le_bytes());
                put_blob(&mut out, &g.params.flat);
            }
        }
        for stats in [&self.src_f0, &self.tgt_f0] {
            out.extend_from_slice(&stats.mu.to_le_bytes());
            out.extend_from_slice(&stats.sigma.to_le_bytes());
            out.extend_from_slice(&(stats.count as u64).to_le_bytes());
        }
        for norm in [&self.src_norm, &self.tgt_norm] {
            put_blob(&mut out, &norm.mean);
            put_blob(&mut out, &norm.std);
        }
        let crc = crc32(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, FrontendError> {
        let bytes = std::fs::read(path)?;
        if bytes.len() < BUNDLE_MAGIC.len() + 4 {
            return Err(FrontendError::Bundle(format!(
                "bundle file too small ({} bytes)",
                bytes.len()
            )));
        }
        let (body, trailer) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(trailer.try_into().unwrap());
        let actual = crc32(body);
        if stored != actual {
            return Err(FrontendError::Bundle(format!(
                "checksum mismatch: stored {stored:#010x}, computed {actual:#010x}"
            )));
        }
        let mut r = Reader { bytes: body, pos: 0 };
        if r.take(BUNDLE_MAGIC.len())? != BUNDLE_MAGIC {
            return Err(FrontendError::Bundle("not a front-end bundle file".to_string()));
        }
        let feature_mode = match r.u8()? {
            0 => FeatureMode::Mfb,
            1 => FeatureMode::MfbAp,
            other => {
                return Err(FrontendError::Bundle(format!("unknown feature mode tag {other}")))
            }
        };
        let generator = match r.u8()? {
            0 => None,
            1 => {
                let width = r.u64()? as usize;
                let res_blocks = r.u64()? as usize;
                let flat = r.blob()?;
                Some(GeneratorParams::from_flat(
                    feature_mode.channels(),
                    width,
                    res_blocks,
                    flat,
                )?)
            }
            other => {
                return Err(FrontendError::Bundle(format!("unknown generator tag {other}")))
            }
        };
        let mut f0 = Vec::with_capacity(2);
        for _ in 0..2 {
            let mu = r.f64()?;
            let sigma = r.f64()?;
            let count = r.u64()? as usize;
            f0.push(F0Stats { mu, sigma, count });
        }
        let tgt_f0 = f0.pop().unwrap();
        let src_f0 = f0.pop().unwrap();
        let mut norms = Vec::with_capacity(2);
        for _ in 0..2 {
            let mean = r.blob()?;
            let std = r.blob()?;
            norms.push(NormStats { mean, std });
        }
        let tgt_norm = norms.pop().unwrap();
        let src_norm = norms.pop().unwrap();
        if r.pos != body.len() {
            return Err(FrontendError::Bundle(format!(
                "{} unread bytes after bundle payload",
                body.len() - r.pos
            )));
        }
        let bundle =
            FrontendBundle { generator, feature_mode, src_f0, tgt_f0, src_norm, tgt_norm };
        bundle.validate()?;
        Ok(bundle)
    }
}

fn put_blob(out: &mut Vec<u8>, values: &[f64]) {
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FrontendError> {
        if self.pos + n > self.bytes.len() {
            return Err(FrontendError::Bundle(format!(
                "truncated bundle: wanted {n} bytes at offset {}, only {} remain",
                self.pos,
                self.bytes.len() - self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, FrontendError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64, FrontendError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, FrontendError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn blob(&mut self) -> Result<Vec<f64>, FrontendError> {
        let n = self.u64()? as usize;
        if n > self.bytes.len() / 8 + 1 {
            return Err(FrontendError::Bundle(format!(
                "blob length {n} exceeds file size"
            )));
        }
        let raw = self.take(n * 8)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}
