use std::io::{Read, Write};
use std::path::Path;

use crate::ap::estimate_ap;
use crate::error::FeatError;
use crate::f0::{estimate_f0, PitchConfig};
use crate::frame::{frame_signal, FrameSpec};
use crate::mel::{extract_mfb, MelFilterbank, N_MELS};
use crate::spectrum::stft_mag;
use crate::wave::Waveform;

const MAGIC: &[u8; 5] = b"DSPK1";

/// Per-utterance feature bundle: log mel-band energies, band aperiodicities,
/// log fundamental frequency, and voicing flags, all sharing one frame axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    pub mfb: Vec<Vec<f64>>,
    pub ap: Vec<Vec<f64>>,
    pub log_f0: Vec<f64>,
    pub vuv: Vec<bool>,
}

impl FeatureSequence {
    pub fn len(&self) -> usize {
        self.mfb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mfb.is_empty()
    }

    pub fn validate(&self) -> Result<(), FeatError> {
        let t = self.mfb.len();
        if self.ap.len() != t || self.log_f0.len() != t || self.vuv.len() != t {
            return Err(FeatError::Invalid(format!(
                "component lengths disagree: mfb {}, ap {}, log_f0 {}, vuv {}",
                t,
                self.ap.len(),
                self.log_f0.len(),
                self.vuv.len()
            )));
        }
        for (i, row) in self.mfb.iter().enumerate() {
            if row.len() != N_MELS {
                return Err(FeatError::Invalid(format!(
                    "mfb row {i} has {} values, expected {N_MELS}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(FeatError::Invalid(format!("non-finite mfb value in frame {i}")));
            }
        }
        for (i, row) in self.ap.iter().enumerate() {
            if row.len() != N_MELS {
                return Err(FeatError::Invalid(format!(
                    "ap row {i} has {} values, expected {N_MELS}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(FeatError::Invalid(format!("ap value outside [0,1] in frame {i}")));
            }
        }
        for (i, (&lf, &voiced)) in self.log_f0.iter().zip(&self.vuv).enumerate() {
            if voiced && !lf.is_finite() {
                return Err(FeatError::Invalid(format!(
                    "voiced frame {i} has non-finite log_f0"
                )));
            }
        }
        Ok(())
    }
}

/// Full analysis pass: framing, spectra, filterbank energies, pitch,
/// aperiodicity. Deterministic; the same waveform always produces the same
/// bits.
pub fn analyze(
    wav: &Waveform,
    spec: &FrameSpec,
    pitch: &PitchConfig,
) -> Result<FeatureSequence, FeatError> {
    let frames = frame_signal(wav, spec)?;
    let spectra = stft_mag(&frames, spec);
    let bank = MelFilterbank::new(spec, 0.0, f64::from(crate::wave::SAMPLE_RATE) / 2.0);
    let mfb = extract_mfb(&spectra, &bank);
    let (f0, vuv) = estimate_f0(wav, spec, pitch)?;
    let ap = estimate_ap(&spectra, &f0, &vuv, &bank, spec)?;
    let log_f0 = f0
        .iter()
        .zip(&vuv)
        .map(|(&hz, &voiced)| if voiced { hz.ln() } else { 0.0 })
        .collect();
    let seq = FeatureSequence { mfb, ap, log_f0, vuv };
    seq.validate()?;
    Ok(seq)
}

fn push_rows(buf: &mut Vec<u8>, rows: &[Vec<f64>]) {
    for row in rows {
        for v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
}

/// Serializes to the versioned binary layout: magic, frame count, row-major
/// 64-bit little-endian floats for mfb then ap then log_f0, then voicing
/// flags packed eight to a byte (least significant bit first).
pub fn write_features(seq: &FeatureSequence, path: &Path) -> Result<(), FeatError> {
    seq.validate()?;
    let t = seq.len();
    if t > u32::MAX as usize {
        return Err(FeatError::Invalid(format!("{t} frames exceed the format limit")));
    }
    let mut buf = Vec::with_capacity(5 + 4 + t * (2 * N_MELS + 1) * 8 + t.div_ceil(8));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(t as u32).to_le_bytes());
    push_rows(&mut buf, &seq.mfb);
    push_rows(&mut buf, &seq.ap);
    for v in &seq.log_f0 {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut packed = vec![0u8; t.div_ceil(8)];
    for (i, &voiced) in seq.vuv.iter().enumerate() {
        if voiced {
            packed[i / 8] |= 1 << (i % 8);
        }
    }
    buf.extend_from_slice(&packed);
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

fn take_f64(bytes: &[u8], pos: &mut usize, path: &Path) -> Result<f64, FeatError> {
    let end = *pos + 8;
    let slice = bytes.get(*pos..end).ok_or_else(|| {
        FeatError::FeatureFile(format!("{}: truncated float data", path.display()))
    })?;
    *pos = end;
    Ok(f64::from_le_bytes(slice.try_into().expect("8-byte slice")))
}

fn take_rows(
    bytes: &[u8],
    pos: &mut usize,
    t: usize,
    path: &Path,
) -> Result<Vec<Vec<f64>>, FeatError> {
    let mut rows = Vec::with_capacity(t);
    for _ in 0..t {
        let mut row = Vec::with_capacity(N_MELS);
        for _ in 0..N_MELS {
            row.push(take_f64(bytes, pos, path)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_features(path: &Path) -> Result<FeatureSequence, FeatError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 9 || &bytes[..5] != MAGIC {
        return Err(FeatError::FeatureFile(format!(
            "{}: missing DSPK1 magic",
            path.display()
        )));
    }
    let t = u32::from_le_bytes(bytes[5..9].try_into().expect("4-byte slice")) as usize;
    let mut pos = 9;
    let mfb = take_rows(&bytes, &mut pos, t, path)?;
    let ap = take_rows(&bytes, &mut pos, t, path)?;
    let mut log_f0 = Vec::with_capacity(t);
    for _ in 0..t {
        log_f0.push(take_f64(&bytes, &mut pos, path)?);
    }
    let packed_len = t.div_ceil(8);
    let packed = bytes.get(pos..pos + packed_len).ok_or_else(|| {
        FeatError::FeatureFile(format!("{}: truncated voicing flags", path.display()))
    })?;
    pos += packed_len;
    if pos != bytes.len() {
        return Err(FeatError::FeatureFile(format!(
            "{}: {} trailing bytes after payload",
            path.display(),
            bytes.len() - pos
        )));
    }
    let vuv: Vec<bool> = (0..t).map(|i| packed[i / 8] >> (i % 8) & 1 == 1).collect();
    let seq = FeatureSequence { mfb, ap, log_f0, vuv };
    seq.validate()
        .map_err(|e| FeatError::FeatureFile(format!("{}: {e}", path.display())))?;
    Ok(seq)
}
