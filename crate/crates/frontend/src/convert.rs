use crate::bundle::FrontendBundle;
use crate::error::FrontendError;
use cyclegan::{denormalize, matrix_to_rows, normalize, sequence_to_matrix, FeatureMode};
use numcore::{Tape, Tensor};
use vocoderfeat::{
    analyze, synthesize, transform_f0, FeatureSequence, FrameSpec, PitchConfig, Waveform,
};

/// Smallest frame count the generator accepts that covers `t`: a multiple
/// of 4, at least 8 (two stride-2 stages each way).
fn padded_len(t: usize) -> usize {
    t.max(8).div_ceil(4) * 4
}

/// Runs one [C, T] feature matrix through the bundled generator.
///
/// The time axis is padded to the generator's granularity by repeating the
/// final frame, and the output is trimmed back to T, so callers never see
/// the padding. A bundle without a generator passes the matrix through
/// bit-identically.
pub fn convert_features(x: &Tensor, bundle: &FrontendBundle) -> Result<Tensor, FrontendError> {
    bundle.validate()?;
    let c = bundle.feature_mode.channels();
    let s = x.shape();
    if s.len() != 2 || s[0] != c {
        return Err(FrontendError::Convert(format!(
            "feature matrix has shape {s:?}, bundle expects [{c}, T]"
        )));
    }
    let t = s[1];
    if t == 0 {
        return Err(FrontendError::Convert("empty feature matrix".to_string()));
    }
    let Some(generator) = &bundle.generator else {
        return Ok(x.clone());
    };

    let tp = padded_len(t);
    let mut data = vec![0.0; c * tp];
    for ch in 0..c {
        let row = &x.data()[ch * t..(ch + 1) * t];
        let dst = &mut data[ch * tp..(ch + 1) * tp];
        dst[..t].copy_from_slice(row);
        dst[t..].fill(row[t - 1]);
    }
    let padded = Tensor::new(&[c, tp], data)?;
    let normed = normalize(&padded, &bundle.src_norm)?;

    let mut tape = Tape::no_grad();
    let handles = generator.params.const_all()?;
    let out = generator.forward_with(&mut tape, &handles, &normed)?;

    let od = out.data();
    let mut trimmed = vec![0.0; c * t];
    for ch in 0..c {
        trimmed[ch * t..(ch + 1) * t].copy_from_slice(&od[ch * tp..ch * tp + t]);
    }
    let trimmed = Tensor::new(&[c, t], trimmed)?;
    Ok(denormalize(&trimmed, &bundle.tgt_norm)?)
}

/// Converts an analyzed utterance: spectral features through the
/// generator, log-F0 through the Gaussian re-standardization, voicing
/// untouched. In MFB mode the aperiodicity matrix passes through
/// bit-identically.
pub fn convert_sequence(
    seq: &FeatureSequence,
    bundle: &FrontendBundle,
) -> Result<FeatureSequence, FrontendError> {
    let matrix = sequence_to_matrix(seq, bundle.feature_mode)?;
    let converted = convert_features(&matrix, bundle)?;
    let (mfb, ap_rows) = matrix_to_rows(&converted, bundle.feature_mode)?;
    let ap = match bundle.feature_mode {
        FeatureMode::Mfb => seq.ap.clone(),
        FeatureMode::MfbAp => ap_rows.expect("joint mode always yields ap rows"),
    };
    let log_f0 = transform_f0(&seq.log_f0, &seq.vuv, &bundle.src_f0, &bundle.tgt_f0)?;
    let out = FeatureSequence { mfb, ap, log_f0, vuv: seq.vuv.clone() };
    out.validate().map_err(|e| {
        FrontendError::Convert(format!("generator produced unusable features: {e}"))
    })?;
    Ok(out)
}

/// Full waveform-to-waveform pass: analyze, convert, resynthesize. The
/// output duration differs from the input by less than one hop.
pub fn convert_utterance(
    wav: &Waveform,
    bundle: &FrontendBundle,
) -> Result<Waveform, FrontendError> {
    let spec = FrameSpec::default();
    let seq = analyze(wav, &spec, &PitchConfig::default())?;
    let converted = convert_sequence(&seq, bundle)?;
    Ok(synthesize(&converted, &spec)?)
}
