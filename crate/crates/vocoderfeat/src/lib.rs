//! Speech analysis/synthesis feature codec.
//!
//! Decomposes 16 kHz mono audio into the representation the conversion model
//! operates on — 24 log mel-band energies, 24 band aperiodicities, log
//! fundamental frequency, and voicing flags at a 5 ms hop — and resynthesizes
//! audio from that representation with an excitation-filter scheme. All
//! analysis is deterministic; synthesis uses a fixed-seed noise source so the
//! whole codec is a pure function of its inputs.

mod ap;
mod error;
mod f0;
mod features;
mod frame;
mod mel;
mod spectrum;
mod synth;
mod wave;

pub use ap::{estimate_ap, WindowBias};
pub use error::FeatError;
pub use f0::{estimate_f0, f0_stats, transform_f0, F0Stats, PitchConfig};
pub use features::{analyze, read_features, write_features, FeatureSequence};
pub use frame::{frame_signal, raw_frames, FrameSpec};
pub use mel::{extract_mfb, hz_to_mel, mel_to_hz, MelFilterbank, MFB_FLOOR, N_MELS};
pub use spectrum::{one_sided_power_sum, one_sided_to_full, stft_mag, FftPair};
pub use synth::synthesize;
pub use wave::{Waveform, SAMPLE_RATE};
