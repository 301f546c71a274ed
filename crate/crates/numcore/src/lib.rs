//! Deterministic tensor engine with reverse-mode automatic differentiation.
//!
//! Everything runs on 64-bit floats, single-threaded, with fixed iteration
//! order, so identical inputs give bit-identical outputs. Operations are
//! recorded on a [`Tape`]; [`Tape::backward`] replays the tape in reverse to
//! populate gradients for watched leaves. The op set is exactly what a gated
//! convolutional translation model needs: 1-D/2-D convolution, GLU, instance
//! normalization, 1-D pixel shuffle, and the L1/LSGAN losses.

mod adam;
mod error;
pub mod gradcheck;
mod tape;
mod tensor;

pub use adam::{adam_step, AdamState};
pub use error::NumError;
pub use tape::{Gradients, Tape};
pub use tensor::{NodeId, Tensor};
