use crate::error::GanError;
use crate::params::{LayoutBuilder, ParamFeed, ParamVec};
use numcore::{Tape, Tensor};
use rand::Rng;

pub const MIN_DISC_FRAMES: usize = 16;

/// Patch discriminator over the feature matrix viewed as a 1-channel image:
/// four 3x3 gated conv blocks with temporal stride 2, then a 3x3 projection
/// to a grid of raw patch logits.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorParams {
    pub channels: usize,
    pub width: usize,
    pub params: ParamVec,
}

impl DiscriminatorParams {
    fn layout(width: usize) -> LayoutBuilder {
        let d = width;
        let mut layout = LayoutBuilder::new();
        layout.conv("block1", &[2 * d, 1, 3, 3]);
        layout.conv("block2", &[4 * d, d, 3, 3]);
        layout.conv("block3", &[8 * d, 2 * d, 3, 3]);
        layout.conv("block4", &[16 * d, 4 * d, 3, 3]);
        layout.conv("proj", &[1, 8 * d, 3, 3]);
        layout
    }

    pub fn init<R: Rng>(channels: usize, width: usize, rng: &mut R) -> Self {
        DiscriminatorParams { channels, width, params: Self::layout(width).init(rng) }
    }

    pub fn from_flat(channels: usize, width: usize, flat: Vec<f64>) -> Result<Self, GanError> {
        Ok(DiscriminatorParams { channels, width, params: Self::layout(width).build_with(flat)? })
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Output grid shape for a [C, T] input under the fixed stride plan.
    pub fn grid_shape(&self, t: usize) -> (usize, usize) {
        let mut w = t;
        for _ in 0..4 {
            w = (w + 2 - 3) / 2 + 1;
        }
        (self.channels, w)
    }

    pub fn check_input(&self, x: &Tensor) -> Result<(), GanError> {
        let s = x.shape();
        if s.len() != 2 || s[0] != self.channels {
            return Err(GanError::Shape(format!(
                "discriminator expects [{}, T] input, got {s:?}",
                self.channels
            )));
        }
        if s[1] < MIN_DISC_FRAMES {
            return Err(GanError::Shape(format!(
                "discriminator needs T >= {MIN_DISC_FRAMES} frames, got T={}",
                s[1]
            )));
        }
        Ok(())
    }

    pub fn watch_params(&self, tape: &mut Tape) -> Result<Vec<Tensor>, GanError> {
        self.params.watch_all(tape)
    }

    /// Forward pass to the [C, T/16] patch-logit grid.
    pub fn forward_with(
        &self,
        tape: &mut Tape,
        handles: &[Tensor],
        x: &Tensor,
    ) -> Result<Tensor, GanError> {
        self.check_input(x)?;
        let t = x.shape()[1];
        let mut feed = ParamFeed::new(handles);

        let mut h = tape.reshape(x, &[1, self.channels, t])?;
        for _ in 0..4 {
            let (w, b) = (feed.next()?, feed.next()?);
            let conv = tape.conv2d(&h, w, b, (1, 2), (1, 1))?;
            h = tape.glu(&conv)?;
        }
        let (w, b) = (feed.next()?, feed.next()?);
        let logits = tape.conv2d(&h, w, b, (1, 1), (1, 1))?;
        feed.finish()?;
        let s = logits.shape().to_vec();
        let grid = tape.reshape(&logits, &[s[1], s[2]])?;
        Ok(grid)
    }

    /// Gradient-free evaluation on a private tape.
    pub fn infer(&self, x: &Tensor) -> Result<Tensor, GanError> {
        let mut tape = Tape::no_grad();
        let handles = self.params.const_all()?;
        self.forward_with(&mut tape, &handles, x)
    }
}
