use crate::error::GanError;
use crate::params::{LayoutBuilder, ParamFeed, ParamVec};
use numcore::{Tape, Tensor};
use rand::Rng;

pub const IN_EPS: f64 = 1e-5;

/// 1-D gated convolutional generator: one stride-1 gated input conv, two
/// stride-2 downsampling blocks, `res_blocks` residual blocks, two
/// pixel-shuffle upsampling blocks, and a stride-1 output conv. Output shape
/// always equals input shape.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub channels: usize,
    pub width: usize,
    pub res_blocks: usize,
    pub params: ParamVec,
}

impl GeneratorParams {
    fn layout(channels: usize, width: usize, res_blocks: usize) -> LayoutBuilder {
        let w = width;
        let mut layout = LayoutBuilder::new();
        layout.conv("input", &[2 * w, channels, 15]);
        layout.conv("down1", &[4 * w, w, 5]);
        layout.norm("down1", 2 * w);
        layout.conv("down2", &[8 * w, 2 * w, 5]);
        layout.norm("down2", 4 * w);
        for i in 0..res_blocks {
            layout.conv(&format!("res{i}.c1"), &[8 * w, 4 * w, 3]);
            layout.norm(&format!("res{i}.n1"), 4 * w);
            layout.conv(&format!("res{i}.c2"), &[4 * w, 4 * w, 3]);
            layout.norm(&format!("res{i}.n2"), 4 * w);
        }
        layout.conv("up1", &[8 * w, 4 * w, 5]);
        layout.norm("up1", 2 * w);
        layout.conv("up2", &[4 * w, 2 * w, 5]);
        layout.norm("up2", w);
        layout.conv("output", &[channels, w, 15]);
        layout
    }

    pub fn init<R: Rng>(channels: usize, width: usize, res_blocks: usize, rng: &mut R) -> Self {
        let params = Self::layout(channels, width, res_blocks).init(rng);
        GeneratorParams { channels, width, res_blocks, params }
    }

    pub fn from_flat(
        channels: usize,
        width: usize,
        res_blocks: usize,
        flat: Vec<f64>,
    ) -> Result<Self, GanError> {
        let params = Self::layout(channels, width, res_blocks).build_with(flat)?;
        Ok(GeneratorParams { channels, width, res_blocks, params })
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn check_input(&self, x: &Tensor) -> Result<(), GanError> {
        let s = x.shape();
        if s.len() != 2 || s[0] != self.channels {
            return Err(GanError::Shape(format!(
                "generator expects [{}, T] input, got {s:?}",
                self.channels
            )));
        }
        let t = s[1];
        if t % 4 != 0 || t < 8 {
            return Err(GanError::Shape(format!(
                "generator needs T divisible by 4 and >= 8 (two stride-2 stages), got T={t}; \
                 pad the input to a multiple of 4"
            )));
        }
        Ok(())
    }

    /// Watched parameter leaves, in the same order `forward_with` consumes.
    pub fn watch_params(&self, tape: &mut Tape) -> Result<Vec<Tensor>, GanError> {
        self.params.watch_all(tape)
    }

    /// Forward pass consuming pre-materialized parameter tensors; pass
    /// watched handles to train or `const` tensors to just evaluate.
    pub fn forward_with(
        &self,
        tape: &mut Tape,
        handles: &[Tensor],
        x: &Tensor,
    ) -> Result<Tensor, GanError> {
        self.check_input(x)?;
        let mut feed = ParamFeed::new(handles);

        let (w, b) = (feed.next()?, feed.next()?);
        let conv = tape.conv1d(x, w, b, 1, 7)?;
        let mut h = tape.glu(&conv)?;

        for _ in 0..2 {
            let (w, b) = (feed.next()?, feed.next()?);
            let (gamma, beta) = (feed.next()?, feed.next()?);
            let conv = tape.conv1d(&h, w, b, 2, 2)?;
            let gated = tape.glu(&conv)?;
            h = tape.instance_norm(&gated, gamma, beta, IN_EPS)?;
        }

        for _ in 0..self.res_blocks {
            let (w1, b1) = (feed.next()?, feed.next()?);
            let (g1, be1) = (feed.next()?, feed.next()?);
            let (w2, b2) = (feed.next()?, feed.next()?);
            let (g2, be2) = (feed.next()?, feed.next()?);
            let c1 = tape.conv1d(&h, w1, b1, 1, 1)?;
            let gated = tape.glu(&c1)?;
            let t1 = tape.instance_norm(&gated, g1, be1, IN_EPS)?;
            let c2 = tape.conv1d(&t1, w2, b2, 1, 1)?;
            let t2 = tape.instance_norm(&c2, g2, be2, IN_EPS)?;
            h = tape.add(&h, &t2)?;
        }

        for _ in 0..2 {
            let (w, b) = (feed.next()?, feed.next()?);
            let (gamma, beta) = (feed.next()?, feed.next()?);
            let conv = tape.conv1d(&h, w, b, 1, 2)?;
            let up = tape.pixel_shuffle_1d(&conv, 2)?;
            let gated = tape.glu(&up)?;
            h = tape.instance_norm(&gated, gamma, beta, IN_EPS)?;
        }

        let (w, b) = (feed.next()?, feed.next()?);
        let out = tape.conv1d(&h, w, b, 1, 7)?;
        feed.finish()?;
        Ok(out)
    }

    /// Gradient-free evaluation on a private tape.
    pub fn infer(&self, x: &Tensor) -> Result<Tensor, GanError> {
        let mut tape = Tape::no_grad();
        let handles = self.params.const_all()?;
        self.forward_with(&mut tape, &handles, x)
    }
}
