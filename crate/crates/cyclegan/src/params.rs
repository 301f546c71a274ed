use crate::error::GanError;
use numcore::{Gradients, Tape, Tensor};
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub const WEIGHT_INIT_STD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    Bias,
    Gamma,
    Beta,
}

/// One named tensor inside a network's flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub name: String,
    pub kind: ParamKind,
    pub shape: Vec<usize>,
    pub offset: usize,
    pub len: usize,
}

/// All parameters of one network, concatenated; `segments` records the
/// layout so tensors can be materialized and gradients gathered back.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVec {
    pub segments: Vec<Segment>,
    pub flat: Vec<f64>,
}

/// Declares segments in forward order and allocates the flat vector.
pub struct LayoutBuilder {
    segments: Vec<Segment>,
    total: usize,
}

impl LayoutBuilder {
    pub fn new() -> Self {
        LayoutBuilder { segments: Vec::new(), total: 0 }
    }

    pub fn push(&mut self, name: impl Into<String>, kind: ParamKind, shape: &[usize]) {
        let len: usize = shape.iter().product();
        self.segments.push(Segment {
            name: name.into(),
            kind,
            shape: shape.to_vec(),
            offset: self.total,
            len,
        });
        self.total += len;
    }

    /// Conv weight + bias pair.
    pub fn conv(&mut self, name: &str, weight_shape: &[usize]) {
        self.push(format!("{name}.w"), ParamKind::Weight, weight_shape);
        self.push(format!("{name}.b"), ParamKind::Bias, &[weight_shape[0]]);
    }

    /// Instance-norm affine pair over `channels`.
    pub fn norm(&mut self, name: &str, channels: usize) {
        self.push(format!("{name}.gamma"), ParamKind::Gamma, &[channels]);
        self.push(format!("{name}.beta"), ParamKind::Beta, &[channels]);
    }

    /// Wraps an existing flat vector (checkpoint restore); the length must
    /// match the declared layout exactly.
    pub fn build_with(self, flat: Vec<f64>) -> Result<ParamVec, GanError> {
        if flat.len() != self.total {
            return Err(GanError::Checkpoint(format!(
                "parameter blob holds {} values, layout needs {}",
                flat.len(),
                self.total
            )));
        }
        Ok(ParamVec { segments: self.segments, flat })
    }

    /// Gaussian weights, unit gains, zero biases and shifts.
    pub fn init<R: Rng>(self, rng: &mut R) -> ParamVec {
        let normal = Normal::new(0.0, WEIGHT_INIT_STD).expect("finite std");
        let mut flat = vec![0.0; self.total];
        for seg in &self.segments {
            let slot = &mut flat[seg.offset..seg.offset + seg.len];
            match seg.kind {
                ParamKind::Weight => slot.fill_with(|| normal.sample(rng)),
                ParamKind::Bias | ParamKind::Beta => slot.fill(0.0),
                ParamKind::Gamma => slot.fill(1.0),
            }
        }
        ParamVec { segments: self.segments, flat }
    }
}

impl ParamVec {
    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    fn tensor(&self, seg: &Segment) -> Result<Tensor, GanError> {
        Tensor::new(&seg.shape, self.flat[seg.offset..seg.offset + seg.len].to_vec())
            .map_err(GanError::from)
    }

    /// Materializes every segment as a watched tape leaf, in layout order.
    pub fn watch_all(&self, tape: &mut Tape) -> Result<Vec<Tensor>, GanError> {
        self.segments.iter().map(|seg| Ok(tape.watch(&self.tensor(seg)?))).collect()
    }

    /// Materializes every segment as a constant (untracked) tensor.
    pub fn const_all(&self) -> Result<Vec<Tensor>, GanError> {
        self.segments.iter().map(|seg| self.tensor(seg)).collect()
    }

    /// Collects `backward` results for the watched handles back into flat
    /// layout; handles must come from `watch_all` on the same tape.
    pub fn gather_grads(
        &self,
        grads: &Gradients,
        handles: &[Tensor],
    ) -> Result<Vec<f64>, GanError> {
        if handles.len() != self.segments.len() {
            return Err(GanError::Shape(format!(
                "{} gradient handles for {} segments",
                handles.len(),
                self.segments.len()
            )));
        }
        let mut flat = vec![0.0; self.flat.len()];
        for (seg, handle) in self.segments.iter().zip(handles) {
            let g = grads.wrt(handle).ok_or_else(|| {
                GanError::Train(format!("no gradient recorded for parameter {}", seg.name))
            })?;
            flat[seg.offset..seg.offset + seg.len].copy_from_slice(g);
        }
        Ok(flat)
    }
}

/// Hands out parameter tensors in the order the layout declared them.
pub struct ParamFeed<'a> {
    handles: &'a [Tensor],
    next: usize,
}

impl<'a> ParamFeed<'a> {
    pub fn new(handles: &'a [Tensor]) -> Self {
        ParamFeed { handles, next: 0 }
    }

    pub fn next(&mut self) -> Result<&'a Tensor, GanError> {
        let t = self
            .handles
            .get(self.next)
            .ok_or_else(|| GanError::Shape("parameter feed exhausted".to_string()))?;
        self.next += 1;
        Ok(t)
    }

    pub fn finish(self) -> Result<(), GanError> {
        if self.next != self.handles.len() {
            return Err(GanError::Shape(format!(
                "forward consumed {} of {} parameter tensors",
                self.next,
                self.handles.len()
            )));
        }
        Ok(())
    }
}
