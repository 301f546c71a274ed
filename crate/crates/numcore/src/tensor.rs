use std::sync::Arc;

use crate::error::NumError;

/// Handle of a node on a [`crate::Tape`].
pub type NodeId = usize;

/// An n-dimensional array of `f64` in row-major order.
///
/// Values are immutable after creation; clones share storage. A tensor owns
/// an optional tape handle when it was produced by (or watched on) a tape.
/// Scalars are represented by an empty shape.
#[derive(Clone, Debug)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Arc<Vec<f64>>,
    pub(crate) node: Option<NodeId>,
    pub(crate) requires_grad: bool,
}

impl Tensor {
    /// Builds a tensor, validating that `shape` multiplies out to `data.len()`
    /// and that every element is finite.
    pub fn new(shape: &[usize], data: Vec<f64>) -> Result<Self, NumError> {
        let numel: usize = shape.iter().product();
        if shape.iter().any(|&d| d == 0) {
            return Err(NumError::shape(
                "tensor",
                format!("zero-sized dimension in shape {shape:?}"),
            ));
        }
        if numel != data.len() {
            return Err(NumError::shape(
                "tensor",
                format!("shape {:?} implies {} elements, got {}", shape, numel, data.len()),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(NumError::NonFinite { op: "tensor" });
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data: Arc::new(data),
            node: None,
            requires_grad: false,
        })
    }

    /// Internal constructor for op outputs whose invariants are already known.
    pub(crate) fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Tensor { shape, data: Arc::new(data), node: None, requires_grad: false }
    }

    pub fn scalar(v: f64) -> Result<Self, NumError> {
        Self::new(&[], vec![v])
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let numel = shape.iter().product();
        Tensor::from_parts(shape.to_vec(), vec![0.0; numel])
    }

    pub fn filled(shape: &[usize], v: f64) -> Result<Self, NumError> {
        let numel = shape.iter().product();
        Self::new(shape, vec![v; numel])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn requires_grad(&self) -> bool {
        self.requires_grad
    }

    pub fn node(&self) -> Option<NodeId> {
        self.node
    }

    /// Extracts the value of a single-element tensor.
    pub fn item(&self) -> Result<f64, NumError> {
        if self.numel() == 1 {
            Ok(self.data[0])
        } else {
            Err(NumError::shape(
                "item",
                format!("expected a scalar, got shape {:?}", self.shape),
            ))
        }
    }

    /// Returns an untracked copy with `delta` added to one element; used for
    /// finite-difference probes.
    pub fn nudged(&self, index: usize, delta: f64) -> Result<Tensor, NumError> {
        if index >= self.numel() {
            return Err(NumError::shape(
                "nudged",
                format!("index {index} out of range for {} elements", self.numel()),
            ));
        }
        let mut data = self.data.to_vec();
        data[index] += delta;
        Tensor::new(&self.shape, data)
    }

    /// Returns a copy of this tensor detached from any tape.
    pub fn detached(&self) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: Arc::clone(&self.data),
            node: None,
            requires_grad: false,
        }
    }

    /// Row-major index for a 2-D tensor.
    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> f64 {
        debug_assert_eq!(self.shape.len(), 2);
        self.data[i * self.shape[1] + j]
    }
}

impl PartialEq for Tensor {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && *self.data == *other.data
    }
}
