use crate::error::NumError;
use crate::tensor::{NodeId, Tensor};

/// One recorded operation. Saved input tensors share storage with the
/// tensors the caller holds, so recording is cheap.
enum Op {
    Leaf,
    Conv1d { x: Tensor, w: Tensor, stride: usize, pad: usize, b: Tensor },
    Conv2d { x: Tensor, w: Tensor, b: Tensor, stride: (usize, usize), pad: (usize, usize) },
    Glu { x: Tensor },
    InstanceNorm { x: Tensor, gamma: Tensor, beta: Tensor, mean: Vec<f64>, inv_std: Vec<f64> },
    PixelShuffle1d { x: Tensor, r: usize },
    Add { a: Tensor, b: Tensor },
    Scale { x: Tensor, c: f64 },
    Sum { x: Tensor },
    WeightedSum { x: Tensor, w: Vec<f64> },
    Reshape { x: Tensor },
    L1Loss { a: Tensor, b: Tensor },
    MseLoss { pred: Tensor, target: Tensor },
    MseLossScalar { pred: Tensor, target: f64 },
}

struct Node {
    op: Op,
    out_len: usize,
    requires_grad: bool,
}

/// Wengert tape recording forward operations for reverse-mode differentiation.
///
/// Nodes are stored in the order they were created, so every node's inputs
/// precede it and a single reverse sweep visits each node exactly once.
/// A tape built with [`Tape::no_grad`] computes forward values without
/// recording anything.
pub struct Tape {
    nodes: Vec<Node>,
    enabled: bool,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

/// Gradients produced by [`Tape::backward`], indexed by tape node.
pub struct Gradients {
    by_node: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    /// Gradient with respect to `t`. Watched leaves always have an entry
    /// (zeros when the loss does not reach them); untracked tensors and
    /// unreached intermediates return `None`.
    pub fn wrt(&self, t: &Tensor) -> Option<&[f64]> {
        t.node.and_then(|id| self.by_node.get(id)).and_then(|g| g.as_deref())
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn accumulate(slot: &mut Option<Vec<f64>>, len: usize, f: impl FnOnce(&mut [f64])) {
    let buf = slot.get_or_insert_with(|| vec![0.0; len]);
    f(buf);
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new(), enabled: true }
    }

    /// A tape that evaluates forward values only; nothing is recorded and
    /// `backward` has nothing to differentiate. Used for inference.
    pub fn no_grad() -> Self {
        Tape { nodes: Vec::new(), enabled: false }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Registers `t` as a differentiable leaf and returns the tracked handle.
    pub fn watch(&mut self, t: &Tensor) -> Tensor {
        let mut out = t.detached();
        if self.enabled {
            let id = self.push(Op::Leaf, out.numel(), true);
            out.node = Some(id);
            out.requires_grad = true;
        }
        out
    }

    fn push(&mut self, op: Op, out_len: usize, requires_grad: bool) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node { op, out_len, requires_grad });
        id
    }

    /// Wraps freshly computed forward data: checks finiteness, records the op.
    fn emit(
        &mut self,
        name: &'static str,
        shape: Vec<usize>,
        data: Vec<f64>,
        op: Op,
    ) -> Result<Tensor, NumError> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(NumError::NonFinite { op: name });
        }
        let mut out = Tensor::from_parts(shape, data);
        if self.enabled {
            let id = self.push(op, out.numel(), false);
            out.node = Some(id);
        }
        Ok(out)
    }

    /// 1-D convolution of `x: [C_in, T]` with `w: [C_out, C_in, k]` and
    /// `b: [C_out]`, zero padding on both ends.
    pub fn conv1d(
        &mut self,
        x: &Tensor,
        w: &Tensor,
        b: &Tensor,
        stride: usize,
        pad: usize,
    ) -> Result<Tensor, NumError> {
        const OP: &str = "conv1d";
        let (xs, ws, bs) = (x.shape(), w.shape(), b.shape());
        if xs.len() != 2 {
            return Err(NumError::shape(OP, format!("input must be [C_in, T], got {xs:?}")));
        }
        if ws.len() != 3 {
            return Err(NumError::shape(OP, format!("weight must be [C_out, C_in, k], got {ws:?}")));
        }
        let (c_in, t) = (xs[0], xs[1]);
        let (c_out, w_cin, k) = (ws[0], ws[1], ws[2]);
        if w_cin != c_in {
            return Err(NumError::shape(
                OP,
                format!("weight in_channels {w_cin} != input channels {c_in}"),
            ));
        }
        if bs != [c_out] {
            return Err(NumError::shape(OP, format!("bias shape {bs:?} != [{c_out}]")));
        }
        if stride < 1 {
            return Err(NumError::shape(OP, "stride must be >= 1".to_string()));
        }
        if k > t + 2 * pad {
            return Err(NumError::shape(
                OP,
                format!("kernel {k} exceeds padded length {}", t + 2 * pad),
            ));
        }
        let t_out = (t + 2 * pad - k) / stride + 1;

        let xp = pad_rows(x.data(), c_in, t, pad);
        let tp = t + 2 * pad;
        let mut out = vec![0.0; c_out * t_out];
        let wd = w.data();
        let bd = b.data();
        for co in 0..c_out {
            let orow = &mut out[co * t_out..(co + 1) * t_out];
            orow.fill(bd[co]);
            for ci in 0..c_in {
                let xrow = &xp[ci * tp..(ci + 1) * tp];
                let wrow = &wd[(co * c_in + ci) * k..(co * c_in + ci + 1) * k];
                for (j, &wv) in wrow.iter().enumerate() {
                    for (ti, o) in orow.iter_mut().enumerate() {
                        *o += wv * xrow[ti * stride + j];
                    }
                }
            }
        }
        self.emit(
            OP,
            vec![c_out, t_out],
            out,
            Op::Conv1d { x: x.clone(), w: w.clone(), b: b.clone(), stride, pad },
        )
    }

    /// 2-D convolution of `x: [C_in, H, W]` with `w: [C_out, C_in, kh, kw]`.
    pub fn conv2d(
        &mut self,
        x: &Tensor,
        w: &Tensor,
        b: &Tensor,
        stride: (usize, usize),
        pad: (usize, usize),
    ) -> Result<Tensor, NumError> {
        const OP: &str = "conv2d";
        let (xs, ws, bs) = (x.shape(), w.shape(), b.shape());
        if xs.len() != 3 {
            return Err(NumError::shape(OP, format!("input must be [C_in, H, W], got {xs:?}")));
        }
        if ws.len() != 4 {
            return Err(NumError::shape(
                OP,
                format!("weight must be [C_out, C_in, kh, kw], got {ws:?}"),
            ));
        }
        let (c_in, h, wd_in) = (xs[0], xs[1], xs[2]);
        let (c_out, w_cin, kh, kw) = (ws[0], ws[1], ws[2], ws[3]);
        if w_cin != c_in {
            return Err(NumError::shape(
                OP,
                format!("weight in_channels {w_cin} != input channels {c_in}"),
            ));
        }
        if bs != [c_out] {
            return Err(NumError::shape(OP, format!("bias shape {bs:?} != [{c_out}]")));
        }
        if stride.0 < 1 || stride.1 < 1 {
            return Err(NumError::shape(OP, "strides must be >= 1".to_string()));
        }
        if kh > h + 2 * pad.0 {
            return Err(NumError::shape(
                OP,
                format!("kernel height {kh} exceeds padded height {}", h + 2 * pad.0),
            ));
        }
        if kw > wd_in + 2 * pad.1 {
            return Err(NumError::shape(
                OP,
                format!("kernel width {kw} exceeds padded width {}", wd_in + 2 * pad.1),
            ));
        }
        let h_out = (h + 2 * pad.0 - kh) / stride.0 + 1;
        let w_out = (wd_in + 2 * pad.1 - kw) / stride.1 + 1;

        let (hp, wp) = (h + 2 * pad.0, wd_in + 2 * pad.1);
        let xp = pad_planes(x.data(), c_in, h, wd_in, pad);
        let wdat = w.data();
        let bdat = b.data();
        let mut out = vec![0.0; c_out * h_out * w_out];
        for co in 0..c_out {
            let oplane = &mut out[co * h_out * w_out..(co + 1) * h_out * w_out];
            oplane.fill(bdat[co]);
            for ci in 0..c_in {
                let xplane = &xp[ci * hp * wp..(ci + 1) * hp * wp];
                for ki in 0..kh {
                    for kj in 0..kw {
                        let wv = wdat[((co * c_in + ci) * kh + ki) * kw + kj];
                        for oi in 0..h_out {
                            let xrow = &xplane[(oi * stride.0 + ki) * wp..];
                            let orow = &mut oplane[oi * w_out..(oi + 1) * w_out];
                            for (oj, o) in orow.iter_mut().enumerate() {
                                *o += wv * xrow[oj * stride.1 + kj];
                            }
                        }
                    }
                }
            }
        }
        self.emit(
            OP,
            vec![c_out, h_out, w_out],
            out,
            Op::Conv2d { x: x.clone(), w: w.clone(), b: b.clone(), stride, pad },
        )
    }

    /// Gated linear unit splitting the leading dimension in half:
    /// `out[c, ..] = x[c, ..] * sigmoid(x[C + c, ..])`.
    pub fn glu(&mut self, x: &Tensor) -> Result<Tensor, NumError> {
        const OP: &str = "glu";
        let xs = x.shape();
        if xs.is_empty() || xs[0] % 2 != 0 {
            return Err(NumError::shape(
                OP,
                format!("leading dimension must be even, got shape {xs:?}"),
            ));
        }
        let c = xs[0] / 2;
        let rest: usize = xs[1..].iter().product();
        let xd = x.data();
        let mut out = vec![0.0; c * rest];
        for i in 0..c * rest {
            out[i] = xd[i] * sigmoid(xd[c * rest + i]);
        }
        let mut shape = xs.to_vec();
        shape[0] = c;
        self.emit(OP, shape, out, Op::Glu { x: x.clone() })
    }

    /// Instance normalization over the time axis of `x: [C, T]` with learned
    /// per-channel affine parameters. Uses the population variance.
    pub fn instance_norm(
        &mut self,
        x: &Tensor,
        gamma: &Tensor,
        beta: &Tensor,
        eps: f64,
    ) -> Result<Tensor, NumError> {
        const OP: &str = "instance_norm";
        let xs = x.shape();
        if xs.len() != 2 {
            return Err(NumError::shape(OP, format!("input must be [C, T], got {xs:?}")));
        }
        let (c, t) = (xs[0], xs[1]);
        if t < 2 {
            return Err(NumError::shape(
                OP,
                format!("time axis must have >= 2 frames for a variance, got {t}"),
            ));
        }
        if gamma.shape() != [c] || beta.shape() != [c] {
            return Err(NumError::shape(
                OP,
                format!(
                    "gamma {:?} / beta {:?} must both be [{c}]",
                    gamma.shape(),
                    beta.shape()
                ),
            ));
        }
        if eps < 0.0 {
            return Err(NumError::shape(OP, "eps must be >= 0".to_string()));
        }
        let xd = x.data();
        let gd = gamma.data();
        let bd = beta.data();
        let mut out = vec![0.0; c * t];
        let mut means = vec![0.0; c];
        let mut inv_stds = vec![0.0; c];
        for ch in 0..c {
            let row = &xd[ch * t..(ch + 1) * t];
            let mean = row.iter().sum::<f64>() / t as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / t as f64;
            let inv_std = 1.0 / (var + eps).sqrt();
            means[ch] = mean;
            inv_stds[ch] = inv_std;
            let orow = &mut out[ch * t..(ch + 1) * t];
            for (o, &v) in orow.iter_mut().zip(row) {
                *o = (v - mean) * inv_std * gd[ch] + bd[ch];
            }
        }
        self.emit(
            OP,
            vec![c, t],
            out,
            Op::InstanceNorm {
                x: x.clone(),
                gamma: gamma.clone(),
                beta: beta.clone(),
                mean: means,
                inv_std: inv_stds,
            },
        )
    }

    /// Sub-pixel upsampling of `x: [(C*r), T]` into `[C, r*T]`:
    /// `out[c, r*t + j] = x[c*r + j, t]`. Pure rearrangement.
    pub fn pixel_shuffle_1d(&mut self, x: &Tensor, r: usize) -> Result<Tensor, NumError> {
        const OP: &str = "pixel_shuffle_1d";
        let xs = x.shape();
        if xs.len() != 2 {
            return Err(NumError::shape(OP, format!("input must be 2-D, got {xs:?}")));
        }
        if r == 0 {
            return Err(NumError::shape(OP, "upscale factor must be >= 1".to_string()));
        }
        let (cr, t) = (xs[0], xs[1]);
        if cr % r != 0 {
            return Err(NumError::shape(
                OP,
                format!("channel count {cr} not divisible by upscale factor {r}"),
            ));
        }
        let c = cr / r;
        let xd = x.data();
        let mut out = vec![0.0; cr * t];
        for ch in 0..c {
            for j in 0..r {
                let src = &xd[(ch * r + j) * t..(ch * r + j + 1) * t];
                for (ti, &v) in src.iter().enumerate() {
                    out[ch * (r * t) + r * ti + j] = v;
                }
            }
        }
        self.emit(OP, vec![c, r * t], out, Op::PixelShuffle1d { x: x.clone(), r })
    }

    /// Elementwise sum of two same-shape tensors.
    pub fn add(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor, NumError> {
        const OP: &str = "add";
        if a.shape() != b.shape() {
            return Err(NumError::shape(
                OP,
                format!("shape {:?} != {:?}", a.shape(), b.shape()),
            ));
        }
        let out = a.data().iter().zip(b.data()).map(|(x, y)| x + y).collect();
        self.emit(OP, a.shape().to_vec(), out, Op::Add { a: a.clone(), b: b.clone() })
    }

    /// Multiplies every element by the constant `c`.
    pub fn scale(&mut self, x: &Tensor, c: f64) -> Result<Tensor, NumError> {
        const OP: &str = "scale";
        if !c.is_finite() {
            return Err(NumError::NonFinite { op: OP });
        }
        let out = x.data().iter().map(|v| v * c).collect();
        self.emit(OP, x.shape().to_vec(), out, Op::Scale { x: x.clone(), c })
    }

    /// Sum of all elements, as a scalar.
    pub fn sum(&mut self, x: &Tensor) -> Result<Tensor, NumError> {
        let s = x.data().iter().sum();
        self.emit("sum", vec![], vec![s], Op::Sum { x: x.clone() })
    }

    /// Dot product with a constant coefficient vector, as a scalar.
    pub fn weighted_sum(&mut self, x: &Tensor, w: &[f64]) -> Result<Tensor, NumError> {
        const OP: &str = "weighted_sum";
        if w.len() != x.numel() {
            return Err(NumError::shape(
                OP,
                format!("{} weights for {} elements", w.len(), x.numel()),
            ));
        }
        let s = x.data().iter().zip(w).map(|(a, b)| a * b).sum();
        self.emit(OP, vec![], vec![s], Op::WeightedSum { x: x.clone(), w: w.to_vec() })
    }

    /// Reinterprets the data under a new shape with the same element count.
    pub fn reshape(&mut self, x: &Tensor, shape: &[usize]) -> Result<Tensor, NumError> {
        const OP: &str = "reshape";
        let numel: usize = shape.iter().product();
        if numel != x.numel() || shape.iter().any(|&d| d == 0) {
            return Err(NumError::shape(
                OP,
                format!("cannot reshape {:?} into {:?}", x.shape(), shape),
            ));
        }
        self.emit(OP, shape.to_vec(), x.data().to_vec(), Op::Reshape { x: x.clone() })
    }

    /// Mean absolute difference. The subgradient at exact ties is 0.
    pub fn l1_loss(&mut self, a: &Tensor, b: &Tensor) -> Result<Tensor, NumError> {
        const OP: &str = "l1_loss";
        if a.shape() != b.shape() {
            return Err(NumError::shape(
                OP,
                format!("shape {:?} != {:?}", a.shape(), b.shape()),
            ));
        }
        let n = a.numel() as f64;
        let s: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum();
        self.emit(OP, vec![], vec![s / n], Op::L1Loss { a: a.clone(), b: b.clone() })
    }

    /// Mean squared error against a same-shape target tensor.
    pub fn mse_loss(&mut self, pred: &Tensor, target: &Tensor) -> Result<Tensor, NumError> {
        const OP: &str = "mse_loss";
        if pred.shape() != target.shape() {
            return Err(NumError::shape(
                OP,
                format!("shape {:?} != {:?}", pred.shape(), target.shape()),
            ));
        }
        let n = pred.numel() as f64;
        let s: f64 = pred
            .data()
            .iter()
            .zip(target.data())
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        self.emit(
            OP,
            vec![],
            vec![s / n],
            Op::MseLoss { pred: pred.clone(), target: target.clone() },
        )
    }

    /// Mean squared error against a scalar broadcast target.
    pub fn mse_loss_scalar(&mut self, pred: &Tensor, target: f64) -> Result<Tensor, NumError> {
        const OP: &str = "mse_loss_scalar";
        if !target.is_finite() {
            return Err(NumError::NonFinite { op: OP });
        }
        let n = pred.numel() as f64;
        let s: f64 = pred.data().iter().map(|x| (x - target) * (x - target)).sum();
        self.emit(OP, vec![], vec![s / n], Op::MseLossScalar { pred: pred.clone(), target })
    }

    /// Reverse sweep from a scalar loss. Returns gradients for every watched
    /// leaf reachable from the loss; unreached watched leaves get zeros.
    pub fn backward(&self, loss: &Tensor) -> Result<Gradients, NumError> {
        if !loss.shape().is_empty() && loss.numel() != 1 {
            return Err(NumError::NonScalarLoss { shape: loss.shape().to_vec() });
        }
        let root = loss.node.ok_or(NumError::NotOnTape)?;
        if root >= self.nodes.len() {
            return Err(NumError::NotOnTape);
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        grads[root] = Some(vec![1.0; self.nodes[root].out_len]);

        for id in (0..=root).rev() {
            let Some(g) = grads[id].take() else { continue };
            self.backprop_node(id, &g, &mut grads);
            grads[id] = Some(g);
        }

        // Materialize zeros for watched-but-unreached leaves.
        for (id, node) in self.nodes.iter().enumerate() {
            if node.requires_grad && grads[id].is_none() {
                grads[id] = Some(vec![0.0; node.out_len]);
            }
        }
        Ok(Gradients { by_node: grads })
    }

    fn backprop_node(&self, id: NodeId, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
        match &self.nodes[id].op {
            Op::Leaf => {}
            Op::Conv1d { x, w, b, stride, pad } => {
                backward_conv1d(x, w, b, *stride, *pad, g, grads);
            }
            Op::Conv2d { x, w, b, stride, pad } => {
                backward_conv2d(x, w, b, *stride, *pad, g, grads);
            }
            Op::Glu { x } => {
                if let Some(xid) = x.node {
                    let c_rest = x.numel() / 2;
                    let xd = x.data();
                    accumulate(&mut grads[xid], x.numel(), |dx| {
                        for i in 0..c_rest {
                            let s = sigmoid(xd[c_rest + i]);
                            dx[i] += g[i] * s;
                            dx[c_rest + i] += g[i] * xd[i] * s * (1.0 - s);
                        }
                    });
                }
            }
            Op::InstanceNorm { x, gamma, beta, mean, inv_std } => {
                let (c, t) = (x.shape()[0], x.shape()[1]);
                let tf = t as f64;
                let xd = x.data();
                let gd = gamma.data();
                if let Some(xid) = x.node {
                    accumulate(&mut grads[xid], x.numel(), |dx| {
                        for ch in 0..c {
                            let row = &xd[ch * t..(ch + 1) * t];
                            let grow = &g[ch * t..(ch + 1) * t];
                            let istd = inv_std[ch];
                            let mut sum_g = 0.0;
                            let mut sum_gx = 0.0;
                            for (gi, &v) in grow.iter().zip(row) {
                                let xhat = (v - mean[ch]) * istd;
                                sum_g += gi;
                                sum_gx += gi * xhat;
                            }
                            let drow = &mut dx[ch * t..(ch + 1) * t];
                            for ((d, gi), &v) in drow.iter_mut().zip(grow).zip(row) {
                                let xhat = (v - mean[ch]) * istd;
                                *d += gd[ch] * istd * (gi - sum_g / tf - xhat * sum_gx / tf);
                            }
                        }
                    });
                }
                if let Some(gid) = gamma.node {
                    accumulate(&mut grads[gid], c, |dg| {
                        for ch in 0..c {
                            let row = &xd[ch * t..(ch + 1) * t];
                            let grow = &g[ch * t..(ch + 1) * t];
                            let istd = inv_std[ch];
                            dg[ch] += grow
                                .iter()
                                .zip(row)
                                .map(|(gi, &v)| gi * (v - mean[ch]) * istd)
                                .sum::<f64>();
                        }
                    });
                }
                if let Some(bid) = beta.node {
                    accumulate(&mut grads[bid], c, |db| {
                        for ch in 0..c {
                            db[ch] += g[ch * t..(ch + 1) * t].iter().sum::<f64>();
                        }
                    });
                }
            }
            Op::PixelShuffle1d { x, r } => {
                if let Some(xid) = x.node {
                    let (cr, t) = (x.shape()[0], x.shape()[1]);
                    let c = cr / r;
                    accumulate(&mut grads[xid], x.numel(), |dx| {
                        for ch in 0..c {
                            for j in 0..*r {
                                for ti in 0..t {
                                    dx[(ch * r + j) * t + ti] += g[ch * (r * t) + r * ti + j];
                                }
                            }
                        }
                    });
                }
            }
            Op::Add { a, b } => {
                for side in [a, b] {
                    if let Some(sid) = side.node {
                        accumulate(&mut grads[sid], side.numel(), |d| {
                            for (di, gi) in d.iter_mut().zip(g) {
                                *di += gi;
                            }
                        });
                    }
                }
            }
            Op::Scale { x, c } => {
                if let Some(xid) = x.node {
                    accumulate(&mut grads[xid], x.numel(), |d| {
                        for (di, gi) in d.iter_mut().zip(g) {
                            *di += gi * c;
                        }
                    });
                }
            }
            Op::Sum { x } => {
                if let Some(xid) = x.node {
                    accumulate(&mut grads[xid], x.numel(), |d| {
                        for di in d.iter_mut() {
                            *di += g[0];
                        }
                    });
                }
            }
            Op::WeightedSum { x, w } => {
                if let Some(xid) = x.node {
                    accumulate(&mut grads[xid], x.numel(), |d| {
                        for (di, wi) in d.iter_mut().zip(w) {
                            *di += g[0] * wi;
                        }
                    });
                }
            }
            Op::Reshape { x } => {
                if let Some(xid) = x.node {
                    accumulate(&mut grads[xid], x.numel(), |d| {
                        for (di, gi) in d.iter_mut().zip(g) {
                            *di += gi;
                        }
                    });
                }
            }
            Op::L1Loss { a, b } => {
                let n = a.numel() as f64;
                let (ad, bd) = (a.data(), b.data());
                if let Some(aid) = a.node {
                    accumulate(&mut grads[aid], a.numel(), |d| {
                        for i in 0..ad.len() {
                            d[i] += g[0] * sign0(ad[i] - bd[i]) / n;
                        }
                    });
                }
                if let Some(bid) = b.node {
                    accumulate(&mut grads[bid], b.numel(), |d| {
                        for i in 0..bd.len() {
                            d[i] -= g[0] * sign0(ad[i] - bd[i]) / n;
                        }
                    });
                }
            }
            Op::MseLoss { pred, target } => {
                let n = pred.numel() as f64;
                let (pd, td) = (pred.data(), target.data());
                if let Some(pid) = pred.node {
                    accumulate(&mut grads[pid], pred.numel(), |d| {
                        for i in 0..pd.len() {
                            d[i] += g[0] * 2.0 * (pd[i] - td[i]) / n;
                        }
                    });
                }
                if let Some(tid) = target.node {
                    accumulate(&mut grads[tid], target.numel(), |d| {
                        for i in 0..td.len() {
                            d[i] -= g[0] * 2.0 * (pd[i] - td[i]) / n;
                        }
                    });
                }
            }
            Op::MseLossScalar { pred, target } => {
                if let Some(pid) = pred.node {
                    let n = pred.numel() as f64;
                    let pd = pred.data();
                    accumulate(&mut grads[pid], pred.numel(), |d| {
                        for i in 0..pd.len() {
                            d[i] += g[0] * 2.0 * (pd[i] - target) / n;
                        }
                    });
                }
            }
        }
    }
}

#[inline]
fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn pad_rows(data: &[f64], c: usize, t: usize, pad: usize) -> Vec<f64> {
    if pad == 0 {
        return data.to_vec();
    }
    let tp = t + 2 * pad;
    let mut out = vec![0.0; c * tp];
    for ch in 0..c {
        out[ch * tp + pad..ch * tp + pad + t].copy_from_slice(&data[ch * t..(ch + 1) * t]);
    }
    out
}

fn pad_planes(data: &[f64], c: usize, h: usize, w: usize, pad: (usize, usize)) -> Vec<f64> {
    if pad == (0, 0) {
        return data.to_vec();
    }
    let (hp, wp) = (h + 2 * pad.0, w + 2 * pad.1);
    let mut out = vec![0.0; c * hp * wp];
    for ch in 0..c {
        for i in 0..h {
            let src = &data[(ch * h + i) * w..(ch * h + i + 1) * w];
            let dst_off = (ch * hp + i + pad.0) * wp + pad.1;
            out[dst_off..dst_off + w].copy_from_slice(src);
        }
    }
    out
}

fn backward_conv1d(
    x: &Tensor,
    w: &Tensor,
    b: &Tensor,
    stride: usize,
    pad: usize,
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let (c_in, t) = (x.shape()[0], x.shape()[1]);
    let (c_out, _, k) = (w.shape()[0], w.shape()[1], w.shape()[2]);
    let t_out = (t + 2 * pad - k) / stride + 1;
    let tp = t + 2 * pad;
    let need_x = x.node.is_some();
    let need_w = w.node.is_some();
    let xp = if need_w { pad_rows(x.data(), c_in, t, pad) } else { Vec::new() };
    let wd = w.data();

    if let Some(bid) = b.node {
        accumulate(&mut grads[bid], c_out, |db| {
            for co in 0..c_out {
                db[co] += g[co * t_out..(co + 1) * t_out].iter().sum::<f64>();
            }
        });
    }
    if let Some(wid) = w.node {
        accumulate(&mut grads[wid], w.numel(), |dw| {
            for co in 0..c_out {
                let grow = &g[co * t_out..(co + 1) * t_out];
                for ci in 0..c_in {
                    let xrow = &xp[ci * tp..(ci + 1) * tp];
                    let dwrow = &mut dw[(co * c_in + ci) * k..(co * c_in + ci + 1) * k];
                    for (j, dwj) in dwrow.iter_mut().enumerate() {
                        let mut acc = 0.0;
                        for (ti, &gv) in grow.iter().enumerate() {
                            acc += gv * xrow[ti * stride + j];
                        }
                        *dwj += acc;
                    }
                }
            }
        });
    }
    if need_x {
        let xid = x.node.unwrap();
        let mut dxp = vec![0.0; c_in * tp];
        for co in 0..c_out {
            let grow = &g[co * t_out..(co + 1) * t_out];
            for ci in 0..c_in {
                let dxrow = &mut dxp[ci * tp..(ci + 1) * tp];
                let wrow = &wd[(co * c_in + ci) * k..(co * c_in + ci + 1) * k];
                for (j, &wv) in wrow.iter().enumerate() {
                    for (ti, &gv) in grow.iter().enumerate() {
                        dxrow[ti * stride + j] += gv * wv;
                    }
                }
            }
        }
        accumulate(&mut grads[xid], x.numel(), |dx| {
            for ci in 0..c_in {
                for ti in 0..t {
                    dx[ci * t + ti] += dxp[ci * tp + ti + pad];
                }
            }
        });
    }
}

fn backward_conv2d(
    x: &Tensor,
    w: &Tensor,
    b: &Tensor,
    stride: (usize, usize),
    pad: (usize, usize),
    g: &[f64],
    grads: &mut [Option<Vec<f64>>],
) {
    let (c_in, h, wid) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let (c_out, _, kh, kw) = (w.shape()[0], w.shape()[1], w.shape()[2], w.shape()[3]);
    let h_out = (h + 2 * pad.0 - kh) / stride.0 + 1;
    let w_out = (wid + 2 * pad.1 - kw) / stride.1 + 1;
    let (hp, wp) = (h + 2 * pad.0, wid + 2 * pad.1);
    let need_x = x.node.is_some();
    let need_w = w.node.is_some();
    let xp = if need_w { pad_planes(x.data(), c_in, h, wid, pad) } else { Vec::new() };
    let wd = w.data();

    if let Some(bid) = b.node {
        accumulate(&mut grads[bid], c_out, |db| {
            for co in 0..c_out {
                db[co] += g[co * h_out * w_out..(co + 1) * h_out * w_out].iter().sum::<f64>();
            }
        });
    }
    if let Some(wid_node) = w.node {
        accumulate(&mut grads[wid_node], w.numel(), |dw| {
            for co in 0..c_out {
                let gplane = &g[co * h_out * w_out..(co + 1) * h_out * w_out];
                for ci in 0..c_in {
                    let xplane = &xp[ci * hp * wp..(ci + 1) * hp * wp];
                    for ki in 0..kh {
                        for kj in 0..kw {
                            let mut acc = 0.0;
                            for oi in 0..h_out {
                                let xrow = &xplane[(oi * stride.0 + ki) * wp + kj..];
                                let grow = &gplane[oi * w_out..(oi + 1) * w_out];
                                for (oj, &gv) in grow.iter().enumerate() {
                                    acc += gv * xrow[oj * stride.1];
                                }
                            }
                            dw[((co * c_in + ci) * kh + ki) * kw + kj] += acc;
                        }
                    }
                }
            }
        });
    }
    if need_x {
        let xid = x.node.unwrap();
        let mut dxp = vec![0.0; c_in * hp * wp];
        for co in 0..c_out {
            let gplane = &g[co * h_out * w_out..(co + 1) * h_out * w_out];
            for ci in 0..c_in {
                let dxplane = &mut dxp[ci * hp * wp..(ci + 1) * hp * wp];
                for ki in 0..kh {
                    for kj in 0..kw {
                        let wv = wd[((co * c_in + ci) * kh + ki) * kw + kj];
                        for oi in 0..h_out {
                            let base = (oi * stride.0 + ki) * wp + kj;
                            let grow = &gplane[oi * w_out..(oi + 1) * w_out];
                            for (oj, &gv) in grow.iter().enumerate() {
                                dxplane[base + oj * stride.1] += gv * wv;
                            }
                        }
                    }
                }
            }
        }
        accumulate(&mut grads[xid], x.numel(), |dx| {
            for ci in 0..c_in {
                for i in 0..h {
                    for j in 0..wid {
                        dx[(ci * h + i) * wid + j] += dxp[(ci * hp + i + pad.0) * wp + j + pad.1];
                    }
                }
            }
        });
    }
}
