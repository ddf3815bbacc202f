use log::warn;

use super::Tensor2;
use crate::error::{Error, Result};
use crate::lifting::{KnotSequence, OutOfRange};
use crate::rng::CounterRng;

/// Fully connected layer `y = W x + b` with `W` stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    inputs: usize,
    outputs: usize,
    pub(crate) weight: Vec<f64>,
    pub(crate) bias: Option<Vec<f64>>,
    pub(crate) grad_weight: Vec<f64>,
    pub(crate) grad_bias: Option<Vec<f64>>,
}

impl Dense {
    /// Zero weights and (optionally) zero biases.
    pub fn zeros(inputs: usize, outputs: usize, with_bias: bool) -> Self {
        Self {
            inputs,
            outputs,
            weight: vec![0.0; inputs * outputs],
            bias: with_bias.then(|| vec![0.0; outputs]),
            grad_weight: vec![0.0; inputs * outputs],
            grad_bias: with_bias.then(|| vec![0.0; outputs]),
        }
    }

    /// Weights uniform on `[-1/sqrt(in), 1/sqrt(in)]`, zero biases.
    pub fn init_uniform(inputs: usize, outputs: usize, with_bias: bool, rng: &mut CounterRng) -> Self {
        let mut layer = Self::zeros(inputs, outputs, with_bias);
        let bound = 1.0 / (inputs as f64).sqrt();
        for w in &mut layer.weight {
            *w = rng.uniform_range(-bound, bound);
        }
        layer
    }

    /// Weights drawn from a zero-mean Gaussian with standard deviation `sigma`.
    pub fn init_gaussian(inputs: usize, outputs: usize, with_bias: bool, sigma: f64, rng: &mut CounterRng) -> Self {
        let mut layer = Self::zeros(inputs, outputs, with_bias);
        for w in &mut layer.weight {
            *w = sigma * rng.normal();
        }
        layer
    }

    pub fn from_parts(inputs: usize, outputs: usize, weight: Vec<f64>, bias: Option<Vec<f64>>) -> Result<Self> {
        if weight.len() != inputs * outputs {
            return Err(Error::Shape(format!(
                "dense weight has {} entries, expected {}x{}",
                weight.len(),
                outputs,
                inputs
            )));
        }
        if let Some(b) = &bias {
            if b.len() != outputs {
                return Err(Error::Shape(format!("dense bias has {} entries, expected {outputs}", b.len())));
            }
        }
        let mut layer = Self::zeros(inputs, outputs, bias.is_some());
        layer.weight = weight;
        layer.bias = bias;
        Ok(layer)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn bias(&self) -> Option<&[f64]> {
        self.bias.as_deref()
    }

    pub fn param_count(&self) -> usize {
        self.weight.len() + self.bias.as_ref().map_or(0, Vec::len)
    }

    fn forward(&self, x: &Tensor2) -> Tensor2 {
        let mut out = Tensor2::zeros(x.rows(), self.outputs);
        for r in 0..x.rows() {
            let row = x.row(r);
            for (o, dst) in out.row_mut(r).iter_mut().enumerate() {
                let w = &self.weight[o * self.inputs..(o + 1) * self.inputs];
                let b = self.bias.as_ref().map_or(0.0, |b| b[o]);
                *dst = w.iter().zip(row).map(|(a, v)| a * v).sum::<f64>() + b;
            }
        }
        out
    }

    fn backward(&mut self, x: &Tensor2, grad_out: &Tensor2) -> Tensor2 {
        self.grad_weight.iter_mut().for_each(|g| *g = 0.0);
        if let Some(gb) = &mut self.grad_bias {
            gb.iter_mut().for_each(|g| *g = 0.0);
        }
        let mut grad_in = Tensor2::zeros(x.rows(), self.inputs);
        for r in 0..x.rows() {
            let row = x.row(r);
            let go = grad_out.row(r);
            for (o, &g) in go.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                let span = o * self.inputs..(o + 1) * self.inputs;
                for (gw, v) in self.grad_weight[span.clone()].iter_mut().zip(row) {
                    *gw += g * v;
                }
                for (gi, w) in grad_in.row_mut(r).iter_mut().zip(&self.weight[span]) {
                    *gi += g * w;
                }
                if let Some(gb) = &mut self.grad_bias {
                    gb[o] += g;
                }
            }
        }
        grad_in
    }
}

/// How a lifting layer maps each input coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftingKind {
    /// Convex-combination coefficients; out-of-range inputs are clamped or rejected.
    Standard(OutOfRange),
    /// Knot-scaled coefficients with linear extension beyond the outer knots.
    /// The column of an exactly-zero knot is structurally zero and omitted.
    Scaled,
}

/// Coordinate-wise lifting; the lifted blocks of all coordinates are concatenated.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifting {
    knots: KnotSequence,
    kind: LiftingKind,
    /// Output column within a block for each knot, `None` for an omitted zero knot.
    columns: Vec<Option<usize>>,
}

impl Lifting {
    pub fn new(knots: KnotSequence, kind: LiftingKind) -> Self {
        let skip = match kind {
            LiftingKind::Scaled => knots.zero_index(),
            LiftingKind::Standard(_) => None,
        };
        let mut next = 0;
        let columns = (0..knots.len())
            .map(|l| {
                if Some(l) == skip {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect();
        Self { knots, kind, columns }
    }

    /// Standard lifting that clamps out-of-range inputs.
    pub fn standard(knots: KnotSequence) -> Self {
        Self::new(knots, LiftingKind::Standard(OutOfRange::Clamp))
    }

    pub fn scaled(knots: KnotSequence) -> Self {
        Self::new(knots, LiftingKind::Scaled)
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub fn kind(&self) -> LiftingKind {
        self.kind
    }

    /// Output width per input coordinate.
    pub fn block_width(&self) -> usize {
        self.columns.iter().flatten().count()
    }

    fn forward(&self, x: &Tensor2) -> Result<Tensor2> {
        let width = self.block_width();
        let t = self.knots.as_slice();
        let mut out = Tensor2::zeros(x.rows(), x.cols() * width);
        let mut clamped = 0usize;
        for r in 0..x.rows() {
            for (i, &v) in x.row(r).iter().enumerate() {
                let (v, scale) = match self.kind {
                    LiftingKind::Standard(policy) => {
                        if !self.knots.contains(v) {
                            clamped += 1;
                        }
                        (self.knots.admit(v, policy)?, false)
                    }
                    LiftingKind::Scaled => {
                        if v.is_nan() {
                            return Err(Error::Domain { value: v, lower: t[0], upper: t[t.len() - 1] });
                        }
                        (v, true)
                    }
                };
                let (l, lower, upper) = self.knots.weights(v);
                let (a, b) = if scale { (lower * t[l], upper * t[l + 1]) } else { (lower, upper) };
                let block = &mut out.row_mut(r)[i * width..(i + 1) * width];
                if let Some(c) = self.columns[l] {
                    block[c] = a;
                }
                if let Some(c) = self.columns[l + 1] {
                    block[c] = b;
                }
            }
        }
        if clamped > 0 {
            warn!("lifting layer clamped {clamped} inputs outside [{}, {}]", t[0], t[t.len() - 1]);
        }
        Ok(out)
    }

    fn backward(&self, x: &Tensor2, grad_out: &Tensor2) -> Tensor2 {
        let width = self.block_width();
        let t = self.knots.as_slice();
        let mut grad_in = Tensor2::zeros(x.rows(), x.cols());
        for r in 0..x.rows() {
            for (i, &v) in x.row(r).iter().enumerate() {
                let scaled = match self.kind {
                    LiftingKind::Standard(_) if !self.knots.contains(v) => continue,
                    LiftingKind::Standard(_) => false,
                    LiftingKind::Scaled => true,
                };
                let v = if scaled { v } else { v.clamp(t[0], t[t.len() - 1]) };
                let l = self.knots.interval(v);
                let width_l = t[l + 1] - t[l];
                let (da, db) = if scaled { (-t[l] / width_l, t[l + 1] / width_l) } else { (-1.0 / width_l, 1.0 / width_l) };
                let block = &grad_out.row(r)[i * width..(i + 1) * width];
                let ga = self.columns[l].map_or(0.0, |c| block[c]);
                let gb = self.columns[l + 1].map_or(0.0, |c| block[c]);
                grad_in[(r, i)] = ga * da + gb * db;
            }
        }
        grad_in
    }
}

/// One stage of a [`super::Network`].
#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Dense(Dense),
    Relu,
    /// Maximum over groups of `group` consecutive columns.
    Maxout { group: usize },
    Lifting(Lifting),
}

impl Layer {
    pub fn output_width(&self, input_width: usize) -> Result<usize> {
        match self {
            Layer::Dense(d) if d.inputs != input_width => Err(Error::Shape(format!(
                "dense layer expects width {}, got {input_width}",
                d.inputs
            ))),
            Layer::Dense(d) => Ok(d.outputs),
            Layer::Relu => Ok(input_width),
            Layer::Maxout { group } if *group == 0 || !input_width.is_multiple_of(*group) => Err(Error::Shape(format!(
                "maxout group {group} does not divide width {input_width}"
            ))),
            Layer::Maxout { group } => Ok(input_width / group),
            Layer::Lifting(l) => Ok(input_width * l.block_width()),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Layer::Dense(d) => d.param_count(),
            _ => 0,
        }
    }

    pub(crate) fn forward(&self, x: &Tensor2) -> Result<Tensor2> {
        match self {
            Layer::Dense(d) => Ok(d.forward(x)),
            Layer::Relu => {
                let data = x.as_slice().iter().map(|v| v.max(0.0)).collect();
                Tensor2::from_vec(x.rows(), x.cols(), data)
            }
            Layer::Maxout { group } => maxout_forward(x, *group),
            Layer::Lifting(l) => l.forward(x),
        }
    }

    pub(crate) fn backward(&mut self, x: &Tensor2, grad_out: &Tensor2) -> Result<Tensor2> {
        match self {
            Layer::Dense(d) => Ok(d.backward(x, grad_out)),
            Layer::Relu => {
                let data = x
                    .as_slice()
                    .iter()
                    .zip(grad_out.as_slice())
                    .map(|(&v, &g)| if v > 0.0 { g } else { 0.0 })
                    .collect();
                Tensor2::from_vec(x.rows(), x.cols(), data)
            }
            Layer::Maxout { group } => maxout_backward(x, grad_out, *group),
            Layer::Lifting(l) => Ok(l.backward(x, grad_out)),
        }
    }
}

fn argmax_groups(row: &[f64], group: usize) -> impl Iterator<Item = usize> + '_ {
    row.chunks(group).enumerate().map(move |(g, chunk)| {
        let mut best = 0;
        for (j, &v) in chunk.iter().enumerate().skip(1) {
            if v > chunk[best] {
                best = j;
            }
        }
        g * group + best
    })
}

/// Maximum of each group of `group` consecutive columns.
pub fn maxout_forward(pre_activations: &Tensor2, group: usize) -> Result<Tensor2> {
    if group == 0 || !pre_activations.cols().is_multiple_of(group) {
        return Err(Error::Shape(format!(
            "maxout group {group} does not divide width {}",
            pre_activations.cols()
        )));
    }
    let width = pre_activations.cols() / group;
    let mut out = Tensor2::zeros(pre_activations.rows(), width);
    for r in 0..pre_activations.rows() {
        let row = pre_activations.row(r);
        for (o, idx) in argmax_groups(row, group).enumerate() {
            out[(r, o)] = row[idx];
        }
    }
    Ok(out)
}

/// Routes each output gradient to the (lowest-index) argmax of its group.
pub fn maxout_backward(pre_activations: &Tensor2, grad_out: &Tensor2, group: usize) -> Result<Tensor2> {
    if group == 0 || !pre_activations.cols().is_multiple_of(group) || grad_out.cols() * group != pre_activations.cols() {
        return Err(Error::Shape(format!(
            "maxout gradient of width {} does not match input width {} with group {group}",
            grad_out.cols(),
            pre_activations.cols()
        )));
    }
    let mut grad_in = Tensor2::zeros(pre_activations.rows(), pre_activations.cols());
    for r in 0..pre_activations.rows() {
        let idx: Vec<usize> = argmax_groups(pre_activations.row(r), group).collect();
        for (o, i) in idx.into_iter().enumerate() {
            grad_in[(r, i)] = grad_out[(r, o)];
        }
    }
    Ok(grad_in)
}
