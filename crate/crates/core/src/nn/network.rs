use super::layer::{Dense, Layer, Lifting};
use super::Tensor2;
use crate::error::{Error, Result};
use crate::lifting::KnotSequence;
use crate::loss::LossSpec;
use crate::rng::CounterRng;

/// Ordered stack of layers with a cache of the last forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input_width: usize,
    layers: Vec<Layer>,
    /// Input of every layer from the last cached forward pass.
    cache: Option<Vec<Tensor2>>,
}

impl Network {
    pub fn new(input_width: usize, layers: Vec<Layer>) -> Result<Self> {
        let mut width = input_width;
        for layer in &layers {
            width = layer.output_width(width)?;
        }
        Ok(Self { input_width, layers, cache: None })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.layers
            .iter()
            .try_fold(self.input_width, |w, l| l.output_width(w))
            .expect("widths validated at construction")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn check_input(&self, input: &Tensor2) -> Result<()> {
        if input.cols() != self.input_width {
            return Err(Error::Shape(format!(
                "network expects input width {}, got {}",
                self.input_width,
                input.cols()
            )));
        }
        if !input.is_finite() {
            return Err(Error::Shape("network input contains non-finite values".into()));
        }
        Ok(())
    }

    /// Forward pass that keeps every layer input for [`Network::backward`].
    pub fn forward(&mut self, input: &Tensor2) -> Result<Tensor2> {
        self.check_input(input)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut x = input.clone();
        for layer in &self.layers {
            let next = layer.forward(&x)?;
            inputs.push(x);
            x = next;
        }
        self.cache = Some(inputs);
        Ok(x)
    }

    /// Forward pass without caching; usable concurrently through `&self`.
    pub fn predict(&self, input: &Tensor2) -> Result<Tensor2> {
        self.check_input(input)?;
        let mut x = input.clone();
        for layer in &self.layers {
            x = layer.forward(&x)?;
        }
        Ok(x)
    }

    /// Back-propagates `grad_output` through the cached pass, storing parameter
    /// gradients in the layers and returning the gradient with respect to the input.
    pub fn backward(&mut self, grad_output: &Tensor2) -> Result<Tensor2> {
        let cache = self
            .cache
            .take()
            .ok_or_else(|| Error::State("backward called without a cached forward pass".into()))?;
        let mut grad = grad_output.clone();
        for (layer, input) in self.layers.iter_mut().zip(&cache).rev() {
            grad = layer.backward(input, &grad)?;
        }
        Ok(grad)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// All parameters, layer by layer: weights (row-major) then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            if let Layer::Dense(d) = layer {
                out.extend_from_slice(&d.weight);
                if let Some(b) = &d.bias {
                    out.extend_from_slice(b);
                }
            }
        }
        out
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::Dimension { expected: self.param_count(), found: values.len() });
        }
        let mut rest = values;
        self.for_each_param_mut(|p, _| {
            let (head, tail) = rest.split_at(p.len());
            p.copy_from_slice(head);
            rest = tail;
        });
        Ok(())
    }

    /// Gradients in the same order as [`Network::params`].
    pub fn grads(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            if let Layer::Dense(d) = layer {
                out.extend_from_slice(&d.grad_weight);
                if let Some(b) = &d.grad_bias {
                    out.extend_from_slice(b);
                }
            }
        }
        out
    }

    /// Visits `(parameters, gradients)` blocks in [`Network::params`] order.
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut [f64], &[f64])) {
        for layer in &mut self.layers {
            if let Layer::Dense(d) = layer {
                f(&mut d.weight, &d.grad_weight);
                if let (Some(b), Some(gb)) = (&mut d.bias, &d.grad_bias) {
                    f(b, gb);
                }
            }
        }
    }

    /// `<theta, lift(x)>`: one lifting layer followed by a bias-free linear map.
    pub fn lift_net_1d(knots: KnotSequence, rng: &mut CounterRng) -> Self {
        let l = knots.len();
        let layers = vec![Layer::Lifting(Lifting::standard(knots)), Layer::Dense(Dense::init_uniform(l, 1, false, rng))];
        Self::new(1, layers).expect("consistent widths")
    }

    /// `fc_1(relu(fc_hidden(x)))`.
    pub fn std_net_1d(hidden: usize, rng: &mut CounterRng) -> Self {
        let layers = vec![
            Layer::Dense(Dense::init_uniform(1, hidden, true, rng)),
            Layer::Relu,
            Layer::Dense(Dense::init_uniform(hidden, 1, true, rng)),
        ];
        Self::new(1, layers).expect("consistent widths")
    }

    /// `fc_1(relu(fc_hidden([lift(x_1), ..., lift(x_d)])))`.
    pub fn lift_net(inputs: usize, knots: KnotSequence, hidden: usize, rng: &mut CounterRng) -> Self {
        let lifted = inputs * knots.len();
        let layers = vec![
            Layer::Lifting(Lifting::standard(knots)),
            Layer::Dense(Dense::init_uniform(lifted, hidden, true, rng)),
            Layer::Relu,
            Layer::Dense(Dense::init_uniform(hidden, 1, true, rng)),
        ];
        Self::new(inputs, layers).expect("consistent widths")
    }

    /// `fc_1(relu(fc_hidden(fc_wide(x))))`.
    pub fn std_net(inputs: usize, wide: usize, hidden: usize, rng: &mut CounterRng) -> Self {
        let layers = vec![
            Layer::Dense(Dense::init_uniform(inputs, wide, true, rng)),
            Layer::Dense(Dense::init_uniform(wide, hidden, true, rng)),
            Layer::Relu,
            Layer::Dense(Dense::init_uniform(hidden, 1, true, rng)),
        ];
        Self::new(inputs, layers).expect("consistent widths")
    }
}

/// Mean per-entry loss over a batch and its gradient with respect to the output.
pub fn loss_and_grad(output: &Tensor2, target: &Tensor2, loss: &LossSpec) -> Result<(f64, Tensor2)> {
    if output.shape() != target.shape() {
        return Err(Error::Shape(format!(
            "output {:?} and target {:?} differ in shape",
            output.shape(),
            target.shape()
        )));
    }
    let n = output.as_slice().len().max(1) as f64;
    let mut value = 0.0;
    let mut grad = Vec::with_capacity(output.as_slice().len());
    for (&o, &t) in output.as_slice().iter().zip(target.as_slice()) {
        value += loss.value(o, t);
        grad.push(loss.derivative(o, t) / n);
    }
    Ok((value / n, Tensor2::from_vec(output.rows(), output.cols(), grad)?))
}

/// Mean per-entry loss of the network on a dataset, without caching.
pub fn evaluate_loss(net: &Network, input: &Tensor2, target: &Tensor2, loss: &LossSpec) -> Result<f64> {
    let output = net.predict(input)?;
    Ok(loss_and_grad(&output, target, loss)?.0)
}
