use super::network::{loss_and_grad, Network};
use super::Tensor2;
use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::rng::CounterRng;

/// SGD with heavy-ball momentum and L2 weight decay:
/// `v <- mu v + (g + wd p)`, `p <- p - lr v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sgd {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    velocity: Vec<f64>,
}

impl Sgd {
    pub fn new(learning_rate: f64, momentum: f64, weight_decay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::Config(format!("momentum must lie in [0, 1), got {momentum}")));
        }
        if learning_rate.is_nan() || learning_rate <= 0.0 || weight_decay.is_nan() || weight_decay < 0.0 {
            return Err(Error::Config(format!(
                "learning rate must be positive and weight decay nonnegative, got {learning_rate} and {weight_decay}"
            )));
        }
        Ok(Self { learning_rate, momentum, weight_decay, velocity: Vec::new() })
    }

    pub fn step(&mut self, net: &mut Network) {
        if self.velocity.len() != net.param_count() {
            self.velocity = vec![0.0; net.param_count()];
        }
        let (lr, mu, wd) = (self.learning_rate, self.momentum, self.weight_decay);
        let mut offset = 0;
        let velocity = &mut self.velocity;
        net.for_each_param_mut(|params, grads| {
            let v = &mut velocity[offset..offset + params.len()];
            for ((p, &g), v) in params.iter_mut().zip(grads).zip(v.iter_mut()) {
                *v = mu * *v + g + wd * *p;
                *p -= lr * *v;
            }
            offset += params.len();
        });
    }
}

/// Rows of `source` at `indices`.
pub fn gather_rows(source: &Tensor2, indices: &[usize]) -> Tensor2 {
    let mut out = Tensor2::zeros(indices.len(), source.cols());
    for (dst, &i) in indices.iter().enumerate() {
        out.row_mut(dst).copy_from_slice(source.row(i));
    }
    out
}

/// One pass over the data in shuffled mini-batches. Returns the mean batch loss.
pub fn train_epoch(
    net: &mut Network,
    optimizer: &mut Sgd,
    inputs: &Tensor2,
    targets: &Tensor2,
    batch_size: usize,
    loss: &LossSpec,
    rng: &mut CounterRng,
) -> Result<f64> {
    if inputs.rows() != targets.rows() {
        return Err(Error::Shape(format!("{} inputs but {} targets", inputs.rows(), targets.rows())));
    }
    if batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    let mut order: Vec<usize> = (0..inputs.rows()).collect();
    rng.shuffle(&mut order);
    let mut total = 0.0;
    let mut batches = 0;
    for chunk in order.chunks(batch_size) {
        let x = gather_rows(inputs, chunk);
        let y = gather_rows(targets, chunk);
        let out = net.forward(&x)?;
        let (value, grad) = loss_and_grad(&out, &y, loss)?;
        net.backward(&grad)?;
        optimizer.step(net);
        total += value;
        batches += 1;
    }
    Ok(total / batches.max(1) as f64)
}
