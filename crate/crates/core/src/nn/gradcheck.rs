//! Central-difference verification of back-propagated parameter gradients.

use super::layer::{Layer, LiftingKind};
use super::network::{evaluate_loss, loss_and_grad, Network};
use super::Tensor2;
use crate::error::{Error, Result};
use crate::loss::{LossKind, LossSpec};
use crate::rng::CounterRng;

/// Minimum distance of every pre-activation from a kink or knot.
pub const KINK_MARGIN: f64 = 1e-3;

/// Number of input perturbations tried before giving up.
pub const MAX_RETRIES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Largest `|analytic - numeric| / max(1, |analytic|, |numeric|)`.
    pub max_relative_error: f64,
    pub parameters_checked: usize,
    /// Input perturbations needed to stay clear of kinks.
    pub retries: usize,
    /// The input the check ran on.
    pub input: Tensor2,
}

/// Compares analytic parameter gradients of the mean loss to central
/// differences with step `h`.
///
/// Inputs whose pre-activations sit within [`KINK_MARGIN`] of a ReLU kink, a
/// maxout tie, a lifting knot or a loss kink are jittered (seeded) up to
/// [`MAX_RETRIES`] times.
pub fn gradient_check(
    net: &mut Network,
    input: &Tensor2,
    target: &Tensor2,
    loss: &LossSpec,
    h: f64,
) -> Result<GradCheckReport> {
    let mut rng = CounterRng::new(0x6772_6164_6368_6563);
    let mut x = input.clone();
    let mut retries = 0;
    while near_kink(net, &x, target, loss)? {
        if retries == MAX_RETRIES {
            return Err(Error::RetryExhausted { attempts: MAX_RETRIES });
        }
        retries += 1;
        for v in x.as_mut_slice() {
            *v += rng.uniform_range(-0.05, 0.05);
        }
    }

    let out = net.forward(&x)?;
    let (_, grad_out) = loss_and_grad(&out, target, loss)?;
    net.backward(&grad_out)?;
    let analytic = net.grads();

    let base = net.params();
    let mut params = base.clone();
    let mut worst = 0.0f64;
    for i in 0..params.len() {
        params[i] = base[i] + h;
        net.set_params(&params)?;
        let plus = evaluate_loss(net, &x, target, loss)?;
        params[i] = base[i] - h;
        net.set_params(&params)?;
        let minus = evaluate_loss(net, &x, target, loss)?;
        params[i] = base[i];
        let numeric = (plus - minus) / (2.0 * h);
        let scale = analytic[i].abs().max(numeric.abs()).max(1.0);
        worst = worst.max((analytic[i] - numeric).abs() / scale);
    }
    net.set_params(&base)?;
    Ok(GradCheckReport { max_relative_error: worst, parameters_checked: base.len(), retries, input: x })
}

fn near_kink(net: &Network, input: &Tensor2, target: &Tensor2, loss: &LossSpec) -> Result<bool> {
    let mut x = input.clone();
    for layer in net.layers() {
        let flagged = match layer {
            Layer::Dense(_) => false,
            Layer::Relu => x.as_slice().iter().any(|v| v.abs() < KINK_MARGIN),
            Layer::Maxout { group } => (0..x.rows()).any(|r| {
                x.row(r).chunks(*group).any(|chunk| {
                    let mut sorted = chunk.to_vec();
                    sorted.sort_by(|a, b| b.total_cmp(a));
                    sorted.len() > 1 && sorted[0] - sorted[1] < KINK_MARGIN
                })
            }),
            Layer::Lifting(l) => {
                let t = l.knots().as_slice();
                let (lo, hi) = (t[0], t[t.len() - 1]);
                x.as_slice().iter().any(|&v| {
                    let inside = match l.kind() {
                        LiftingKind::Standard(_) => v > lo - KINK_MARGIN && v < hi + KINK_MARGIN,
                        LiftingKind::Scaled => true,
                    };
                    inside && t.iter().any(|k| (v - k).abs() < KINK_MARGIN)
                })
            }
        };
        if flagged {
            return Ok(true);
        }
        x = layer.forward(&x)?;
    }
    let kinks: &[f64] = match loss.kind() {
        LossKind::Squared => &[],
        LossKind::Absolute => &[0.0],
        LossKind::TruncatedLinear => &[0.0, loss.truncation()],
    };
    Ok(x.as_slice()
        .iter()
        .zip(target.as_slice())
        .any(|(o, t)| kinks.iter().any(|k| ((o - t).abs() - k).abs() < KINK_MARGIN)))
}
