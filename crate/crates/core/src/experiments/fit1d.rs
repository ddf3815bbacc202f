use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use super::{eval_grid, gen_sine_data, rmse, Checkpoint, ExperimentConfig, MetricSeries, OutputWriter};
use crate::error::Result;
use crate::lifting::KnotSequence;
use crate::loss::LossSpec;
use crate::nn::{evaluate_loss, to_checkpoint, train_epoch, Network, Sgd, Tensor2};
use crate::rng::CounterRng;
use crate::spline::{fit_spline_1d, fit_spline_1d_weight_decay, squared_objective, FitLoss, Spline1D};

/// Evaluation grid size on `[0, 2 pi]`.
pub const EVAL_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Fit1dReport {
    /// Objective column: mean squared error plus `(wd / 2) |params|^2`.
    pub lift: MetricSeries,
    pub std: MetricSeries,
    /// Minimizer of the regularized objective the Lift-Net is trained on.
    pub optimum: Spline1D,
    pub optimum_objective: f64,
    pub optimum_rmse: f64,
    /// Plain least-squares spline on the same knots.
    pub unregularized: Spline1D,
    pub unregularized_mse: f64,
    /// Final Lift-Net weights read as spline values at the knots.
    pub lift_theta: Vec<f64>,
    /// `(J(lift) - J*) / J*` at the last epoch.
    pub relative_gap: f64,
    /// `(mse(lift) - mse*) / mse*` against the unregularized fit.
    pub unregularized_gap: f64,
    pub checkpoints: Vec<Checkpoint>,
}

/// RMSE of `net` against `sin` on [`EVAL_POINTS`] points spanning `[0, 2 pi]`.
pub fn eval_rmse_1d(net: &Network) -> Result<f64> {
    let xs = eval_grid(0.0, TAU, EVAL_POINTS);
    let out = net.predict(&Tensor2::from_vec(xs.len(), 1, xs.clone())?)?;
    Ok(rmse(xs.iter().zip(out.as_slice()).map(|(x, y)| y - x.sin())))
}

fn regularized(net: &Network, x: &Tensor2, y: &Tensor2, wd: f64) -> Result<f64> {
    let mse = evaluate_loss(net, x, y, &LossSpec::squared())?;
    Ok(mse + 0.5 * wd * net.params().iter().map(|p| p * p).sum::<f64>())
}

fn train(
    name: &str,
    mut net: Network,
    cfg: &ExperimentConfig,
    x: &Tensor2,
    y: &Tensor2,
    shuffle: &mut CounterRng,
) -> Result<(Network, MetricSeries, Vec<Checkpoint>)> {
    let mut sgd = Sgd::new(cfg.learning_rate, cfg.momentum, cfg.weight_decay)?;
    let mut series = MetricSeries::new(name);
    let mut checkpoints = Vec::new();
    for epoch in 1..=cfg.epochs {
        train_epoch(&mut net, &mut sgd, x, y, cfg.batch_size, &LossSpec::squared(), shuffle)?;
        let objective = regularized(&net, x, y, cfg.weight_decay)?;
        let eval = eval_rmse_1d(&net)?;
        series.push(epoch, objective, eval)?;
        if cfg.checkpoint_epochs.contains(&epoch) {
            checkpoints.push(Checkpoint { model: name.into(), epoch, text: to_checkpoint(&net), rmse: eval });
        }
    }
    Ok((net, series, checkpoints))
}

/// Trains a Lift-Net `<theta, lift(x)>` on `cfg.knots` uniform knots and a
/// Std-Net `fc_1(relu(fc_hidden(x)))` on `cfg.samples` sine samples, and
/// solves the Lift-Net's convex problem in closed form for reference.
pub fn run_fit1d(cfg: &ExperimentConfig) -> Result<Fit1dReport> {
    cfg.validate()?;
    let data = gen_sine_data(cfg.samples, cfg.seed)?;
    let knots = KnotSequence::uniform(0.0, TAU, cfg.knots)?;
    let x = Tensor2::from_vec(data.len(), 1, data.iter().map(|d| d.0).collect())?;
    let y = Tensor2::from_vec(data.len(), 1, data.iter().map(|d| d.1).collect())?;

    let root = CounterRng::new(cfg.seed);
    let lift_net = Network::lift_net_1d(knots.clone(), &mut root.fork(10));
    let std_net = Network::std_net_1d(cfg.hidden, &mut root.fork(11));
    let (lift_net, lift, mut checkpoints) = train("lift-net", lift_net, cfg, &x, &y, &mut root.fork(12))?;
    let (_, std, std_checkpoints) = train("std-net", std_net, cfg, &x, &y, &mut root.fork(13))?;
    checkpoints.extend(std_checkpoints);

    let optimum = fit_spline_1d_weight_decay(&data, &knots, cfg.weight_decay)?;
    let optimum_objective = squared_objective(optimum.theta(), &data, &knots)? / data.len() as f64
        + 0.5 * cfg.weight_decay * optimum.theta().iter().map(|t| t * t).sum::<f64>();
    let grid = eval_grid(0.0, TAU, EVAL_POINTS);
    let optimum_rmse = rmse(grid.iter().map(|&x| optimum.evaluate(x).map(|v| v - x.sin()).unwrap_or(f64::NAN)));
    let unregularized = fit_spline_1d(&data, &knots, FitLoss::Squared)?;
    let unregularized_mse = squared_objective(unregularized.theta(), &data, &knots)? / data.len() as f64;

    let lift_theta = lift_net.params();
    let final_objective = lift.last().map(|r| r.objective).unwrap_or(f64::NAN);
    let lift_mse = squared_objective(&lift_theta, &data, &knots)? / data.len() as f64;
    Ok(Fit1dReport {
        relative_gap: (final_objective - optimum_objective) / optimum_objective,
        unregularized_gap: (lift_mse - unregularized_mse) / unregularized_mse,
        lift,
        std,
        optimum,
        optimum_objective,
        optimum_rmse,
        unregularized,
        unregularized_mse,
        lift_theta,
        checkpoints,
    })
}

impl Fit1dReport {
    pub fn summary(&self) -> Vec<(String, f64)> {
        let last = |s: &MetricSeries| s.last().copied();
        let (l, s) = (last(&self.lift), last(&self.std));
        vec![
            ("lift_final_objective".into(), l.map_or(f64::NAN, |r| r.objective)),
            ("lift_final_rmse".into(), l.map_or(f64::NAN, |r| r.rmse)),
            ("std_final_objective".into(), s.map_or(f64::NAN, |r| r.objective)),
            ("std_final_rmse".into(), s.map_or(f64::NAN, |r| r.rmse)),
            ("optimum_objective".into(), self.optimum_objective),
            ("optimum_rmse".into(), self.optimum_rmse),
            ("relative_gap".into(), self.relative_gap),
            ("unregularized_mse".into(), self.unregularized_mse),
            ("unregularized_gap".into(), self.unregularized_gap),
        ]
    }

    pub fn write_outputs(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut w = OutputWriter::new(dir, cfg)?;
        w.series("fit1d", &self.lift)?;
        w.series("fit1d", &self.std)?;
        w.summary("fit1d", &self.summary())?;
        w.checkpoints("fit1d", &self.checkpoints)?;
        w.rmse_chart("fit1d", &[&self.lift, &self.std])?;
        Ok(w.written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::from_checkpoint;

    #[test]
    fn short_run_is_deterministic_and_checkpointed() {
        let cfg = ExperimentConfig { epochs: 30, checkpoint_epochs: vec![1, 25, 75], ..ExperimentConfig::fit1d() };
        let a = run_fit1d(&cfg).unwrap();
        assert_eq!(a, run_fit1d(&cfg).unwrap());
        assert_eq!(a.lift.records().len(), 30);
        let epochs: Vec<(String, usize)> = a.checkpoints.iter().map(|c| (c.model.clone(), c.epoch)).collect();
        let expected = [("lift-net", 1), ("lift-net", 25), ("std-net", 1), ("std-net", 25)];
        assert_eq!(epochs, expected.map(|(m, e)| (m.to_string(), e)));
        for cp in &a.checkpoints {
            let net = from_checkpoint(&cp.text).unwrap();
            assert_eq!(eval_rmse_1d(&net).unwrap(), cp.rmse);
        }
    }
}
