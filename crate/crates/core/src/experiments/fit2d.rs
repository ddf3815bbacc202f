use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use super::{gen_2d_data, plot, rmse, Checkpoint, ExperimentConfig, MetricSeries, OutputWriter};
use crate::error::Result;
use crate::lifting::KnotSequence;
use crate::loss::LossSpec;
use crate::nn::{evaluate_loss, to_checkpoint, train_epoch, Network, Sgd, Tensor2};
use crate::rng::CounterRng;
use crate::simplex::{evaluate_spline_nd, fit_spline_nd, grid_triangulation};

/// Vertices per axis of the directly solved vector-valued lifting fits.
pub const SPLINE_VERTICES: [usize; 2] = [4, 11];

#[derive(Debug, Clone, PartialEq)]
pub struct Fit2dReport {
    pub lift: MetricSeries,
    pub std: MetricSeries,
    /// Width of the Lift-Net activations right after its lifting layer.
    pub lifted_width: usize,
    /// `(vertices per axis, training-grid RMSE)` for each [`SPLINE_VERTICES`] entry.
    pub spline_rmse: Vec<(usize, f64)>,
    pub checkpoints: Vec<Checkpoint>,
}

/// RMSE of `net` against the training targets.
pub fn eval_rmse_2d(net: &Network, x: &Tensor2, y: &Tensor2) -> Result<f64> {
    let out = net.predict(x)?;
    Ok(rmse(out.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a - b)))
}

/// Trains `fc_1(relu(fc_hidden([lift(x1), lift(x2)])))` and
/// `fc_1(relu(fc_hidden(fc_2L(x))))` on a `samples x samples` grid of
/// `cos(x2 sin x1)`, and solves the vector-valued lifting fits on uniform
/// Kuhn meshes with [`SPLINE_VERTICES`] vertices per axis.
pub fn run_fit2d(cfg: &ExperimentConfig) -> Result<Fit2dReport> {
    cfg.validate()?;
    let data = gen_2d_data(cfg.samples)?;
    let n = data.len();
    let x = Tensor2::from_vec(n, 2, data.iter().flat_map(|(p, _)| p.iter().copied()).collect())?;
    let y = Tensor2::from_vec(n, 1, data.iter().map(|d| d.1).collect())?;

    let knots = KnotSequence::uniform(0.0, TAU, cfg.knots)?;
    let root = CounterRng::new(cfg.seed);
    let lift_net = Network::lift_net(2, knots, cfg.hidden, &mut root.fork(20));
    let lifted_width = lift_net.layers()[0].output_width(2)?;
    let std_net = Network::std_net(2, 2 * cfg.knots, cfg.hidden, &mut root.fork(21));

    let mut checkpoints = Vec::new();
    let mut run = |name: &str, mut net: Network, mut shuffle: CounterRng| -> Result<MetricSeries> {
        let mut sgd = Sgd::new(cfg.learning_rate, cfg.momentum, cfg.weight_decay)?;
        let mut series = MetricSeries::new(name);
        for epoch in 1..=cfg.epochs {
            train_epoch(&mut net, &mut sgd, &x, &y, cfg.batch_size, &LossSpec::squared(), &mut shuffle)?;
            let objective = evaluate_loss(&net, &x, &y, &LossSpec::squared())?;
            let eval = eval_rmse_2d(&net, &x, &y)?;
            series.push(epoch, objective, eval)?;
            if cfg.checkpoint_epochs.contains(&epoch) {
                checkpoints.push(Checkpoint { model: name.into(), epoch, text: to_checkpoint(&net), rmse: eval });
            }
        }
        Ok(series)
    };
    let lift = run("lift-net", lift_net, root.fork(22))?;
    let std = run("std-net", std_net, root.fork(23))?;

    let vector_data: Vec<(Vec<f64>, Vec<f64>)> = data.iter().map(|(p, v)| (p.clone(), vec![*v])).collect();
    let mut spline_rmse = Vec::new();
    for m in SPLINE_VERTICES {
        let axis = KnotSequence::uniform(0.0, TAU, m)?;
        let tri = grid_triangulation(&[axis.clone(), axis])?;
        let theta = fit_spline_nd(&vector_data, &tri)?;
        let errors = data
            .iter()
            .map(|(p, v)| evaluate_spline_nd(&theta, &tri, p).map(|u| u[0] - v))
            .collect::<Result<Vec<f64>>>()?;
        spline_rmse.push((m, rmse(errors)));
    }
    Ok(Fit2dReport { lift, std, lifted_width, spline_rmse, checkpoints })
}

impl Fit2dReport {
    pub fn spline_rmse_for(&self, vertices: usize) -> Option<f64> {
        self.spline_rmse.iter().find(|(m, _)| *m == vertices).map(|&(_, r)| r)
    }

    pub fn summary(&self) -> Vec<(String, f64)> {
        let mut rows = vec![
            ("lift_final_rmse".to_string(), self.lift.last().map_or(f64::NAN, |r| r.rmse)),
            ("std_final_rmse".to_string(), self.std.last().map_or(f64::NAN, |r| r.rmse)),
            ("lifted_width".to_string(), self.lifted_width as f64),
        ];
        for &(m, r) in &self.spline_rmse {
            rows.push((format!("spline_{m}x{m}_rmse"), r));
        }
        rows
    }

    pub fn write_outputs(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut w = OutputWriter::new(dir, cfg)?;
        w.series("fit2d", &self.lift)?;
        w.series("fit2d", &self.std)?;
        w.summary("fit2d", &self.summary())?;
        w.checkpoints("fit2d", &self.checkpoints)?;
        w.rmse_chart("fit2d", &[&self.lift, &self.std])?;
        let (values, side) = surface_samples(64);
        w.file("fit2d-target", "svg", plot::heatmap("cos(x2 sin x1)", side, side, &values).as_bytes())?;
        Ok(w.written)
    }
}

fn surface_samples(side: usize) -> (Vec<f64>, usize) {
    let axis = super::eval_grid(0.0, TAU, side);
    let values = axis.iter().flat_map(|&x2| axis.iter().map(move |&x1| super::surface(x1, x2))).collect();
    (values, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_shapes() {
        let cfg = ExperimentConfig { epochs: 3, samples: 12, checkpoint_epochs: vec![2], ..ExperimentConfig::fit2d() };
        let r = run_fit2d(&cfg).unwrap();
        assert_eq!(r.lifted_width, 40);
        assert_eq!(r.lift.records().len(), 3);
        assert_eq!(r.checkpoints.len(), 2);
        assert_eq!(r.spline_rmse.len(), 2);
        assert_eq!(r, run_fit2d(&cfg).unwrap());
    }
}
