use std::path::{Path, PathBuf};

use super::{
    eval_grid, gen_outlier_data, plot, rmse, ExperimentConfig, MetricSeries, OutlierData, OutputWriter,
    ROBUST_Y_RANGE,
};
use crate::error::Result;
use crate::lifting::KnotSequence;
use crate::loss::LossSpec;
use crate::nn::{evaluate_loss, train_epoch, Dense, Layer, Lifting, Network, Sgd, Tensor2};
use crate::output_lifting::{build_cost_matrix, lifted_predict, solve_closed_form, AssignmentMatrix, CostMatrix};
use crate::rng::CounterRng;
use crate::spline::{fit_spline_1d, FitLoss, Spline1D};

const EVAL_POINTS: usize = 1000;

/// One gradient-descent fit of a linear spline under the truncated loss.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectRun {
    /// Objective column: mean truncated linear loss.
    pub series: MetricSeries,
    pub objective: f64,
    pub rmse: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustReport {
    pub data: OutlierData,
    pub cost: CostMatrix,
    pub assignment: AssignmentMatrix,
    /// Mean truncated loss of the lifted solution, `<c, theta> / n`.
    pub lifted_objective: f64,
    pub lifted_rmse: f64,
    pub absolute: Spline1D,
    pub absolute_rmse: f64,
    pub direct: Vec<DirectRun>,
}

fn curve_rmse(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let errors = eval_grid(0.0, 1.0, EVAL_POINTS)
        .into_iter()
        .map(|x| Ok(f(x)? - super::robust_curve(x)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(rmse(errors))
}

/// Robust regression on [`gen_outlier_data`]:
///
/// (a) the output-lifted truncated-linear problem, solved in closed form on
///     `cfg.knots` input and `cfg.output_knots` output knots;
/// (b) the least-absolute-deviation spline on the input knots;
/// (c) `cfg.restarts` momentum gradient-descent fits of a linear spline on
///     the truncated loss from `N(0, init_sigma^2)` initial weights.
///
/// Each is scored by RMSE to the ground-truth curve on a clean grid.
pub fn run_robust(cfg: &ExperimentConfig) -> Result<RobustReport> {
    cfg.validate()?;
    let data = gen_outlier_data(cfg.samples, cfg.outlier_fraction, cfg.noise, cfg.seed)?;
    let knots_x = KnotSequence::uniform(0.0, 1.0, cfg.knots)?;
    let knots_y = KnotSequence::uniform(ROBUST_Y_RANGE.0, ROBUST_Y_RANGE.1, cfg.output_knots)?;
    let loss = LossSpec::truncated_linear(cfg.truncation)?;
    let n = data.samples.len() as f64;

    let cost = build_cost_matrix(&data.samples, &knots_x, &knots_y, &loss)?;
    let assignment = solve_closed_form(&cost);
    let lifted_objective = cost.objective(&assignment) / n;
    let lifted_rmse = curve_rmse(|x| lifted_predict(&assignment, &knots_x, &knots_y, x))?;

    let absolute = fit_spline_1d(&data.samples, &knots_x, FitLoss::Absolute)?;
    let absolute_rmse = curve_rmse(|x| absolute.evaluate(x))?;

    let x = Tensor2::from_vec(data.samples.len(), 1, data.samples.iter().map(|d| d.0).collect())?;
    let y = Tensor2::from_vec(data.samples.len(), 1, data.samples.iter().map(|d| d.1).collect())?;
    let root = CounterRng::new(cfg.seed);
    let direct = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.restarts as u64)
            .map(|k| {
                let (x, y, knots_x, loss) = (&x, &y, &knots_x, &loss);
                let (mut init, mut shuffle) = (root.fork(100 + k), root.fork(200 + k));
                scope.spawn(move || direct_run(k as usize, cfg, x, y, knots_x, loss, &mut init, &mut shuffle))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("direct run panicked")).collect::<Result<Vec<_>>>()
    })?;

    Ok(RobustReport { data, cost, assignment, lifted_objective, lifted_rmse, absolute, absolute_rmse, direct })
}

#[allow(clippy::too_many_arguments)]
fn direct_run(
    k: usize,
    cfg: &ExperimentConfig,
    x: &Tensor2,
    y: &Tensor2,
    knots: &KnotSequence,
    loss: &LossSpec,
    init: &mut CounterRng,
    shuffle: &mut CounterRng,
) -> Result<DirectRun> {
    let dense = Dense::init_gaussian(knots.len(), 1, false, cfg.init_sigma, init);
    let mut net = Network::new(1, vec![Layer::Lifting(Lifting::standard(knots.clone())), Layer::Dense(dense)])?;
    let mut sgd = Sgd::new(cfg.learning_rate, cfg.momentum, cfg.weight_decay)?;
    let mut series = MetricSeries::new(format!("direct-{k}"));
    let grid = eval_grid(0.0, 1.0, EVAL_POINTS);
    let grid = Tensor2::from_vec(grid.len(), 1, grid)?;
    let score = |net: &Network| -> Result<f64> {
        let out = net.predict(&grid)?;
        Ok(rmse(grid.as_slice().iter().zip(out.as_slice()).map(|(&x, &u)| u - super::robust_curve(x))))
    };
    for epoch in 1..=cfg.epochs {
        train_epoch(&mut net, &mut sgd, x, y, cfg.batch_size, loss, shuffle)?;
        series.push(epoch, evaluate_loss(&net, x, y, loss)?, score(&net)?)?;
    }
    let last = *series.last().expect("at least one epoch");
    Ok(DirectRun { objective: last.objective, rmse: last.rmse, theta: net.params(), series })
}

impl RobustReport {
    /// Largest difference between the final objectives of the direct runs.
    pub fn direct_objective_spread(&self) -> f64 {
        let it = self.direct.iter().map(|r| r.objective);
        let max = it.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = it.fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn summary(&self) -> Vec<(String, f64)> {
        let mut rows = vec![
            ("outliers".to_string(), self.data.outlier_count() as f64),
            ("lifted_objective".to_string(), self.lifted_objective),
            ("lifted_rmse".to_string(), self.lifted_rmse),
            ("absolute_rmse".to_string(), self.absolute_rmse),
        ];
        for (k, r) in self.direct.iter().enumerate() {
            rows.push((format!("direct_{k}_objective"), r.objective));
            rows.push((format!("direct_{k}_rmse"), r.rmse));
        }
        rows.push(("direct_objective_spread".to_string(), self.direct_objective_spread()));
        rows
    }

    pub fn write_outputs(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut w = OutputWriter::new(dir, cfg)?;
        for r in &self.direct {
            w.series("robust", &r.series)?;
        }
        w.summary("robust", &self.summary())?;
        let mut buf = Vec::new();
        self.cost.write_csv(&mut buf)?;
        w.file("robust-cost", "csv", &buf)?;
        buf.clear();
        self.assignment.write_csv(&mut buf)?;
        w.file("robust-assignment", "csv", &buf)?;
        let m = self.cost.matrix();
        w.file("robust-cost", "svg", plot::heatmap("cost matrix", m.rows(), m.cols(), m.as_slice()).as_bytes())?;

        let grid = eval_grid(0.0, 1.0, 200);
        let kx = self.cost.knots_x();
        let ky = self.cost.knots_y();
        let mut curves = vec![
            plot::Curve { label: "ground truth", points: grid.iter().map(|&x| (x, super::robust_curve(x))).collect() },
            plot::Curve {
                label: "lifted",
                points: grid.iter().map(|&x| (x, lifted_predict(&self.assignment, kx, ky, x).unwrap_or(f64::NAN))).collect(),
            },
            plot::Curve {
                label: "absolute loss",
                points: grid.iter().map(|&x| (x, self.absolute.evaluate(x).unwrap_or(f64::NAN))).collect(),
            },
        ];
        for r in &self.direct {
            let s = Spline1D::new(kx.clone(), r.theta.clone())?;
            curves.push(plot::Curve {
                label: &r.series.name,
                points: grid.iter().map(|&x| (x, s.evaluate(x).unwrap_or(f64::NAN))).collect(),
            });
        }
        w.file("robust-fits", "svg", plot::line_chart("robust regression fits", &curves, false).as_bytes())?;
        w.rmse_chart("robust", &self.direct.iter().map(|r| &r.series).collect::<Vec<_>>())?;
        Ok(w.written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run() {
        let cfg = ExperimentConfig { samples: 60, epochs: 20, restarts: 2, ..ExperimentConfig::robust() };
        let r = run_robust(&cfg).unwrap();
        assert_eq!(r.direct.len(), 2);
        assert_eq!(r.data.outlier_count(), 24);
        assert_eq!(r.cost.matrix().shape(), (50, 20));
        assert_eq!(r, run_robust(&cfg).unwrap());
    }
}
