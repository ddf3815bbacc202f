//! Seeded synthetic experiments: sine regression, a 2-D surface fit and
//! robust regression with outliers.
//!
//! Every runner is a pure function of its [`ExperimentConfig`]. Reports can be
//! written to a directory as CSV metric series, a summary CSV, SVG charts,
//! network checkpoints and the resolved config; file names carry
//! [`ExperimentConfig::hash`].

mod config;
mod data;
mod fit1d;
mod fit2d;
pub mod plot;
mod robust;
mod series;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use data::{gen_2d_data, gen_outlier_data, gen_sine_data, robust_curve, surface, OutlierData, ROBUST_Y_RANGE};
pub use fit1d::{eval_rmse_1d, run_fit1d, Fit1dReport, EVAL_POINTS};
pub use fit2d::{eval_rmse_2d, run_fit2d, Fit2dReport, SPLINE_VERTICES};
pub use robust::{run_robust, DirectRun, RobustReport};
pub use series::{MetricRecord, MetricSeries};

use crate::error::Result;

/// A network snapshot taken during training.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: String,
    pub epoch: usize,
    /// Serialized network, see [`crate::nn::to_checkpoint`].
    pub text: String,
    /// Evaluation RMSE recorded at this epoch.
    pub rmse: f64,
}

/// `n` equally spaced points covering `[lo, hi]`, both ends included.
pub fn eval_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn rmse(errors: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = errors.into_iter().fold((0.0, 0usize), |(s, n), e| (s + e * e, n + 1));
    (sum / n.max(1) as f64).sqrt()
}

struct OutputWriter<'a> {
    dir: &'a Path,
    hash: String,
    written: Vec<PathBuf>,
}

impl<'a> OutputWriter<'a> {
    fn new(dir: &'a Path, cfg: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut w = Self { dir, hash: cfg.hash(), written: Vec::new() };
        w.file(&format!("{}-config", cfg.experiment), "txt", cfg.to_text().as_bytes())?;
        Ok(w)
    }

    fn file(&mut self, stem: &str, ext: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(format!("{stem}-{}.{ext}", self.hash));
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    fn series(&mut self, experiment: &str, s: &MetricSeries) -> Result<()> {
        let mut buf = Vec::new();
        s.write_csv(&mut buf)?;
        self.file(&format!("{experiment}-{}", s.name), "csv", &buf)
    }

    fn summary(&mut self, experiment: &str, rows: &[(String, f64)]) -> Result<()> {
        let mut text = String::from("metric,value\n");
        for (k, v) in rows {
            text.push_str(&format!("{k},{v}\n"));
        }
        self.file(&format!("{experiment}-summary"), "csv", text.as_bytes())
    }

    fn checkpoints(&mut self, experiment: &str, cps: &[Checkpoint]) -> Result<()> {
        for cp in cps {
            self.file(&format!("{experiment}-{}-epoch{}", cp.model, cp.epoch), "ckpt", cp.text.as_bytes())?;
        }
        Ok(())
    }

    fn rmse_chart(&mut self, experiment: &str, series: &[&MetricSeries]) -> Result<()> {
        let curves: Vec<plot::Curve<'_>> = series
            .iter()
            .map(|s| plot::Curve {
                label: &s.name,
                points: s.records().iter().map(|r| (r.epoch as f64, r.rmse)).collect(),
            })
            .collect();
        let svg = plot::line_chart(&format!("{experiment}: evaluation RMSE per epoch"), &curves, true);
        self.file(&format!("{experiment}-rmse"), "svg", svg.as_bytes())
    }
}
