use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Hyperparameters and data settings for one experiment run.
///
/// The constructors [`ExperimentConfig::fit1d`], [`ExperimentConfig::fit2d`]
/// and [`ExperimentConfig::robust`] give the documented defaults. The text
/// form written by [`ExperimentConfig::to_text`] is the run's sidecar and
/// parses back with [`ExperimentConfig::from_text`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Architecture tag, e.g. `lift-vs-std`.
    pub arch: String,
    /// Input knots per coordinate.
    pub knots: usize,
    /// Output knots (robust regression only).
    pub output_knots: usize,
    pub hidden: usize,
    /// Training samples; for `fit2d` the grid size per axis.
    pub samples: usize,
    pub outlier_fraction: f64,
    pub truncation: f64,
    pub noise: f64,
    pub init_sigma: f64,
    /// Independent restarts of the direct non-convex fit.
    pub restarts: usize,
    pub checkpoint_epochs: Vec<usize>,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    fn base(experiment: &str) -> Self {
        Self {
            experiment: experiment.into(),
            seed: 0,
            epochs: 2000,
            batch_size: 128,
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 1e-4,
            arch: "lift-vs-std".into(),
            knots: 20,
            output_knots: 0,
            hidden: 9,
            samples: 50,
            outlier_fraction: 0.0,
            truncation: 0.0,
            noise: 0.0,
            init_sigma: 0.0,
            restarts: 0,
            checkpoint_epochs: vec![25, 75, 200, 2000],
            output_dir: None,
        }
    }

    /// Sine regression from 50 samples.
    pub fn fit1d() -> Self {
        Self::base("fit1d")
    }

    /// `cos(x2 sin x1)` on a 50 x 50 grid.
    pub fn fit2d() -> Self {
        Self { epochs: 200, hidden: 20, samples: 50, checkpoint_epochs: vec![25, 75, 200], ..Self::base("fit2d") }
    }

    /// Robust regression with 40% outliers.
    pub fn robust() -> Self {
        Self {
            arch: "lifted-vs-direct".into(),
            epochs: 2000,
            batch_size: 400,
            weight_decay: 0.0,
            samples: 400,
            knots: 20,
            output_knots: 50,
            hidden: 0,
            outlier_fraction: 0.4,
            truncation: 0.1,
            noise: 0.02,
            init_sigma: 0.1,
            restarts: 4,
            checkpoint_epochs: Vec::new(),
            ..Self::base("robust")
        }
    }

    pub fn for_experiment(name: &str) -> Result<Self> {
        match name {
            "fit1d" => Ok(Self::fit1d()),
            "fit2d" => Ok(Self::fit2d()),
            "robust" => Ok(Self::robust()),
            other => Err(Error::Config(format!("unknown experiment {other:?}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return fail(format!("momentum must lie in [0, 1), got {}", self.momentum));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return fail(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(self.weight_decay >= 0.0) {
            return fail(format!("weight decay must be nonnegative, got {}", self.weight_decay));
        }
        if self.knots < 2 {
            return fail(format!("need at least 2 knots, got {}", self.knots));
        }
        if self.samples < 2 {
            return fail(format!("need at least 2 samples, got {}", self.samples));
        }
        if !(0.0..1.0).contains(&self.outlier_fraction) {
            return fail(format!("outlier fraction must lie in [0, 1), got {}", self.outlier_fraction));
        }
        if !(self.noise >= 0.0) {
            return fail(format!("noise must be nonnegative, got {}", self.noise));
        }
        if self.experiment == "robust" {
            if self.output_knots < 2 {
                return fail(format!("need at least 2 output knots, got {}", self.output_knots));
            }
            if !(self.truncation > 0.0) {
                return fail(format!("truncation must be positive, got {}", self.truncation));
            }
            if self.restarts == 0 {
                return fail("need at least one restart".into());
            }
        } else if self.hidden == 0 {
            return fail("hidden width must be at least 1".into());
        }
        Ok(())
    }

    /// `key = value` lines in a fixed order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let ckpt: Vec<String> = self.checkpoint_epochs.iter().map(usize::to_string).collect();
        let dir = self.output_dir.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "epochs = {}", self.epochs);
        let _ = writeln!(s, "batch_size = {}", self.batch_size);
        let _ = writeln!(s, "learning_rate = {}", self.learning_rate);
        let _ = writeln!(s, "momentum = {}", self.momentum);
        let _ = writeln!(s, "weight_decay = {}", self.weight_decay);
        let _ = writeln!(s, "arch = {}", self.arch);
        let _ = writeln!(s, "knots = {}", self.knots);
        let _ = writeln!(s, "output_knots = {}", self.output_knots);
        let _ = writeln!(s, "hidden = {}", self.hidden);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "outlier_fraction = {}", self.outlier_fraction);
        let _ = writeln!(s, "truncation = {}", self.truncation);
        let _ = writeln!(s, "noise = {}", self.noise);
        let _ = writeln!(s, "init_sigma = {}", self.init_sigma);
        let _ = writeln!(s, "restarts = {}", self.restarts);
        let _ = writeln!(s, "checkpoint_epochs = {}", ckpt.join(","));
        let _ = writeln!(s, "output_dir = {dir}");
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut experiment = None;
        let mut fields = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(Error::Parse { line: i + 1, message: "expected `key = value`".into() })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "experiment" {
                experiment = Some(value.to_string());
            } else {
                fields.push((i + 1, key, value));
            }
        }
        let experiment = experiment.ok_or(Error::Parse { line: 1, message: "missing `experiment`".into() })?;
        let mut cfg = Self::for_experiment(&experiment)?;
        for (line, key, value) in fields {
            match key {
                "seed" => cfg.seed = parse(line, value)?,
                "epochs" => cfg.epochs = parse(line, value)?,
                "batch_size" => cfg.batch_size = parse(line, value)?,
                "learning_rate" => cfg.learning_rate = parse(line, value)?,
                "momentum" => cfg.momentum = parse(line, value)?,
                "weight_decay" => cfg.weight_decay = parse(line, value)?,
                "arch" => cfg.arch = value.to_string(),
                "knots" => cfg.knots = parse(line, value)?,
                "output_knots" => cfg.output_knots = parse(line, value)?,
                "hidden" => cfg.hidden = parse(line, value)?,
                "samples" => cfg.samples = parse(line, value)?,
                "outlier_fraction" => cfg.outlier_fraction = parse(line, value)?,
                "truncation" => cfg.truncation = parse(line, value)?,
                "noise" => cfg.noise = parse(line, value)?,
                "init_sigma" => cfg.init_sigma = parse(line, value)?,
                "restarts" => cfg.restarts = parse(line, value)?,
                "checkpoint_epochs" => {
                    cfg.checkpoint_epochs = if value.is_empty() {
                        Vec::new()
                    } else {
                        value.split(',').map(|v| parse(line, v.trim())).collect::<Result<_>>()?
                    }
                }
                "output_dir" => cfg.output_dir = (!value.is_empty()).then(|| PathBuf::from(value)),
                other => return Err(Error::Parse { line, message: format!("unknown key {other:?}") }),
            }
        }
        Ok(cfg)
    }

    /// First 12 hex digits of the SHA-256 of the sidecar text, ignoring the
    /// output directory.
    pub fn hash(&self) -> String {
        let text = Self { output_dir: None, ..self.clone() }.to_text();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }
}

fn parse<T: FromStr>(line: usize, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Error::Parse { line, message: format!("{value:?}: {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for cfg in [ExperimentConfig::fit1d(), ExperimentConfig::fit2d(), ExperimentConfig::robust()] {
            cfg.validate().unwrap();
        }
        let cfg = ExperimentConfig::fit1d();
        assert_eq!((cfg.learning_rate, cfg.momentum, cfg.batch_size, cfg.weight_decay), (0.1, 0.9, 128, 1e-4));
    }

    #[test]
    fn invalid_settings_rejected() {
        let bad = [
            ExperimentConfig { epochs: 0, ..ExperimentConfig::fit1d() },
            ExperimentConfig { batch_size: 0, ..ExperimentConfig::fit1d() },
            ExperimentConfig { momentum: 1.0, ..ExperimentConfig::fit1d() },
            ExperimentConfig { momentum: -0.1, ..ExperimentConfig::fit1d() },
            ExperimentConfig { outlier_fraction: 1.0, ..ExperimentConfig::robust() },
            ExperimentConfig { truncation: 0.0, ..ExperimentConfig::robust() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn text_round_trip() {
        let cfg = ExperimentConfig {
            seed: 17,
            learning_rate: 0.05,
            checkpoint_epochs: vec![1, 4000],
            output_dir: Some("runs/a".into()),
            ..ExperimentConfig::robust()
        };
        assert_eq!(ExperimentConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        let empty = ExperimentConfig { checkpoint_epochs: vec![], ..ExperimentConfig::fit1d() };
        assert_eq!(ExperimentConfig::from_text(&empty.to_text()).unwrap(), empty);
        assert!(ExperimentConfig::from_text("experiment = fit1d\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_text("seed = 1\n").is_err());
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = ExperimentConfig::fit1d();
        let b = ExperimentConfig { output_dir: Some("elsewhere".into()), ..a.clone() };
        let c = ExperimentConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 12);
    }
}
