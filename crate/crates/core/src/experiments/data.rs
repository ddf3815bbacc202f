use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::rng::CounterRng;

const SINE_STREAM: u64 = 1;
const OUTLIER_STREAM: u64 = 2;

/// `n` samples with `x` uniform on `[0, 2 pi)` and `y = sin x`.
pub fn gen_sine_data(n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 samples, got {n}")));
    }
    let mut rng = CounterRng::new(seed).fork(SINE_STREAM);
    Ok((0..n)
        .map(|_| {
            let x = rng.uniform_range(0.0, TAU);
            (x, x.sin())
        })
        .collect())
}

/// The 2-D target `cos(x2 sin x1)`.
pub fn surface(x1: f64, x2: f64) -> f64 {
    (x2 * x1.sin()).cos()
}

/// `grid_n x grid_n` uniform grid on `[0, 2 pi]^2` (first coordinate fastest)
/// labelled with [`surface`].
pub fn gen_2d_data(grid_n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if grid_n < 2 {
        return Err(Error::Config(format!("need at least 2 grid points per axis, got {grid_n}")));
    }
    let axis: Vec<f64> = (0..grid_n).map(|i| TAU * i as f64 / (grid_n - 1) as f64).collect();
    let mut out = Vec::with_capacity(grid_n * grid_n);
    for &x2 in &axis {
        for &x1 in &axis {
            out.push((vec![x1, x2], surface(x1, x2)));
        }
    }
    Ok(out)
}

/// Ground truth of the robust regression problem on `[0, 1]`.
pub fn robust_curve(x: f64) -> f64 {
    0.3 + 0.15 * (2.0 * PI * x).sin()
}

/// Output range shared by the outliers and the output knots.
pub const ROBUST_Y_RANGE: (f64, f64) = (0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierData {
    pub samples: Vec<(f64, f64)>,
    /// `true` where the sample was replaced by an outlier.
    pub outlier_mask: Vec<bool>,
}

impl OutlierData {
    pub fn outlier_count(&self) -> usize {
        self.outlier_mask.iter().filter(|&&o| o).count()
    }

    pub fn ground_truth(&self, x: f64) -> f64 {
        robust_curve(x)
    }
}

/// `n` samples of [`robust_curve`] at uniform `x` in `[0, 1)`, perturbed by
/// Gaussian noise of standard deviation `noise`. Exactly
/// `floor(fraction * n)` samples, chosen uniformly, have their `y` replaced by
/// a uniform draw from [`ROBUST_Y_RANGE`].
pub fn gen_outlier_data(n: usize, fraction: f64, noise: f64, seed: u64) -> Result<OutlierData> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!("outlier fraction must lie in [0, 1), got {fraction}")));
    }
    if !(noise >= 0.0) {
        return Err(Error::Config(format!("noise must be nonnegative, got {noise}")));
    }
    let mut rng = CounterRng::new(seed).fork(OUTLIER_STREAM);
    let mut samples: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.uniform();
            let eps = if noise > 0.0 { noise * rng.normal() } else { 0.0 };
            (x, robust_curve(x) + eps)
        })
        .collect();
    let count = (fraction * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut outlier_mask = vec![false; n];
    for &i in &order[..count] {
        outlier_mask[i] = true;
        samples[i].1 = rng.uniform_range(ROBUST_Y_RANGE.0, ROBUST_Y_RANGE.1);
    }
    Ok(OutlierData { samples, outlier_mask })
}
