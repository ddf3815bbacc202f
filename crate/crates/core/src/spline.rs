//! Linear splines `x -> <theta, lift(x)>` and their convex fitting problems.
//!
//! With fixed knots the spline is linear in `theta`, so least-squares and
//! least-absolute-deviation fits are convex.

use crate::error::{Error, Result};
use crate::lifting::{KnotSequence, OutOfRange};
use crate::linalg::{solve, Matrix};

/// Ridge added to the normal equations; keeps knots without data solvable.
pub const FIT_RIDGE: f64 = 1e-10;

const IRLS_EPS: f64 = 1e-8;
const IRLS_MAX_ITERS: usize = 200;
const IRLS_RTOL: f64 = 1e-10;

/// Continuous piecewise linear function with value `theta[l]` at knot `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline1D {
    knots: KnotSequence,
    theta: Vec<f64>,
}

impl Spline1D {
    pub fn new(knots: KnotSequence, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != knots.len() {
            return Err(Error::Dimension { expected: knots.len(), found: theta.len() });
        }
        Ok(Self { knots, theta })
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        evaluate_spline(self, x, OutOfRange::Error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitLoss {
    Squared,
    Absolute,
}

/// `<theta, lift(x)>`.
pub fn evaluate_spline(s: &Spline1D, x: f64, policy: OutOfRange) -> Result<f64> {
    let x = s.knots.admit(x, policy)?;
    let (l, lower, upper) = s.knots.weights(x);
    Ok(lower * s.theta[l] + upper * s.theta[l + 1])
}

/// Sparse lifted design: `(interval, w_l, w_{l+1})` per sample.
fn design(data: &[(f64, f64)], knots: &KnotSequence) -> Result<Vec<(usize, f64, f64)>> {
    data.iter()
        .map(|&(x, _)| {
            let x = knots.admit(x, OutOfRange::Error)?;
            Ok(knots.weights(x))
        })
        .collect()
}

/// `sum_i (<theta, lift(x_i)> - y_i)^2`.
pub fn squared_objective(theta: &[f64], data: &[(f64, f64)], knots: &KnotSequence) -> Result<f64> {
    Ok(residuals(theta, data, knots)?.iter().map(|r| r * r).sum())
}

/// `sum_i |<theta, lift(x_i)> - y_i|`.
pub fn absolute_objective(theta: &[f64], data: &[(f64, f64)], knots: &KnotSequence) -> Result<f64> {
    Ok(residuals(theta, data, knots)?.iter().map(|r| r.abs()).sum())
}

fn residuals(theta: &[f64], data: &[(f64, f64)], knots: &KnotSequence) -> Result<Vec<f64>> {
    if theta.len() != knots.len() {
        return Err(Error::Dimension { expected: knots.len(), found: theta.len() });
    }
    let rows = design(data, knots)?;
    Ok(rows
        .iter()
        .zip(data)
        .map(|(&(l, a, b), &(_, y))| a * theta[l] + b * theta[l + 1] - y)
        .collect())
}

/// Weighted normal equations `(Z^T W Z + ridge I) theta = Z^T W y`.
fn weighted_least_squares(
    rows: &[(usize, f64, f64)],
    targets: &[f64],
    weights: &[f64],
    size: usize,
    ridge: f64,
) -> Result<Vec<f64>> {
    let mut gram = Matrix::zeros(size, size);
    let mut rhs = Matrix::zeros(size, 1);
    for ((&(l, a, b), &y), &w) in rows.iter().zip(targets).zip(weights) {
        gram[(l, l)] += w * a * a;
        gram[(l, l + 1)] += w * a * b;
        gram[(l + 1, l)] += w * a * b;
        gram[(l + 1, l + 1)] += w * b * b;
        rhs[(l, 0)] += w * a * y;
        rhs[(l + 1, 0)] += w * b * y;
    }
    for k in 0..size {
        gram[(k, k)] += ridge;
    }
    Ok(solve(&gram, &rhs)?.into_vec())
}

/// Best linear spline on `knots` under the chosen loss.
///
/// Squared loss solves the normal equations directly. Absolute loss runs
/// iteratively reweighted least squares with weights `1 / sqrt(r^2 + eps^2)`
/// and returns the iterate with the lowest absolute objective.
pub fn fit_spline_1d(data: &[(f64, f64)], knots: &KnotSequence, loss: FitLoss) -> Result<Spline1D> {
    let rows = design(data, knots)?;
    let targets: Vec<f64> = data.iter().map(|&(_, y)| y).collect();
    let ones = vec![1.0; data.len()];
    let mut theta = weighted_least_squares(&rows, &targets, &ones, knots.len(), FIT_RIDGE)?;
    if loss == FitLoss::Squared {
        return Spline1D::new(knots.clone(), theta);
    }

    let objective = |theta: &[f64]| -> f64 {
        rows.iter()
            .zip(&targets)
            .map(|(&(l, a, b), y)| (a * theta[l] + b * theta[l + 1] - y).abs())
            .sum()
    };
    let mut best = theta.clone();
    let mut best_value = objective(&theta);
    let mut previous = best_value;
    for _ in 0..IRLS_MAX_ITERS {
        let weights: Vec<f64> = rows
            .iter()
            .zip(&targets)
            .map(|(&(l, a, b), y)| {
                let r = a * theta[l] + b * theta[l + 1] - y;
                1.0 / (r * r + IRLS_EPS * IRLS_EPS).sqrt()
            })
            .collect();
        theta = weighted_least_squares(&rows, &targets, &weights, knots.len(), FIT_RIDGE)?;
        let value = objective(&theta);
        if value < best_value {
            best_value = value;
            best.clone_from(&theta);
        }
        if (previous - value).abs() <= IRLS_RTOL * previous.max(f64::MIN_POSITIVE) {
            break;
        }
        previous = value;
    }
    Spline1D::new(knots.clone(), best)
}

/// Minimizer of `mean_i r_i^2 + (weight_decay / 2) |theta|^2`, the objective
/// that SGD with L2 weight decay drives a one-layer lifting
/// network towards.
pub fn fit_spline_1d_weight_decay(
    data: &[(f64, f64)],
    knots: &KnotSequence,
    weight_decay: f64,
) -> Result<Spline1D> {
    if data.is_empty() {
        return Err(Error::Config("cannot fit a spline to an empty dataset".into()));
    }
    let rows = design(data, knots)?;
    let targets: Vec<f64> = data.iter().map(|&(_, y)| y).collect();
    // (2/N) Z^T Z + wd I = (2/N) Z^T y  <=>  (Z^T Z + wd N / 2 I) theta = Z^T y
    let ones = vec![1.0; data.len()];
    let ridge = weight_decay * data.len() as f64 / 2.0;
    let theta = weighted_least_squares(&rows, &targets, &ones, knots.len(), ridge.max(FIT_RIDGE))?;
    Spline1D::new(knots.clone(), theta)
}

/// Exact interpolant: knots at the sorted abscissae, values at the ordinates.
pub fn interpolate_exact(data: &[(f64, f64)]) -> Result<Spline1D> {
    if data.len() < 2 {
        return Err(Error::Config(format!("need at least 2 points, got {}", data.len())));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateAbscissa(w[0].0));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = sorted.into_iter().unzip();
    Spline1D::new(KnotSequence::new(xs)?, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn knots(v: &[f64]) -> KnotSequence {
        KnotSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let s = Spline1D::new(knots(&[0.0, 1.0, 2.0]), vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(s.evaluate(0.5).unwrap(), 1.0);
        for (i, &t) in s.knots().as_slice().iter().enumerate() {
            assert_eq!(s.evaluate(t).unwrap(), s.theta()[i]);
        }
        assert!(matches!(s.evaluate(2.5), Err(Error::Domain { .. })));
        assert_eq!(evaluate_spline(&s, 2.5, OutOfRange::Clamp).unwrap(), 0.0);

        let k = knots(&[-1.0, 0.2, 0.5, 3.0]);
        let f = |x: f64| 1.5 * x - 0.25;
        let s = Spline1D::new(k.clone(), k.as_slice().iter().map(|&t| f(t)).collect()).unwrap();
        for i in 0..=100 {
            let x = -1.0 + 4.0 * i as f64 / 100.0;
            assert!((s.evaluate(x).unwrap() - f(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn squared_fit_interpolates_consistent_data() {
        let data = [(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)];
        let s = fit_spline_1d(&data, &knots(&[0.0, 1.0, 2.0]), FitLoss::Squared).unwrap();
        for (a, b) in s.theta().iter().zip([0.0, 2.0, 0.0]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn squared_fit_gradient_vanishes() {
        let mut rng = CounterRng::new(4);
        let data: Vec<(f64, f64)> = (0..80)
            .map(|_| {
                let x = rng.uniform_range(0.0, 3.0);
                (x, x.cos() + 0.1 * rng.normal())
            })
            .collect();
        let k = KnotSequence::uniform(0.0, 3.0, 9).unwrap();
        let s = fit_spline_1d(&data, &k, FitLoss::Squared).unwrap();
        let r = residuals(s.theta(), &data, &k).unwrap();
        let mut grad = vec![0.0; k.len()];
        for ((l, a, b), r) in design(&data, &k).unwrap().into_iter().zip(r) {
            grad[l] += 2.0 * a * r;
            grad[l + 1] += 2.0 * b * r;
        }
        let y_norm = data.iter().map(|d| d.1 * d.1).sum::<f64>().sqrt();
        let g_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(g_norm <= 1e-8 * (1.0 + y_norm), "{g_norm}");
    }

    #[test]
    fn absolute_fit_resists_outlier() {
        let k = KnotSequence::uniform(0.0, 1.0, 5).unwrap();
        let mut data: Vec<(f64, f64)> = (0..41).map(|i| (i as f64 / 40.0, 0.0)).collect();
        // one extreme outlier sitting on knot 2 (x = 0.5)
        data[20].1 = 100.0;
        let sq = fit_spline_1d(&data, &k, FitLoss::Squared).unwrap();
        let abs = fit_spline_1d(&data, &k, FitLoss::Absolute).unwrap();
        assert!(abs.theta()[2].abs() < sq.theta()[2].abs());
        assert!(abs.theta()[2].abs() < 1e-6);
        let best = absolute_objective(abs.theta(), &data, &k).unwrap();
        assert!(best <= absolute_objective(sq.theta(), &data, &k).unwrap());
    }

    #[test]
    fn weight_decay_fit_is_stationary() {
        let mut rng = CounterRng::new(9);
        let data: Vec<(f64, f64)> = (0..30)
            .map(|_| {
                let x = rng.uniform_range(0.0, 1.0);
                (x, (3.0 * x).sin())
            })
            .collect();
        let k = KnotSequence::uniform(0.0, 1.0, 6).unwrap();
        let wd = 1e-2;
        let s = fit_spline_1d_weight_decay(&data, &k, wd).unwrap();
        let n = data.len() as f64;
        let mut grad: Vec<f64> = s.theta().iter().map(|t| wd * t).collect();
        let r = residuals(s.theta(), &data, &k).unwrap();
        for ((l, a, b), r) in design(&data, &k).unwrap().into_iter().zip(r) {
            grad[l] += 2.0 * a * r / n;
            grad[l + 1] += 2.0 * b * r / n;
        }
        assert!(grad.iter().all(|g| g.abs() < 1e-12), "{grad:?}");
    }

    #[test]
    fn exact_interpolation() {
        let s = interpolate_exact(&[(1.0, 5.0), (0.0, 3.0)]).unwrap();
        assert_eq!(s.knots().as_slice(), &[0.0, 1.0]);
        assert_eq!(s.theta(), &[3.0, 5.0]);
        assert_eq!(s.evaluate(0.5).unwrap(), 4.0);
        assert_eq!(interpolate_exact(&[(1.0, 5.0), (1.0, 3.0)]), Err(Error::DuplicateAbscissa(1.0)));
        assert!(interpolate_exact(&[(1.0, 5.0)]).is_err());
    }

    #[test]
    fn domain_errors_on_fit() {
        let k = knots(&[0.0, 1.0]);
        assert!(matches!(fit_spline_1d(&[(2.0, 0.0)], &k, FitLoss::Squared), Err(Error::Domain { .. })));
    }
}
