//! Convexification of a non-convex regression loss by lifting the output.
//!
//! Predictions are represented as distributions over output knots `t_y`: a
//! column-stochastic matrix `theta` (size `L_y x L_x`) maps the lifted input
//! `lift_x(x)` to a point of the unit simplex in `R^{L_y}`. Evaluating the loss
//! at the output knots makes the objective linear in `theta`,
//!
//! ```text
//! sum_i sum_{p,q} theta[p][q] lift_x(x_i)[q] L_{y_i}(t_y[p]) = sum_{p,q} c[p][q] theta[p][q],
//! ```
//!
//! and because the constraints only couple entries of the same column, the
//! minimum puts all mass of column `q` on the row with the smallest cost.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::lifting::{inverse_lift_coeffs, KnotSequence, OutOfRange};
use crate::linalg::Matrix;
use crate::rng::CounterRng;

pub use crate::loss::{LossKind, LossSpec};

/// Column sums must be within this distance of one.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// Number of random feasible matrices [`brute_force_solve`] checks against.
pub const RANDOM_FEASIBLE_SAMPLES: usize = 1000;

/// Accumulated assignment costs `c[p][q]` for output knot `p`, input knot `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    c: Matrix,
    knots_x: KnotSequence,
    knots_y: KnotSequence,
}

impl CostMatrix {
    pub fn new(c: Matrix, knots_x: KnotSequence, knots_y: KnotSequence) -> Result<Self> {
        if c.shape() != (knots_y.len(), knots_x.len()) {
            return Err(Error::Shape(format!(
                "cost matrix is {}x{}, knots need {}x{}",
                c.rows(),
                c.cols(),
                knots_y.len(),
                knots_x.len()
            )));
        }
        if !c.is_finite() {
            return Err(Error::Shape("cost matrix has non-finite entries".into()));
        }
        Ok(Self { c, knots_x, knots_y })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.c
    }

    pub fn knots_x(&self) -> &KnotSequence {
        &self.knots_x
    }

    pub fn knots_y(&self) -> &KnotSequence {
        &self.knots_y
    }

    /// `sum_{p,q} c[p][q] theta[p][q]`.
    pub fn objective(&self, theta: &AssignmentMatrix) -> f64 {
        self.c.as_slice().iter().zip(theta.theta.as_slice()).map(|(c, t)| c * t).sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.c, out)
    }
}

/// Column-stochastic `L_y x L_x` matrix (when feasible).
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMatrix {
    theta: Matrix,
}

impl AssignmentMatrix {
    pub fn new(theta: Matrix) -> Self {
        Self { theta }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.theta
    }

    /// Selected output knot per column, if every column is one-hot.
    pub fn selected_rows(&self) -> Option<Vec<usize>> {
        (0..self.theta.cols())
            .map(|q| {
                let col = self.theta.column(q);
                let ones: Vec<usize> = (0..col.len()).filter(|&p| col[p] == 1.0).collect();
                let zeros = col.iter().filter(|&&v| v == 0.0).count();
                (ones.len() == 1 && zeros + 1 == col.len()).then(|| ones[0])
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.theta, out)
    }
}

/// `c[p][q] = sum_i lift_x(x_i)[q] * L_{y_i}(t_y[p])`, accumulated in data order.
pub fn build_cost_matrix(
    data: &[(f64, f64)],
    knots_x: &KnotSequence,
    knots_y: &KnotSequence,
    loss: &LossSpec,
) -> Result<CostMatrix> {
    let ty = knots_y.as_slice();
    let mut c = Matrix::zeros(knots_y.len(), knots_x.len());
    for &(x, y) in data {
        let x = knots_x.admit(x, OutOfRange::Error)?;
        let (q, lower, upper) = knots_x.weights(x);
        for (p, &t) in ty.iter().enumerate() {
            let value = loss.value(t, y);
            c[(p, q)] += lower * value;
            c[(p, q + 1)] += upper * value;
        }
    }
    CostMatrix::new(c, knots_x.clone(), knots_y.clone())
}

/// Per column, all mass on the lowest row index attaining the column minimum.
pub fn solve_closed_form(c: &CostMatrix) -> AssignmentMatrix {
    let m = &c.c;
    let mut theta = Matrix::zeros(m.rows(), m.cols());
    for q in 0..m.cols() {
        let mut best = 0;
        for p in 1..m.rows() {
            if m[(p, q)] < m[(best, q)] {
                best = p;
            }
        }
        theta[(best, q)] = 1.0;
    }
    AssignmentMatrix::new(theta)
}

/// Independent reference solver.
///
/// Tries every one-hot choice of every column, scoring each candidate with
/// the full objective, and keeps strict improvements. The result is then
/// checked against [`RANDOM_FEASIBLE_SAMPLES`] random column-stochastic
/// matrices; a feasible matrix with a lower objective is a bug and panics.
pub fn brute_force_solve(c: &CostMatrix) -> AssignmentMatrix {
    let (ly, lx) = c.c.shape();
    let mut current = Matrix::zeros(ly, lx);
    for q in 0..lx {
        current[(0, q)] = 1.0;
    }
    let mut best = AssignmentMatrix::new(current);
    for q in 0..lx {
        let mut best_value = c.objective(&best);
        let mut best_row = (0..ly).find(|&p| best.theta[(p, q)] == 1.0).unwrap_or(0);
        for p in 0..ly {
            let mut candidate = best.clone();
            for r in 0..ly {
                candidate.theta[(r, q)] = if r == p { 1.0 } else { 0.0 };
            }
            let value = c.objective(&candidate);
            if value < best_value {
                best_value = value;
                best_row = p;
            }
        }
        for r in 0..ly {
            best.theta[(r, q)] = if r == best_row { 1.0 } else { 0.0 };
        }
    }

    let optimum = c.objective(&best);
    let mut rng = CounterRng::new(0x005e_ed0f_1eed);
    let scale = c.c.as_slice().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    for _ in 0..RANDOM_FEASIBLE_SAMPLES {
        let sample = random_feasible(ly, lx, &mut rng);
        let value = c.objective(&sample);
        assert!(
            optimum <= value + 1e-12 * scale,
            "random feasible matrix beats the enumerated optimum: {value} < {optimum}"
        );
    }
    best
}

/// Column-stochastic matrix with columns uniform on the unit simplex.
pub fn random_feasible(rows: usize, cols: usize, rng: &mut CounterRng) -> AssignmentMatrix {
    let mut theta = Matrix::zeros(rows, cols);
    for q in 0..cols {
        let draws: Vec<f64> = (0..rows).map(|_| -(1.0 - rng.uniform()).ln()).collect();
        let total: f64 = draws.iter().sum();
        for (p, d) in draws.into_iter().enumerate() {
            theta[(p, q)] = d / total;
        }
    }
    AssignmentMatrix::new(theta)
}

/// `theta * lift_x(x)`, a point of the unit simplex for feasible `theta`.
pub fn lifted_distribution(theta: &AssignmentMatrix, knots_x: &KnotSequence, x: f64) -> Result<Vec<f64>> {
    if theta.theta.cols() != knots_x.len() {
        return Err(Error::Dimension { expected: knots_x.len(), found: theta.theta.cols() });
    }
    let x = knots_x.admit(x, OutOfRange::Error)?;
    let (q, lower, upper) = knots_x.weights(x);
    Ok((0..theta.theta.rows())
        .map(|p| lower * theta.theta[(p, q)] + upper * theta.theta[(p, q + 1)])
        .collect())
}

/// `inverse_lift_y(theta * lift_x(x))`.
pub fn lifted_predict(
    theta: &AssignmentMatrix,
    knots_x: &KnotSequence,
    knots_y: &KnotSequence,
    x: f64,
) -> Result<f64> {
    if theta.theta.rows() != knots_y.len() {
        return Err(Error::Dimension { expected: knots_y.len(), found: theta.theta.rows() });
    }
    let z = lifted_distribution(theta, knots_x, x)?;
    Ok(inverse_lift_coeffs(&z, knots_y.as_slice()))
}

/// Relaxed objective evaluated sample by sample:
/// `sum_i sum_p (theta lift_x(x_i))[p] L_{y_i}(t_y[p])`.
pub fn lifted_objective(
    theta: &AssignmentMatrix,
    data: &[(f64, f64)],
    knots_x: &KnotSequence,
    knots_y: &KnotSequence,
    loss: &LossSpec,
) -> Result<f64> {
    let mut total = 0.0;
    for &(x, y) in data {
        let z = lifted_distribution(theta, knots_x, x)?;
        total += z.iter().zip(knots_y.as_slice()).map(|(w, &t)| w * loss.value(t, y)).sum::<f64>();
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    /// `(p, q, value)` of every negative entry.
    pub negative_entries: Vec<(usize, usize, f64)>,
    /// `(q, sum)` of every column whose sum is not within tolerance of one.
    pub bad_columns: Vec<(usize, f64)>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.negative_entries.is_empty() && self.bad_columns.is_empty()
    }
}

pub fn feasibility_check(theta: &AssignmentMatrix) -> FeasibilityReport {
    let m = &theta.theta;
    let mut report = FeasibilityReport::default();
    for q in 0..m.cols() {
        let mut sum = 0.0;
        for p in 0..m.rows() {
            let v = m[(p, q)];
            if v < 0.0 || v.is_nan() {
                report.negative_entries.push((p, q, v));
            }
            sum += v;
        }
        if !((sum - 1.0).abs() <= FEASIBILITY_TOL) {
            report.bad_columns.push((q, sum));
        }
    }
    report
}

/// CSV with a first line `rows,cols` followed by the matrix rows.
pub fn write_matrix_csv<W: Write>(m: &Matrix, mut out: W) -> Result<()> {
    writeln!(out, "{},{}", m.rows(), m.cols())?;
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(input: R) -> Result<Matrix> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })?;
    let header = header?;
    let dims = parse_row::<usize>(1, &header)?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse { line: 1, message: "header must be `rows,cols`".into() });
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row::<f64>(i + 1, &line)?;
        if row.len() != cols {
            return Err(Error::Parse { line: i + 1, message: format!("expected {cols} values") });
        }
        data.extend(row);
        seen += 1;
    }
    if seen != rows {
        return Err(Error::Parse { line: seen + 1, message: format!("expected {rows} rows, found {seen}") });
    }
    Matrix::from_vec(rows, cols, data)
}

fn parse_row<T: std::str::FromStr>(line: usize, text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|f| f.trim().parse::<T>().map_err(|e| Error::Parse { line, message: format!("{f:?}: {e}") }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(rows: &[&[f64]]) -> CostMatrix {
        let m = Matrix::from_rows(rows).unwrap();
        let kx = KnotSequence::uniform(0.0, 1.0, m.cols().max(2)).unwrap();
        let ky = KnotSequence::uniform(0.0, 1.0, m.rows().max(2)).unwrap();
        CostMatrix { c: m, knots_x: kx, knots_y: ky }
    }

    #[test]
    fn single_sample_on_a_knot_fills_one_column() {
        let kx = KnotSequence::uniform(0.0, 1.0, 5).unwrap();
        let ky = KnotSequence::uniform(-1.0, 1.0, 4).unwrap();
        for loss in [LossSpec::squared(), LossSpec::absolute(), LossSpec::truncated_linear(0.5).unwrap()] {
            let c = build_cost_matrix(&[(0.75, 0.2)], &kx, &ky, &loss).unwrap();
            for p in 0..4 {
                for q in 0..5 {
                    let expected = if q == 3 { loss.value(ky.as_slice()[p], 0.2) } else { 0.0 };
                    assert_eq!(c.matrix()[(p, q)], expected);
                }
            }
        }
        // target on a y-knot: zero is the column minimum
        let c = build_cost_matrix(&[(0.25, ky.as_slice()[2])], &kx, &ky, &LossSpec::squared()).unwrap();
        assert_eq!(c.matrix()[(2, 1)], 0.0);
        assert_eq!(solve_closed_form(&c).selected_rows().unwrap()[1], 2);
        assert!(matches!(
            build_cost_matrix(&[(2.0, 0.0)], &kx, &ky, &LossSpec::squared()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn cost_matrix_matches_double_loop() {
        let kx = KnotSequence::uniform(0.0, 1.0, 6).unwrap();
        let ky = KnotSequence::uniform(0.0, 1.0, 7).unwrap();
        let mut rng = CounterRng::new(21);
        let data: Vec<(f64, f64)> = (0..50).map(|_| (rng.uniform(), rng.uniform())).collect();
        let loss = LossSpec::truncated_linear(0.2).unwrap();
        let c = build_cost_matrix(&data, &kx, &ky, &loss).unwrap();
        for p in 0..7 {
            for q in 0..6 {
                let mut expected = 0.0;
                for &(x, y) in &data {
                    let z = crate::lifting::lift(x, &kx).unwrap();
                    expected += z.coeffs()[q] * loss.value(ky.as_slice()[p], y);
                }
                assert!((c.matrix()[(p, q)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let theta = solve_closed_form(&cost(&[&[1.0, 3.0], &[2.0, 0.0]]));
        assert_eq!(theta.matrix(), &Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap());
        let theta = solve_closed_form(&cost(&[&[2.0], &[2.0], &[2.0]]));
        assert_eq!(theta.selected_rows(), Some(vec![0]));
    }

    #[test]
    fn brute_force_examples() {
        let row = cost(&[&[3.0, 1.0, 2.0]]);
        assert_eq!(brute_force_solve(&row).matrix().as_slice(), &[1.0, 1.0, 1.0]);
        let col = cost(&[&[3.0], &[1.0], &[2.0]]);
        assert_eq!(brute_force_solve(&col).selected_rows(), Some(vec![1]));
        let mut rng = CounterRng::new(3);
        let mut m = Matrix::zeros(20, 30);
        for v in m.as_mut_slice() {
            *v = rng.uniform();
        }
        let c = cost(&[&[0.0]]);
        let c = CostMatrix { c: m, ..c };
        assert_eq!(c.objective(&solve_closed_form(&c)), c.objective(&brute_force_solve(&c)));
    }

    #[test]
    fn predictions() {
        let kx = KnotSequence::uniform(0.0, 1.0, 3).unwrap();
        let ky = KnotSequence::new(vec![-1.0, 0.0, 2.0]).unwrap();
        let theta = AssignmentMatrix::new(
            Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap(),
        );
        assert_eq!(lifted_predict(&theta, &kx, &ky, 0.0).unwrap(), -1.0);
        assert_eq!(lifted_predict(&theta, &kx, &ky, 0.5).unwrap(), 2.0);
        assert_eq!(lifted_predict(&theta, &kx, &ky, 1.0).unwrap(), 0.0);
        assert_eq!(lifted_predict(&theta, &kx, &ky, 0.25).unwrap(), 0.5);
        let constant = AssignmentMatrix::new(
            Matrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]).unwrap(),
        );
        for x in [0.0, 0.1, 0.6, 1.0] {
            assert_eq!(lifted_predict(&constant, &kx, &ky, x).unwrap(), 2.0);
        }
        assert!(lifted_predict(&theta, &kx, &ky, 1.5).is_err());
    }

    #[test]
    fn feasibility() {
        let ok = AssignmentMatrix::new(Matrix::identity(3));
        assert!(feasibility_check(&ok).is_feasible());
        let short = AssignmentMatrix::new(Matrix::from_rows(&[[0.9, 1.0], [0.0, 0.0]]).unwrap());
        let report = feasibility_check(&short);
        assert!(!report.is_feasible());
        assert_eq!(report.bad_columns.len(), 1);
        assert_eq!(report.bad_columns[0].0, 0);
        let negative =
            AssignmentMatrix::new(Matrix::from_rows(&[[1.001, 1.0], [-1e-3, 0.0]]).unwrap());
        let report = feasibility_check(&negative);
        assert!(!report.is_feasible());
        assert_eq!(report.negative_entries, vec![(1, 0, -1e-3)]);
    }

    #[test]
    fn csv_round_trip() {
        let c = cost(&[&[1.0, 0.1, 1e-17], &[2.5, -3.0, 7.0]]);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("2,3\n"));
        assert_eq!(&read_matrix_csv(text.as_bytes()).unwrap(), c.matrix());
        assert!(read_matrix_csv("2,2\n1,2\n".as_bytes()).is_err());
        assert!(read_matrix_csv("1,2\n1,x\n".as_bytes()).is_err());
    }
}
