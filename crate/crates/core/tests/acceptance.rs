//! Acceptance criteria. Each test prints one line:
//! `criterion N | PASS/FAIL | what | measurement (threshold) | time (limit)`.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use lifting_layers::experiments::{run_fit1d, run_fit2d, run_robust, surface, ExperimentConfig};
use lifting_layers::lifting::{
    in_unit_simplex, inverse_lift, lift, reduced_lift, satisfies_range_predicate, scaled_lift, KnotSequence,
};
use lifting_layers::linalg::Matrix;
use lifting_layers::loss::LossSpec;
use lifting_layers::nn::{gradient_check, Dense, Layer, Lifting, Network, Tensor2};
use lifting_layers::output_lifting::{brute_force_solve, random_feasible, solve_closed_form, CostMatrix};
use lifting_layers::rng::CounterRng;
use lifting_layers::simplex::{evaluate_spline_nd, fit_spline_nd, grid_triangulation, inverse_lift_nd, lift_nd};
use lifting_layers::spline::{interpolate_exact, squared_objective, Spline1D};
use nalgebra::{DMatrix, DVector};

/// Seed of the 1-D sine and robust regression runs.
const SEED: u64 = 2;

fn report(n: u32, what: &str, pass: bool, detail: String, elapsed: Duration, limit: Option<Duration>) -> bool {
    let timing = match limit {
        Some(l) => format!("{:.3} s (limit {} s)", elapsed.as_secs_f64(), l.as_secs_f64()),
        None => format!("{:.3} s", elapsed.as_secs_f64()),
    };
    let within = limit.is_none_or(|l| elapsed < l);
    let ok = pass && within;
    println!("criterion {n:>2} | {} | {what} | {detail} | {timing}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn random_knots(rng: &mut CounterRng, count: usize, lo: f64, hi: f64) -> KnotSequence {
    let mut inner: Vec<f64> = (0..count - 2).map(|_| rng.uniform_range(lo, hi)).collect();
    inner.sort_by(f64::total_cmp);
    let mut t = vec![lo];
    t.extend(inner);
    t.push(hi);
    KnotSequence::new(t).unwrap()
}

#[test]
fn criterion_01_inversion_identities() {
    let start = Instant::now();
    let mut rng = CounterRng::new(101);
    let knots = random_knots(&mut rng, 15, -3.0, 5.0);
    let mut worst_1d = 0.0f64;
    for _ in 0..10_000 {
        let x = rng.uniform_range(-3.0, 5.0);
        let back = inverse_lift(&lift(x, &knots).unwrap(), &knots).unwrap();
        worst_1d = worst_1d.max((back - x).abs());
    }
    let tri = grid_triangulation(&[random_knots(&mut rng, 9, -2.0, 3.0), random_knots(&mut rng, 7, 0.0, 1.0)]).unwrap();
    let mut worst_2d = 0.0f64;
    for _ in 0..10_000 {
        let x = [rng.uniform_range(-2.0, 3.0), rng.uniform()];
        let back = inverse_lift_nd(lift_nd(&x, &tri).unwrap().coeffs(), &tri).unwrap();
        worst_2d = worst_2d.max((back[0] - x[0]).abs().max((back[1] - x[1]).abs()));
    }
    let pass = worst_1d <= 1e-10 && worst_2d <= 1e-10;
    let detail = format!("max error 1-D {worst_1d:.2e}, 2-D {worst_2d:.2e} (<= 1e-10, 10^4 points each)");
    assert!(report(1, "inversion identities", pass, detail, start.elapsed(), Some(Duration::from_secs(1))));
}

#[test]
fn criterion_02_range_and_hull() {
    let start = Instant::now();
    let tol = 4.0 * f64::EPSILON;
    let mut rng = CounterRng::new(202);
    let knots = random_knots(&mut rng, 12, -1.0, 4.0);
    let mut failures = 0;
    for _ in 0..10_000 {
        let z = lift(rng.uniform_range(-1.0, 4.0), &knots).unwrap();
        if !satisfies_range_predicate(z.coeffs()) || !in_unit_simplex(z.coeffs(), tol) {
            failures += 1;
        }
    }
    let tri = grid_triangulation(&[random_knots(&mut rng, 6, 0.0, 2.0), random_knots(&mut rng, 6, -1.0, 1.0)]).unwrap();
    for _ in 0..10_000 {
        let x = [rng.uniform_range(0.0, 2.0), rng.uniform_range(-1.0, 1.0)];
        let z = lift_nd(&x, &tri).unwrap();
        let support: Vec<usize> = (0..z.len()).filter(|&k| z.coeffs()[k] != 0.0).collect();
        let in_one_simplex = tri.simplices().any(|s| support.iter().all(|k| s.contains(k)));
        if !in_unit_simplex(z.coeffs(), tol) || !in_one_simplex {
            failures += 1;
        }
    }
    let detail = format!("{failures} of 2 x 10^4 lifted vectors fail (sum tolerance 4 eps, entries >= 0)");
    assert!(report(2, "range predicate and unit-simplex membership", failures == 0, detail, start.elapsed(), None));
}

#[test]
fn criterion_03_overfitting() {
    let start = Instant::now();
    let mut rng = CounterRng::new(303);
    let mut xs: Vec<f64> = Vec::new();
    while xs.len() < 100 {
        let x = rng.uniform_range(-5.0, 5.0);
        if !xs.contains(&x) {
            xs.push(x);
        }
    }
    let points: Vec<(f64, f64)> = xs.iter().map(|&x| (x, rng.uniform_range(-10.0, 10.0))).collect();
    let s = interpolate_exact(&points).unwrap();
    let worst_1d = points.iter().map(|&(x, y)| (s.evaluate(x).unwrap() - y).abs()).fold(0.0, f64::max);

    // 100 vertices on a 10 x 10 grid with random knot positions
    let tri = grid_triangulation(&[random_knots(&mut rng, 10, 0.0, 1.0), random_knots(&mut rng, 10, 0.0, 1.0)]).unwrap();
    let data: Vec<(Vec<f64>, Vec<f64>)> =
        tri.vertices().map(|v| (v.to_vec(), vec![rng.uniform_range(-10.0, 10.0)])).collect();
    let theta = fit_spline_nd(&data, &tri).unwrap();
    let worst_2d = data
        .iter()
        .map(|(x, y)| (evaluate_spline_nd(&theta, &tri, x).unwrap()[0] - y[0]).abs())
        .fold(0.0, f64::max);
    let pass = worst_1d <= 1e-9 && worst_2d <= 1e-9;
    let detail = format!("max error 1-D {worst_1d:.2e}, 2-D {worst_2d:.2e} (<= 1e-9, 100 points each)");
    assert!(report(3, "exact interpolation", pass, detail, start.elapsed(), None));
}

#[test]
fn criterion_04_convexity() {
    let start = Instant::now();
    let mut rng = CounterRng::new(404);
    let knots = KnotSequence::uniform(0.0, 1.0, 10).unwrap();
    let data: Vec<(f64, f64)> = (0..60).map(|_| (rng.uniform(), rng.normal())).collect();
    let f = |theta: &[f64]| squared_objective(theta, &data, &knots).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let t1: Vec<f64> = (0..10).map(|_| 3.0 * rng.normal()).collect();
        let t2: Vec<f64> = (0..10).map(|_| 3.0 * rng.normal()).collect();
        let a = rng.uniform();
        let mid: Vec<f64> = t1.iter().zip(&t2).map(|(p, q)| a * p + (1.0 - a) * q).collect();
        worst = worst.max(f(&mid) - (a * f(&t1) + (1.0 - a) * f(&t2)));
    }
    let relu = |t: f64| (t.max(0.0) - 1.0).powi(2);
    let (t1, t2, a) = (-1.0, 1.0, 0.5);
    let witness = relu(a * t1 + (1.0 - a) * t2) - (a * relu(t1) + (1.0 - a) * relu(t2));
    let pass = worst <= 1e-9 && witness > 1e-9;
    let detail = format!(
        "max F(mid) - chord {worst:.2e} (<= 1e-9, 10^3 probes); ReLU witness excess {witness} (> 1e-9)"
    );
    assert!(report(4, "convexity of the lifted objective", pass, detail, start.elapsed(), None));
}

#[test]
fn criterion_05_closed_form_assignment() {
    let start = Instant::now();
    let mut rng = CounterRng::new(505);
    let mut mismatches = 0;
    let mut beaten = 0;
    for instance in 0..100 {
        let rows = 1 + rng.below(30);
        let cols = 2 + rng.below(29);
        // every third instance has small integer costs to exercise ties
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| if instance % 3 == 0 { rng.below(4) as f64 } else { rng.uniform_range(0.0, 10.0) })
            .collect();
        let knots_y = KnotSequence::uniform(0.0, 1.0, rows.max(2)).unwrap();
        let (rows, data) = if rows == 1 {
            (2, data.iter().copied().chain(data.iter().map(|v| v + 1.0)).collect())
        } else {
            (rows, data)
        };
        let c = CostMatrix::new(
            Matrix::from_vec(rows, cols, data).unwrap(),
            KnotSequence::uniform(0.0, 1.0, cols).unwrap(),
            knots_y,
        )
        .unwrap();
        let closed = solve_closed_form(&c);
        if closed != brute_force_solve(&c) {
            mismatches += 1;
        }
        let best = c.objective(&closed);
        let scale = c.matrix().as_slice().iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        for _ in 0..1000 {
            if c.objective(&random_feasible(rows, cols, &mut rng)) < best - 1e-12 * scale {
                beaten += 1;
            }
        }
    }
    let pass = mismatches == 0 && beaten == 0;
    let detail = format!(
        "{mismatches} mismatches vs exhaustive search, {beaten} of 10^5 random feasible matrices lower (100 instances up to 30 x 30)"
    );
    assert!(report(5, "closed-form output-lifting solution", pass, detail, start.elapsed(), Some(Duration::from_secs(5))));
}

/// Minimizer of `mean (Z theta - y)^2 + (wd / 2) |theta|^2` with a dense
/// design matrix built here from scratch.
fn ridge_oracle(data: &[(f64, f64)], knots: &[f64], wd: f64) -> (Vec<f64>, f64) {
    let (n, l) = (data.len(), knots.len());
    let mut z = DMatrix::<f64>::zeros(n, l);
    for (i, &(x, _)) in data.iter().enumerate() {
        let k = (0..l - 1).find(|&k| x >= knots[k] && x <= knots[k + 1]).unwrap();
        let lam = (x - knots[k]) / (knots[k + 1] - knots[k]);
        z[(i, k)] = 1.0 - lam;
        z[(i, k + 1)] = lam;
    }
    let y = DVector::from_iterator(n, data.iter().map(|d| d.1));
    let lhs = z.transpose() * &z + DMatrix::identity(l, l) * (wd * n as f64 / 2.0);
    let theta = lhs.lu().solve(&(z.transpose() * &y)).unwrap();
    let r = &z * &theta - y;
    let objective = r.norm_squared() / n as f64 + 0.5 * wd * theta.norm_squared();
    (theta.iter().copied().collect(), objective)
}

#[test]
fn criterion_06_sine_lift_net() {
    let start = Instant::now();
    let cfg = ExperimentConfig { seed: SEED, ..ExperimentConfig::fit1d() };
    let a = run_fit1d(&cfg).unwrap();
    let elapsed = start.elapsed();
    let b = run_fit1d(&cfg).unwrap();

    let data = lifting_layers::experiments::gen_sine_data(cfg.samples, cfg.seed).unwrap();
    let knots = KnotSequence::uniform(0.0, TAU, cfg.knots).unwrap();
    let (_, oracle_objective) = ridge_oracle(&data, knots.as_slice(), cfg.weight_decay);
    let trained = a.lift.last().unwrap();
    let gap = (trained.objective - oracle_objective) / oracle_objective;
    let oracle_agrees = (a.optimum_objective - oracle_objective).abs() <= 1e-9 * oracle_objective;
    let pass = gap <= 1e-3 && trained.rmse <= 0.02 && a == b && oracle_agrees;
    let detail = format!(
        "epoch {} objective gap {gap:.2e} (<= 1e-3), eval RMSE {:.4} (<= 0.02), deterministic {}, oracle agrees {} \
         [gap to unregularized least squares {:.2e}]",
        trained.epoch,
        trained.rmse,
        a == b,
        oracle_agrees,
        a.unregularized_gap
    );
    assert!(report(6, "1-D sine Lift-Net vs convex optimum", pass, detail, elapsed, Some(Duration::from_secs(60))));
}

/// Training-grid RMSE of the best CPL fit on an `m x m` Kuhn grid, solved as
/// a dense least-squares problem built independently of the library.
fn surface_oracle(grid_n: usize, m: usize) -> f64 {
    let axis: Vec<f64> = (0..grid_n).map(|i| TAU * i as f64 / (grid_n - 1) as f64).collect();
    let h = TAU / (m - 1) as f64;
    let n = grid_n * grid_n;
    let mut a = DMatrix::<f64>::zeros(n, m * m);
    let mut y = DVector::<f64>::zeros(n);
    for (r, (&x2, &x1)) in axis.iter().flat_map(|x2| axis.iter().map(move |x1| (x2, x1))).enumerate() {
        let i = ((x1 / h).floor() as usize).min(m - 2);
        let j = ((x2 / h).floor() as usize).min(m - 2);
        let (u, v) = (x1 / h - i as f64, x2 / h - j as f64);
        let v00 = j * m + i;
        let (w0, mid, w1, w2) = if u >= v { (1.0 - u, v00 + 1, u - v, v) } else { (1.0 - v, v00 + m, v - u, u) };
        a[(r, v00)] += w0;
        a[(r, mid)] += w1;
        a[(r, v00 + m + 1)] += w2;
        y[r] = (x2 * x1.sin()).cos();
    }
    let theta = a.clone().svd(true, true).solve(&y, 1e-12).unwrap();
    ((&a * theta - y).norm_squared() / n as f64).sqrt()
}

#[test]
fn criterion_07_surface_fit() {
    let start = Instant::now();
    let r = run_fit2d(&ExperimentConfig::fit2d()).unwrap();
    let elapsed = start.elapsed();
    let rmse_4 = r.spline_rmse_for(4).unwrap();
    let rmse_11 = r.spline_rmse_for(11).unwrap();
    let oracle_11 = surface_oracle(50, 11);
    let oracle_4 = surface_oracle(50, 4);
    let oracle_agrees = (rmse_11 - oracle_11).abs() <= 1e-8 * oracle_11 && (rmse_4 - oracle_4).abs() <= 1e-8 * oracle_4;
    assert_eq!(surface(PI / 2.0, PI).round(), -1.0);
    let pass = rmse_11 <= 0.05 && rmse_4 > rmse_11 && oracle_agrees;
    let detail = format!(
        "11^2 RMSE {rmse_11:.4} (<= 0.05), 4^2 RMSE {rmse_4:.4} (> 11^2), least-squares oracle {oracle_11:.4} / \
         {oracle_4:.4} agrees {oracle_agrees}; Lift-Net {:.4}, Std-Net {:.4} after {} epochs (recorded only)",
        r.lift.last().unwrap().rmse,
        r.std.last().unwrap().rmse,
        r.lift.last().unwrap().epoch
    );
    assert!(report(7, "2-D vector-valued lifting fit", pass, detail, elapsed, Some(Duration::from_secs(30))));
}

#[test]
fn criterion_08_robust_regression() {
    let start = Instant::now();
    let cfg = ExperimentConfig { seed: SEED, ..ExperimentConfig::robust() };
    let r = run_robust(&cfg).unwrap();
    let elapsed = start.elapsed();
    let verified = brute_force_solve(&r.cost) == r.assignment;
    let spread = r.direct_objective_spread();
    let pass = r.lifted_rmse < r.absolute_rmse && spread > 1e-3 && verified;
    let objectives: Vec<String> = r.direct.iter().map(|d| format!("{:.4}", d.objective)).collect();
    let detail = format!(
        "lifted RMSE {:.4} < l1 RMSE {:.4}; direct objectives [{}] spread {spread:.2e} (> 1e-3); \
         exhaustive search agrees {verified}; {} outliers",
        r.lifted_rmse,
        r.absolute_rmse,
        objectives.join(", "),
        r.data.outlier_count()
    );
    assert!(report(8, "robust regression with 40% outliers", pass, detail, elapsed, Some(Duration::from_secs(30))));
}

#[test]
fn criterion_08_clean_data_sanity() {
    let start = Instant::now();
    let cfg = ExperimentConfig { seed: SEED, outlier_fraction: 0.0, ..ExperimentConfig::robust() };
    let r = run_robust(&cfg).unwrap();
    let pass = r.lifted_rmse <= 0.02 && r.absolute_rmse <= 0.02 && r.data.outlier_count() == 0;
    let direct: Vec<String> = r.direct.iter().map(|d| format!("{:.4}", d.rmse)).collect();
    let detail = format!(
        "no outliers: lifted RMSE {:.4}, l1 RMSE {:.4} (<= 0.02); direct runs [{}] (recorded only)",
        r.lifted_rmse,
        r.absolute_rmse,
        direct.join(", ")
    );
    assert!(report(8, "robust regression, clean-data sanity", pass, detail, start.elapsed(), None));
}

#[test]
fn criterion_09_gradient_checks() {
    let start = Instant::now();
    let sym = KnotSequence::symmetric(1.5, 5).unwrap();
    let kinds: [(&str, Option<Layer>); 5] = [
        ("fully connected", None),
        ("relu", Some(Layer::Relu)),
        ("maxout", Some(Layer::Maxout { group: 2 })),
        ("standard lifting", Some(Layer::Lifting(Lifting::standard(sym.clone())))),
        ("scaled lifting", Some(Layer::Lifting(Lifting::scaled(sym)))),
    ];
    let mut worst = Vec::new();
    for (name, activation) in &kinds {
        let mut max_err = 0.0f64;
        for trial in 0..20 {
            let mut rng = CounterRng::new(9000 + trial);
            let mut layers = vec![Layer::Dense(Dense::init_uniform(3, 6, true, &mut rng))];
            let width = match activation {
                Some(a) => {
                    layers.push(a.clone());
                    a.output_width(6).unwrap()
                }
                None => 6,
            };
            layers.push(Layer::Dense(Dense::init_uniform(width, 2, true, &mut rng)));
            let mut net = Network::new(3, layers).unwrap();
            let x = Tensor2::from_vec(5, 3, (0..15).map(|_| rng.uniform_range(-1.0, 1.0)).collect()).unwrap();
            let y = Tensor2::from_vec(5, 2, (0..10).map(|_| rng.uniform_range(-1.0, 1.0)).collect()).unwrap();
            let r = gradient_check(&mut net, &x, &y, &LossSpec::squared(), 1e-6).unwrap();
            max_err = max_err.max(r.max_relative_error);
        }
        worst.push((name, max_err));
    }
    let pass = worst.iter().all(|&(_, e)| e <= 1e-5);
    let detail = worst.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect::<Vec<_>>().join(", ");
    let detail = format!("max relative error over 20 trials: {detail} (<= 1e-5)");
    assert!(report(9, "gradient checks per layer kind", pass, detail, start.elapsed(), None));
}

#[test]
fn criterion_10_reduced_lifting_equivalence() {
    let start = Instant::now();
    let tbar = 1.75;
    let knots = KnotSequence::new(vec![-tbar, 0.0, tbar]).unwrap();
    let layer = Network::new(1, vec![Layer::Lifting(Lifting::scaled(knots.clone()))]).unwrap();
    let mut rng = CounterRng::new(1010);
    let xs: Vec<f64> = (0..10_000).map(|_| rng.uniform_range(-10.0 * tbar, 10.0 * tbar)).collect();
    let batch = layer.predict(&Tensor2::from_vec(xs.len(), 1, xs.clone()).unwrap()).unwrap();
    let mut worst_ulps = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let (max, min) = reduced_lift(x);
        let z = scaled_lift(x, &knots, true).unwrap();
        let c = z.coeffs();
        let row = batch.row(i);
        let errs = [c[0] - min, c[1], c[2] - max, row[0] - min, row[1] - max];
        let e = errs.iter().map(|e| e.abs()).fold(0.0, f64::max) / (f64::EPSILON * x.abs().max(f64::MIN_POSITIVE));
        worst_ulps = worst_ulps.max(e);
    }
    let pass = worst_ulps <= 4.0;
    let detail = format!("max deviation {worst_ulps:.2} eps |x| over 10^4 points in [-10 t, 10 t] (<= 4 eps |x|)");
    assert!(report(10, "scaled lifting reproduces (max, min)", pass, detail, start.elapsed(), None));
}

#[test]
fn criterion_11_interpolation_error_bound() {
    let start = Instant::now();
    let dense: Vec<f64> = (0..=200_000).map(|i| TAU * i as f64 / 200_000.0).collect();
    let mut rows = Vec::new();
    for h in [PI / 5.0, PI / 10.0, PI / 20.0] {
        let count = (TAU / h).round() as usize + 1;
        let knots = KnotSequence::uniform(0.0, TAU, count).unwrap();
        let theta = knots.as_slice().iter().map(|t| t.sin()).collect();
        let s = Spline1D::new(knots, theta).unwrap();
        let sup = dense.iter().map(|&x| (s.evaluate(x).unwrap() - x.sin()).abs()).fold(0.0, f64::max);
        rows.push((h, sup));
    }
    let bounded = rows.iter().all(|&(h, e)| e <= h);
    let monotone = rows.windows(2).all(|w| w[1].1 <= w[0].1);
    let detail = rows.iter().map(|(h, e)| format!("h={h:.4}: {e:.2e}")).collect::<Vec<_>>().join(", ");
    let detail = format!("{detail} (sup error <= h, non-increasing: {monotone})");
    assert!(report(11, "interpolation error bound", bounded && monotone, detail, start.elapsed(), None));
}
