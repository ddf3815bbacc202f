//! Robust regression by lifting the output space: the truncated linear loss
//! becomes linear in the lifted variable and the optimum is a per-column
//! argmin of the cost matrix.

use lifting_layers::experiments::{gen_outlier_data, robust_curve};
use lifting_layers::lifting::KnotSequence;
use lifting_layers::loss::LossSpec;
use lifting_layers::output_lifting::{
    brute_force_solve, build_cost_matrix, feasibility_check, lifted_predict, solve_closed_form,
};
use lifting_layers::spline::{fit_spline_1d, FitLoss};

fn main() -> lifting_layers::Result<()> {
    let data = gen_outlier_data(400, 0.4, 0.02, 2)?;
    println!("{} samples, {} outliers", data.samples.len(), data.outlier_count());

    let kx = KnotSequence::uniform(0.0, 1.0, 20)?;
    let ky = KnotSequence::uniform(0.0, 1.0, 50)?;
    let cost = build_cost_matrix(&data.samples, &kx, &ky, &LossSpec::truncated_linear(0.1)?)?;
    let theta = solve_closed_form(&cost);
    assert!(feasibility_check(&theta).is_feasible());
    assert_eq!(theta, brute_force_solve(&cost));
    println!("objective {:.4}, selected output knots {:?}", cost.objective(&theta), theta.selected_rows().unwrap());

    let lad = fit_spline_1d(&data.samples, &kx, FitLoss::Absolute)?;
    println!("{:>5} {:>8} {:>8} {:>8}", "x", "truth", "lifted", "l1");
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        println!(
            "{x:>5} {:>8.4} {:>8.4} {:>8.4}",
            robust_curve(x),
            lifted_predict(&theta, &kx, &ky, x)?,
            lad.evaluate(x)?
        );
    }
    Ok(())
}
