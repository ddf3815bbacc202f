//! Fit `cos(x2 sin x1)` with vector-valued lifting splines on Kuhn grids of
//! increasing resolution by solving a linear system.

use std::f64::consts::TAU;

use lifting_layers::experiments::gen_2d_data;
use lifting_layers::lifting::KnotSequence;
use lifting_layers::simplex::{evaluate_spline_nd, fit_spline_nd, grid_triangulation, mesh_diameter};

fn main() -> lifting_layers::Result<()> {
    let data: Vec<(Vec<f64>, Vec<f64>)> = gen_2d_data(50)?.into_iter().map(|(p, y)| (p, vec![y])).collect();
    println!("{:>9} {:>10} {:>10}", "vertices", "diameter", "rmse");
    for m in [4, 11, 20, 30] {
        let axis = KnotSequence::uniform(0.0, TAU, m)?;
        let tri = grid_triangulation(&[axis.clone(), axis])?;
        let theta = fit_spline_nd(&data, &tri)?;
        let mut sq = 0.0;
        for (p, y) in &data {
            sq += (evaluate_spline_nd(&theta, &tri, p)?[0] - y[0]).powi(2);
        }
        let rmse = (sq / data.len() as f64).sqrt();
        println!("{:>9} {:>10.4} {:>10.4}", format!("{m}x{m}"), mesh_diameter(&tri), rmse);
    }
    Ok(())
}
