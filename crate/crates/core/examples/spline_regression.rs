//! Linear spline regression through a lifting: least squares, least absolute
//! deviations and exact interpolation.

use std::f64::consts::TAU;

use lifting_layers::lifting::KnotSequence;
use lifting_layers::rng::CounterRng;
use lifting_layers::spline::{absolute_objective, fit_spline_1d, interpolate_exact, squared_objective, FitLoss};

fn main() -> lifting_layers::Result<()> {
    let mut rng = CounterRng::new(4);
    let mut data: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            let x = rng.uniform_range(0.0, TAU);
            (x, x.sin() + 0.05 * rng.normal())
        })
        .collect();
    // a few gross errors
    for d in data.iter_mut().step_by(25) {
        d.1 += 3.0;
    }
    let knots = KnotSequence::uniform(0.0, TAU, 12)?;

    let ls = fit_spline_1d(&data, &knots, FitLoss::Squared)?;
    let lad = fit_spline_1d(&data, &knots, FitLoss::Absolute)?;
    println!("squared objective  {:.4}", squared_objective(ls.theta(), &data, &knots)?);
    println!("absolute objective {:.4}", absolute_objective(lad.theta(), &data, &knots)?);
    println!("{:>6} {:>9} {:>9} {:>9}", "x", "sin", "lsq", "lad");
    for &x in &[0.5, 1.5, 3.0, 4.5, 6.0] {
        println!("{x:>6} {:>9.4} {:>9.4} {:>9.4}", f64::sin(x), ls.evaluate(x)?, lad.evaluate(x)?);
    }

    let points = vec![(0.3, 1.0), (-1.0, 0.0), (2.0, -2.0), (0.9, 0.5)];
    let interp = interpolate_exact(&points)?;
    for (x, y) in points {
        println!("interpolant({x}) = {} (target {y})", interp.evaluate(x)?);
    }
    Ok(())
}
