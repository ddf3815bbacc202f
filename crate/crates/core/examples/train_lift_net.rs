//! Train `<theta, lift(x)>` on sine samples with SGD and compare it to the
//! closed-form minimizer of the same objective.

use std::f64::consts::TAU;

use lifting_layers::experiments::{eval_rmse_1d, gen_sine_data};
use lifting_layers::lifting::KnotSequence;
use lifting_layers::loss::LossSpec;
use lifting_layers::nn::{evaluate_loss, train_epoch, Network, Sgd, Tensor2};
use lifting_layers::rng::CounterRng;
use lifting_layers::spline::{fit_spline_1d_weight_decay, squared_objective};

fn main() -> lifting_layers::Result<()> {
    let (lr, momentum, wd) = (0.1, 0.9, 1e-4);
    let data = gen_sine_data(50, 2)?;
    let knots = KnotSequence::uniform(0.0, TAU, 20)?;
    let x = Tensor2::from_vec(50, 1, data.iter().map(|d| d.0).collect())?;
    let y = Tensor2::from_vec(50, 1, data.iter().map(|d| d.1).collect())?;

    let mut net = Network::lift_net_1d(knots.clone(), &mut CounterRng::new(1));
    let mut sgd = Sgd::new(lr, momentum, wd)?;
    let mut shuffle = CounterRng::new(2);
    let objective = |net: &Network| -> lifting_layers::Result<f64> {
        let l2: f64 = net.params().iter().map(|p| p * p).sum();
        Ok(evaluate_loss(net, &x, &y, &LossSpec::squared())? + 0.5 * wd * l2)
    };
    for epoch in 1..=2000 {
        train_epoch(&mut net, &mut sgd, &x, &y, 128, &LossSpec::squared(), &mut shuffle)?;
        if [1, 25, 75, 200, 2000].contains(&epoch) {
            println!("epoch {epoch:>4}: objective {:.6e}  rmse {:.4}", objective(&net)?, eval_rmse_1d(&net)?);
        }
    }

    let best = fit_spline_1d_weight_decay(&data, &knots, wd)?;
    let l2: f64 = best.theta().iter().map(|t| t * t).sum();
    let optimum = squared_objective(best.theta(), &data, &knots)? / 50.0 + 0.5 * wd * l2;
    println!("closed form:  objective {optimum:.6e}");
    println!("relative gap  {:.2e}", (objective(&net)? - optimum) / optimum);
    Ok(())
}
