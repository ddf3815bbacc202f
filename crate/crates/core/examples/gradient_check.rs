//! Central-difference check of back-propagation for every layer kind.

use lifting_layers::lifting::KnotSequence;
use lifting_layers::loss::LossSpec;
use lifting_layers::nn::{gradient_check, Dense, Layer, Lifting, Network, Tensor2};
use lifting_layers::rng::CounterRng;

fn main() -> lifting_layers::Result<()> {
    let mut rng = CounterRng::new(3);
    let sym = KnotSequence::symmetric(1.5, 5)?;
    let activations = [
        ("relu", Layer::Relu),
        ("maxout", Layer::Maxout { group: 2 }),
        ("standard lifting", Layer::Lifting(Lifting::standard(sym.clone()))),
        ("scaled lifting", Layer::Lifting(Lifting::scaled(sym))),
    ];
    let x = Tensor2::from_vec(8, 2, (0..16).map(|_| rng.uniform_range(-1.0, 1.0)).collect())?;
    let y = Tensor2::from_vec(8, 1, (0..8).map(|_| rng.uniform_range(-1.0, 1.0)).collect())?;
    for (name, activation) in activations {
        let width = activation.output_width(6)?;
        let layers = vec![
            Layer::Dense(Dense::init_uniform(2, 6, true, &mut rng)),
            activation,
            Layer::Dense(Dense::init_uniform(width, 1, true, &mut rng)),
        ];
        let mut net = Network::new(2, layers)?;
        for loss in [LossSpec::squared(), LossSpec::absolute(), LossSpec::truncated_linear(0.5)?] {
            let r = gradient_check(&mut net, &x, &y, &loss, 1e-6)?;
            println!(
                "{name:<17} {:<16} max rel err {:.2e} ({} params, {} retries)",
                format!("{:?}", loss.kind()),
                r.max_relative_error,
                r.parameters_checked,
                r.retries
            );
        }
    }
    Ok(())
}
