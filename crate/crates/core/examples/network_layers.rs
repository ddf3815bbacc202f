//! Forward and backward passes through maxout and lifting layers.

use lifting_layers::lifting::KnotSequence;
use lifting_layers::nn::{maxout_backward, maxout_forward, Layer, Lifting, Network, Tensor2};

fn main() -> lifting_layers::Result<()> {
    let pre = Tensor2::from_rows(&[[3.0, -1.0, 0.5, 0.5], [-2.0, 0.0, 4.0, 1.0]])?;
    let out = maxout_forward(&pre, 2)?;
    println!("maxout(2): {:?}", out.as_slice());
    let grad = maxout_backward(&pre, &Tensor2::from_rows(&[[1.0, 1.0], [1.0, 1.0]])?, 2)?;
    println!("routed gradient: {:?}", grad.as_slice());

    let knots = KnotSequence::symmetric(1.0, 5)?;
    let mut standard = Network::new(2, vec![Layer::Lifting(Lifting::standard(knots.clone()))])?;
    let scaled = Network::new(2, vec![Layer::Lifting(Lifting::scaled(knots))])?;
    let x = Tensor2::from_rows(&[[0.25, -0.8]])?;
    println!("standard lifting (width {}): {:?}", standard.output_width(), standard.predict(&x)?.as_slice());
    println!("scaled lifting   (width {}): {:?}", scaled.output_width(), scaled.predict(&x)?.as_slice());

    standard.forward(&x)?;
    let g = standard.backward(&Tensor2::from_vec(1, 10, (0..10).map(f64::from).collect())?)?;
    println!("input gradient through standard lifting: {:?}", g.as_slice());
    Ok(())
}
