//! Scaled lifting carries knot magnitudes, so its inverse is a plain sum. On
//! three symmetric knots it reduces to `(min(x, 0), max(x, 0))`.

use lifting_layers::lifting::{inverse_lift, reduced_lift, scaled_lift, KnotSequence};

fn main() -> lifting_layers::Result<()> {
    let knots = KnotSequence::new(vec![-1.0, 0.0, 1.0, 3.0])?;
    for x in [-1.0, -0.4, 0.0, 2.0, 3.0] {
        let z = scaled_lift(x, &knots, false)?;
        println!("x = {x:<5} scaled = {:?}  sum = {}", z.coeffs(), inverse_lift(&z, &knots)?);
    }

    let tbar = 2.0;
    let sym = KnotSequence::new(vec![-tbar, 0.0, tbar])?;
    for x in [-7.5, -1.0, 0.0, 0.5, 12.0] {
        let z = scaled_lift(x, &sym, true)?;
        let (max, min) = reduced_lift(x);
        println!("x = {x:<5} extended scaled = {:?}  (min, max) = ({min}, {max})", z.coeffs());
    }
    Ok(())
}
