//! Lift scalars onto a knot sequence and map them back.

use lifting_layers::lifting::{
    in_unit_simplex, inverse_lift, lift, lift_jacobian, lift_with, satisfies_range_predicate, KnotSequence, LiftMode,
    OutOfRange,
};

fn main() -> lifting_layers::Result<()> {
    let knots = KnotSequence::new(vec![0.0, 0.5, 1.0, 2.0])?;
    for x in [0.0, 0.25, 0.5, 1.7, 2.0] {
        let z = lift(x, &knots)?;
        println!(
            "x = {x:<4}  lift = {:?}  inverse = {}  range ok = {}  simplex = {}",
            z.coeffs(),
            inverse_lift(&z, &knots)?,
            satisfies_range_predicate(z.coeffs()),
            in_unit_simplex(z.coeffs(), 0.0)
        );
    }

    println!("d lift / dx at 1.7 = {:?}", lift_jacobian(1.7, &knots, LiftMode::Standard)?);

    match lift(2.5, &knots) {
        Err(e) => println!("lift(2.5) -> {e}"),
        Ok(z) => println!("unexpected {:?}", z.coeffs()),
    }
    println!("clamped lift(2.5) = {:?}", lift_with(2.5, &knots, OutOfRange::Clamp)?.coeffs());
    Ok(())
}
