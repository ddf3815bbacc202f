//! Vector-valued lifting: barycentric coordinates on a triangulated square.

use lifting_layers::lifting::KnotSequence;
use lifting_layers::simplex::{
    barycentric, grid_triangulation, inverse_lift_nd, lift_nd, locate_simplex, Triangulation,
};

fn main() -> lifting_layers::Result<()> {
    // unit square split along its diagonal
    let square = Triangulation::new(
        2,
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        vec![vec![0, 1, 3], vec![0, 2, 3]],
    )?;
    for p in [[0.25, 0.1], [0.1, 0.6], [0.5, 0.5]] {
        let s = locate_simplex(&p, &square)?;
        let bc = barycentric(&p, &square, s)?;
        let z = lift_nd(&p, &square)?;
        println!(
            "{p:?}: simplex {s} lambdas {:?} lifted {:?} back {:?}",
            bc.lambdas,
            z.coeffs(),
            inverse_lift_nd(z.coeffs(), &square)?
        );
    }

    let axis = KnotSequence::uniform(0.0, 1.0, 4)?;
    let grid = grid_triangulation(&[axis.clone(), axis])?;
    println!("4 x 4 Kuhn grid: {} vertices, {} triangles", grid.vertex_count(), grid.simplex_count());
    let z = lift_nd(&[0.5, 0.2], &grid)?;
    let support: Vec<(usize, f64)> =
        z.coeffs().iter().enumerate().filter(|(_, w)| **w != 0.0).map(|(k, w)| (k, *w)).collect();
    println!("lift_nd([0.5, 0.2]) support: {support:?}");
    Ok(())
}
