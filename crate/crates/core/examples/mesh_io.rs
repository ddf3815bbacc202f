//! Write a mesh to the plain-text format and read it back.

use lifting_layers::lifting::KnotSequence;
use lifting_layers::simplex::{grid_triangulation, mesh_diameter, parse_mesh, write_mesh};

fn main() -> lifting_layers::Result<()> {
    let kx = KnotSequence::new(vec![0.0, 0.3, 1.0])?;
    let ky = KnotSequence::new(vec![-1.0, 1.0])?;
    let tri = grid_triangulation(&[kx, ky])?;
    let mut buf = Vec::new();
    write_mesh(&tri, &mut buf)?;
    let text = String::from_utf8(buf).expect("utf-8");
    print!("{text}");

    let back = parse_mesh(&text)?;
    assert_eq!(back.vertices().collect::<Vec<_>>(), tri.vertices().collect::<Vec<_>>());
    println!("read back {} simplices, diameter {}", back.simplex_count(), mesh_diameter(&back));

    match parse_mesh("2 3 1\n0 0\n1 0\n1 0\n0 1 2\n") {
        Err(e) => println!("degenerate mesh rejected: {e}"),
        Ok(_) => println!("unexpected success"),
    }
    Ok(())
}
