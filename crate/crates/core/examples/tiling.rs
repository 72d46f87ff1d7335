//! Generates a {p,q} tiling of the Poincaré disk and reports how it grows
//! generation by generation.
//!
//! `cargo run --example tiling -- 8 3 3`

use hypercirc::hypgeo::{generate_tiling, hyperbolic_distance, TilingSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (p, q, depth) = match args[..] {
        [p, q, d] => (p, q, d),
        [] => (8, 3, 3),
        _ => return Err("usage: tiling P Q DEPTH".into()),
    };
    let tiling = generate_tiling(&TilingSpec::new(p, q, depth)?)?;
    let edges = tiling.edges();
    println!(
        "{{{p},{q}}} depth {depth}: {} vertices, {} edges, {} faces",
        tiling.vertices.len(),
        edges.len(),
        tiling.faces.len()
    );
    for g in 0..=depth {
        let faces = tiling.generation.iter().filter(|&&x| x == g).count();
        println!("  generation {g}: {faces} faces");
    }
    let (a, b) = edges[0];
    let length = hyperbolic_distance(&tiling.vertices[a], &tiling.vertices[b]);
    let outer = tiling.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
    println!("hyperbolic edge length {length:.9}; outermost vertex at |z| = {outer:.6}");
    Ok(())
}
