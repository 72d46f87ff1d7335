//! Cuts the three device flakes and prints their counts, degrees and
//! cycle structure.

use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{cycle_rank, is_bipartite, medial_lattice, FaceSelection, FlakeSpec, LatticeGraph};

fn report(name: &str, g: &LatticeGraph) -> Result<(), Box<dyn std::error::Error>> {
    let mut degrees = g.degrees();
    degrees.sort_unstable();
    degrees.dedup();
    println!(
        "{name:<18} V={:<3} E={:<3} F={:<2} cycle rank {:<2} degrees {degrees:?} bipartite {}",
        g.vertex_count(),
        g.edge_count(),
        g.face_count(),
        cycle_rank(g)?,
        is_bipartite(g)
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let octagon = FlakeSpec {
        base: TilingSpec::new(8, 3, 1)?,
        selection: FaceSelection::CenterPlusEdgeNeighbors,
    }
    .build()?;
    let dodecagon = FlakeSpec {
        base: TilingSpec::new(12, 4, 1)?,
        selection: FaceSelection::CenterPlusVertexAttached(vec![0, 3, 6, 9]),
    }
    .build()?;
    report("{8,3} flake", &octagon)?;
    report("{12,4} flake", &dodecagon)?;
    report("{8,3} kagome-like", &medial_lattice(&octagon)?)?;
    report("{12,4} kagome-like", &medial_lattice(&dodecagon)?)?;
    Ok(())
}
