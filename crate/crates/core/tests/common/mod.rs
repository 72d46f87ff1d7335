#![allow(dead_code)]

use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{medial_lattice, FaceSelection, FlakeSpec, LatticeGraph};

pub fn paper_83() -> LatticeGraph {
    FlakeSpec {
        base: TilingSpec::new(8, 3, 1).unwrap(),
        selection: FaceSelection::CenterPlusEdgeNeighbors,
    }
    .build()
    .unwrap()
}

pub fn paper_124() -> LatticeGraph {
    FlakeSpec {
        base: TilingSpec::new(12, 4, 1).unwrap(),
        selection: FaceSelection::CenterPlusVertexAttached(vec![0, 3, 6, 9]),
    }
    .build()
    .unwrap()
}

pub fn kagome_83() -> LatticeGraph {
    medial_lattice(&paper_83()).unwrap()
}

pub fn kagome_124() -> LatticeGraph {
    medial_lattice(&paper_124()).unwrap()
}

/// Largest `|e_k + e_{n-1-k}|` over a sorted spectrum.
pub fn asymmetry(e: &[f64]) -> f64 {
    let n = e.len();
    (0..n).map(|k| (e[k] + e[n - 1 - k]).abs()).fold(0.0, f64::max)
}
