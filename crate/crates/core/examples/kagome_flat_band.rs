//! Flat band of the kagome-like {8,3} lattice: one compact localized state
//! per plaquette of the parent flake, all at E = -2.

use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{medial_lattice, FaceSelection, FlakeSpec};
use hypercirc::spectrum::{adjacency_energies, adjacency_matrix, construct_cls, group_degeneracies, span_projector, Weighting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let parent = FlakeSpec {
        base: TilingSpec::new(8, 3, 1)?,
        selection: FaceSelection::CenterPlusEdgeNeighbors,
    }
    .build()?;
    let medial = medial_lattice(&parent)?;
    let spec = adjacency_energies(&medial, Weighting::Uniform)?;
    let ground = group_degeneracies(&spec, 1e-8)?[0];
    println!(
        "{} sites; ground level E = {:.12} with multiplicity {} ({:.2}% of states)",
        spec.len(),
        ground.energy,
        ground.multiplicity,
        100.0 * ground.multiplicity as f64 / spec.len() as f64
    );

    let cls = construct_cls(&parent, &medial)?;
    let a = adjacency_matrix(&medial, Weighting::Uniform)?;
    println!(
        "{} compact states, supports {:?}, rank {}, max |A psi + 2 psi| = {:.1e}",
        cls.len(),
        cls.support_sizes(),
        cls.rank(),
        cls.max_residual(&a)
    );
    let numeric = span_projector(&spec.eigenspace(-2.0, 1e-8));
    println!(
        "they span the numerical E = -2 eigenspace to {:.1e}",
        (cls.span_projector() - numeric).abs().max()
    );
    Ok(())
}
