//! Multi-way couplers: a floating island reduced to pairwise couplings, and
//! the coupler network that realizes the kagome-like {8,3} lattice.

use hypercirc::circuit::{derive_couplings, reduce_coupler, CouplerNetwork};
use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{medial_lattice, DistanceBasis, FaceSelection, FlakeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let island = [(0, 20e-15), (1, 20e-15), (2, 10e-15)];
    let r = reduce_coupler(&island, 10e-15)?;
    println!("three-way island, branch caps 20/20/10 fF, 10 fF to ground:");
    for (a, b, c) in &r.mutual {
        println!("  C({a},{b}) = {:.3} fF", c * 1e15);
    }
    for (a, c) in &r.diagonal {
        println!("  diagonal load on {a}: {:.3} fF", c * 1e15);
    }

    let parent = FlakeSpec {
        base: TilingSpec::new(8, 3, 1)?,
        selection: FaceSelection::CenterPlusEdgeNeighbors,
    }
    .build()?;
    let medial = medial_lattice(&parent)?;
    let plan = derive_couplings(&medial, 4e-15, DistanceBasis::Euclidean)?;
    let network = CouplerNetwork::design(&parent, &medial, &plan, 10e-15)?;
    let counts: Vec<String> = network.way_counts().iter().map(|(k, n)| format!("{n} x {k}-way")).collect();
    println!(
        "kagome-like {{8,3}}: {}; worst coupling error {:.2e}",
        counts.join(", "),
        network.fit_error(&medial, &plan)?
    );
    Ok(())
}
