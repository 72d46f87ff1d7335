//! Normal modes of the {8,3} resonator network against the weighted
//! adjacency spectrum: for weak coupling the fractional shift of each mode
//! is c_ref / 2C times an eigenvalue.

use hypercirc::circuit::{
    derive_couplings, normal_modes, select_port_vertices, synthesize_netlist, CircuitDesign, PortTermination,
};
use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{DistanceBasis, FaceSelection, FlakeSpec};
use hypercirc::spectrum::{adjacency_energies, Weighting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = FlakeSpec {
        base: TilingSpec::new(8, 3, 1)?,
        selection: FaceSelection::CenterPlusEdgeNeighbors,
    }
    .build()?;
    let design = CircuitDesign::default();
    let c_res = design.resonator.capacitance();
    let f0 = design.resonator.frequency;
    let ports = select_port_vertices(&g, 4)?;
    for ratio in [1e-3, 1e-2, 5e-2] {
        let plan = derive_couplings(&g, ratio * c_res, DistanceBasis::Euclidean)?;
        let net = synthesize_netlist(&g, &plan, &design, &ports)?;
        let modes = normal_modes(&net, PortTermination::Short)?;
        let energies = adjacency_energies(&g, Weighting::Capacitive(&plan))?;
        let worst = modes
            .iter()
            .zip(energies.energies())
            .map(|(f, e)| ((f - f0) / f0 - e * ratio / 2.0).abs())
            .fold(0.0, f64::max);
        let span = (modes[modes.len() - 1] - modes[0]) / f0;
        println!("c_ref/C = {ratio:e}: mode band {:.3} MHz wide, worst first-order error {:.2}% of it", span * f0 / 1e6, 100.0 * worst / span);
    }
    Ok(())
}
