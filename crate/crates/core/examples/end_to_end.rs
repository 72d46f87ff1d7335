//! The whole chain on the {8,3} flake: lattice, equal capacitive couplings,
//! netlist, four-port sweep, transmission trace, peaks, clusters and the
//! mapping back onto the spectrum.

use hypercirc::analysis::{aggregate_max, anchors_from_peaks, cluster_peaks, compare, find_peaks};
use hypercirc::circuit::{
    ac_sweep, select_port_vertices, simulated_trace, synthesize_netlist, CircuitDesign, CouplingPlan, FrequencyGrid,
};
use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{FaceSelection, FlakeSpec};
use hypercirc::spectrum::{adjacency_energies, detect_gaps, Weighting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = FlakeSpec {
        base: TilingSpec::new(8, 3, 1)?,
        selection: FaceSelection::CenterPlusEdgeNeighbors,
    }
    .build()?;
    let plan = CouplingPlan::uniform(g.edge_count(), 4e-15)?;
    let design = CircuitDesign {
        shunt_conductance: 1e-6,
        ..CircuitDesign::default()
    };
    let ports = select_port_vertices(&g, 4)?;
    let net = synthesize_netlist(&g, &plan, &design, &ports)?;
    println!("ports on sites {ports:?}");

    let grid = FrequencyGrid::around(design.resonator.frequency, 0.05, 20001);
    let sweep = ac_sweep(&net, &grid.values())?;
    let traces = (1..4).map(|out| simulated_trace(&sweep, out, &[0])).collect::<Result<Vec<_>, _>>()?;
    let trace = aggregate_max(&traces)?;
    let peaks = find_peaks(&trace, 3.0, 1e6)?;
    let clusters = cluster_peaks(&peaks, -40.0, 10e6)?;
    println!("{} peaks in {} clusters", peaks.len(), clusters.clusters.len());
    for c in &clusters.clusters {
        println!("  {:>2} peaks around {:.4} GHz", c.members.len(), c.centre() / 1e9);
    }

    let spec = adjacency_energies(&g, Weighting::Uniform)?;
    let anchors = anchors_from_peaks(spec.energies(), &peaks)?;
    let gaps = detect_gaps(&spec, 0.25)?;
    let report = compare(spec.energies(), &anchors, &peaks, &clusters, &gaps, 2e6, "uniform")?;
    for gap in &report.gaps {
        let seen = gap.trace_gap.map_or("none".to_string(), |(a, b)| format!("{:.4}-{:.4} GHz", a / 1e9, b / 1e9));
        println!(
            "  spectral gap {:+.3}..{:+.3} -> {:.4}-{:.4} GHz, trace gap {seen}",
            gap.energy.0,
            gap.energy.1,
            gap.mapped.0 / 1e9,
            gap.mapped.1 / 1e9
        );
    }
    println!("{} of {} eigenvalues unmatched within 2 MHz", report.unmatched.len(), spec.len());
    Ok(())
}
