//! Anchors the {12,4} spectrum on two peak frequencies, maps every
//! eigenvalue to a frequency and compares with a trace that misses the
//! weakly degenerate states.

use hypercirc::analysis::{cluster_peaks, compare, find_peaks, synthetic_trace, Anchors, SyntheticLine};
use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{FaceSelection, FlakeSpec};
use hypercirc::spectrum::{adjacency_energies, detect_gaps, group_degeneracies, Weighting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = FlakeSpec {
        base: TilingSpec::new(12, 4, 1)?,
        selection: FaceSelection::CenterPlusVertexAttached(vec![0, 3, 6, 9]),
    }
    .build()?;
    let spec = adjacency_energies(&g, Weighting::Uniform)?;
    let e = spec.energies();
    let anchors = Anchors::from_energies(e, 5.80e9, 5.83e9)?;
    println!(
        "E = {:.4} -> {:.3} GHz, E = {:.4} -> {:.3} GHz",
        anchors.lambda1,
        anchors.f1 / 1e9,
        anchors.lambda2,
        anchors.f2 / 1e9
    );

    // Only levels with multiplicity of at least two show up, each split
    // into a comb of lines 1.5 MHz apart as disorder would.
    let lines: Vec<SyntheticLine> = group_degeneracies(&spec, 1e-8)?
        .iter()
        .filter(|l| l.multiplicity >= 2)
        .flat_map(|l| {
            let centre = anchors.frequency(l.energy);
            let m = l.multiplicity;
            (0..m).map(move |k| SyntheticLine {
                frequency: centre + (k as f64 - (m - 1) as f64 / 2.0) * 1.5e6,
                height_db: -30.0,
            })
        })
        .collect();
    let (lo, hi) = (anchors.frequency(e[0]) - 20e6, anchors.frequency(e[e.len() - 1]) + 20e6);
    let grid: Vec<f64> = (0..20001).map(|k| lo + (hi - lo) * k as f64 / 20000.0).collect();
    let trace = synthetic_trace(&grid, &lines, 0.3e6, -90.0)?;
    let peaks = find_peaks(&trace, 3.0, 1e6)?;
    let clusters = cluster_peaks(&peaks, -40.0, 10e6)?;
    let report = compare(e, &anchors, &peaks, &clusters, &detect_gaps(&spec, 0.2)?, 2e6, "uniform")?;
    print!("{}", report.to_table());
    println!("{} clusters from {} peaks", clusters.clusters.len(), peaks.len());
    println!("{} of {} eigenvalues have no peak within 2 MHz", report.unmatched.len(), e.len());
    Ok(())
}
