//! Tight-binding spectra of the {8,3} and {12,4} flakes: levels, gaps,
//! density of states and localization.

use hypercirc::hypgeo::TilingSpec;
use hypercirc::lattice::{FaceSelection, FlakeSpec};
use hypercirc::spectrum::{adjacency_energies, SpectrumReport, Weighting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let flakes = [
        ((8, 3), FaceSelection::CenterPlusEdgeNeighbors, 0.25),
        ((12, 4), FaceSelection::CenterPlusVertexAttached(vec![0, 3, 6, 9]), 0.2),
    ];
    for ((p, q), selection, threshold) in flakes {
        let g = FlakeSpec {
            base: TilingSpec::new(p, q, 1)?,
            selection,
        }
        .build()?;
        let spec = adjacency_energies(&g, Weighting::Uniform)?;
        let report = SpectrumReport::new(&spec, 0.03, threshold, 1e-8)?;
        println!("{{{p},{q}}}: {} states in {} levels", spec.len(), report.levels.len());
        for level in report.levels.iter().filter(|l| l.multiplicity > 1) {
            println!("  E = {:+.6}  x{}", level.energy, level.multiplicity);
        }
        println!("  {} gaps wider than {threshold}:", report.gaps.gaps.len());
        for (lo, hi) in &report.gaps.gaps {
            println!("    {lo:+.4} .. {hi:+.4}");
        }
        let peak = report.dos.bins.iter().map(|b| b.1).fold(0.0, f64::max);
        let (lo_ipr, hi_ipr) = report
            .ipr
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        println!("  DOS peak bin {peak:.3}; IPR between {lo_ipr:.4} and {hi_ipr:.4}");
    }
    Ok(())
}
