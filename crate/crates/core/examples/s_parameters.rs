//! AC sweep of a two-port single resonator: S-parameters from nodal
//! analysis, written as Touchstone, and the resonance read off |S21|.

use hypercirc::circuit::{ac_sweep, simulated_trace, single_resonator_netlist, CircuitDesign, FrequencyGrid};
use hypercirc::analysis::find_peaks;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let design = CircuitDesign {
        shunt_conductance: 1e-6,
        ..CircuitDesign::default()
    };
    let net = single_resonator_netlist(&design)?;
    print!("{}", net.to_text());
    let grid = FrequencyGrid::around(design.resonator.frequency, 0.01, 2001);
    let sweep = ac_sweep(&net, &grid.values())?;
    let trace = simulated_trace(&sweep, 1, &[0])?;
    let peaks = find_peaks(&trace, 3.0, 1e6)?;
    for p in &peaks.peaks {
        println!("resonance at {:.6} GHz, |S21| = {:.2} dB", p.frequency / 1e9, p.height);
    }
    let touchstone = sweep.to_touchstone()?;
    println!("Touchstone header: {}", touchstone.lines().find(|l| l.starts_with('#')).unwrap_or(""));
    Ok(())
}
