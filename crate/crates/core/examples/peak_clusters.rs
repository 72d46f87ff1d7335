//! Peak extraction and clustering on synthetic transmission traces, with
//! several measurements combined by per-frequency maximum.

use hypercirc::analysis::{aggregate_max, cluster_peaks, find_peaks, synthetic_trace, SyntheticLine};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid: Vec<f64> = (0..15001).map(|k| 6.3e9 + k as f64 * 20e3).collect();
    let line = |f: f64, h: f64| SyntheticLine { frequency: f, height_db: h };
    // A nine-fold flat band split by disorder, then a weak pair and a lone
    // line that should not count as clusters.
    let flat: Vec<SyntheticLine> = (0..9).map(|k| line(6.43e9 + k as f64 * 1.5e6, -30.0)).collect();
    let others = [line(6.35e9, -55.0), line(6.353e9, -52.0), line(6.52e9, -20.0)];
    // Three "cooldowns" that each caught a subset of the lines.
    let traces = [
        synthetic_trace(&grid, &flat[..5], 0.2e6, -80.0)?,
        synthetic_trace(&grid, &flat[4..], 0.2e6, -80.0)?,
        synthetic_trace(&grid, &others, 0.2e6, -80.0)?,
    ];
    let combined = aggregate_max(&traces)?;
    let peaks = find_peaks(&combined, 3.0, 1e6)?;
    let clusters = cluster_peaks(&peaks, -40.0, 10e6)?;
    println!("{} peaks", peaks.len());
    for c in &clusters.clusters {
        println!(
            "cluster of {} peaks, {:.4}-{:.4} GHz, max {:.1} dB",
            c.members.len(),
            c.span.0 / 1e9,
            c.span.1 / 1e9,
            c.max_height
        );
    }
    for &k in &clusters.unclustered {
        let p = &peaks.peaks[k];
        println!("unclustered peak at {:.4} GHz ({:.1} dB)", p.frequency / 1e9, p.height);
    }
    Ok(())
}
