//! Acceptance checks, one line per criterion. Runs as a plain binary so
//! every criterion reports even when an earlier one fails.

mod common;

use std::f64::consts::TAU;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};

use hypercirc::analysis::{
    cluster_peaks, compare, find_peaks, synthetic_trace, Anchors, PeakSet, SyntheticLine,
};
use hypercirc::circuit::{
    ac_sweep, derive_couplings, normal_modes, select_port_vertices, single_resonator_netlist, synthesize_netlist,
    CircuitDesign, FrequencyGrid, PortTermination,
};
use hypercirc::hypgeo::{hyperbolic_distance, reflect, DiskPoint};
use hypercirc::hypgeo::{generate_tiling, TilingSpec};
use hypercirc::lattice::{
    build_flake, is_bipartite, medial_lattice, random_patch, DistanceBasis, FaceSelection, LatticeGraph,
};
use hypercirc::spectrum::{
    adjacency_energies, adjacency_matrix, construct_cls, detect_gaps, dos, group_degeneracies, ipr, span_projector,
    Spectrum, Weighting,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn uniform(g: &LatticeGraph) -> Spectrum {
    adjacency_energies(g, Weighting::Uniform).expect("diagonalizes")
}

fn counts(g: &LatticeGraph) -> (usize, usize, usize) {
    (g.vertex_count(), g.edge_count(), g.face_count())
}

fn flake_counts() -> Outcome {
    let p83 = counts(&common::paper_83());
    let p124 = counts(&common::paper_124());
    let k83 = counts(&common::kagome_83());
    ensure(p83 == (48, 56, 9), || format!("{{8,3}} flake {p83:?}"))?;
    ensure(p124 == (56, 60, 5), || format!("{{12,4}} flake {p124:?}"))?;
    ensure((k83.0, k83.1) == (56, 80), || format!("kagome flake {k83:?}"))?;
    Ok(format!("{{8,3}} {p83:?}, {{12,4}} {p124:?}, kagome V={} E={}", k83.0, k83.1))
}

fn spectrum_83() -> Outcome {
    let spec = uniform(&common::paper_83());
    let e = spec.energies();
    let asym = common::asymmetry(e);
    let max_deg = group_degeneracies(&spec, 1e-8).unwrap().iter().map(|l| l.multiplicity).max().unwrap();
    let gaps = detect_gaps(&spec, 0.25).unwrap().gaps;
    let mut by_width = gaps.clone();
    by_width.sort_by(|a, b| (b.1 - b.0).total_cmp(&(a.1 - a.0)));
    let brackets = |x: f64| by_width[..2].iter().any(|&(lo, hi)| lo < x && x < hi);
    let summary = format!(
        "asymmetry {asym:.1e}, max degeneracy {max_deg}, {} gaps at 0.25, widest bracket -1: {}, +1: {}",
        gaps.len(),
        brackets(-1.0),
        brackets(1.0)
    );
    ensure(asym < 1e-9 && max_deg == 2 && brackets(-1.0) && brackets(1.0) && gaps.len() == 6, || {
        let list: Vec<String> = gaps.iter().map(|(lo, hi)| format!("[{lo:.4}, {hi:.4}]")).collect();
        format!("{summary}; gaps {}", list.join(" "))
    })?;
    Ok(summary)
}

fn spectrum_124() -> Outcome {
    let spec = uniform(&common::paper_124());
    let levels = group_degeneracies(&spec, 1e-8).unwrap();
    let has = |energy: f64, mult: usize| {
        levels.iter().any(|l| (l.energy - energy).abs() < 1e-9 && l.multiplicity == mult)
    };
    let root3 = 3f64.sqrt();
    let table = has(0.0, 6) && has(1.0, 5) && has(-1.0, 5) && has(root3, 4) && has(-root3, 4);
    let near_1732 = levels.iter().find(|l| (l.energy - 1.732).abs() < 1e-3).map(|l| l.energy);
    let gaps = detect_gaps(&spec, 0.2).unwrap().gaps;
    let summary = format!(
        "degeneracy table (0,6) (±1,5) (±√3,4): {table}, level near 1.732 at {near_1732:?}, {} gaps at 0.2",
        gaps.len()
    );
    ensure(table && gaps.len() == 4, || {
        let list: Vec<String> = gaps.iter().map(|(lo, hi)| format!("[{lo:.4}, {hi:.4}]")).collect();
        format!("{summary}; gaps {}", list.join(" "))
    })?;
    Ok(summary)
}

fn kagome_flat_band() -> Outcome {
    let parent = common::paper_83();
    let medial = common::kagome_83();
    let spec = uniform(&medial);
    let e = spec.energies();
    let ground = group_degeneracies(&spec, 1e-8).unwrap()[0];
    let (lo, hi) = (e[0], e[e.len() - 1]);
    ensure((ground.energy + 2.0).abs() < 1e-9 && ground.multiplicity == 9, || format!("ground level {ground:?}"))?;
    ensure(lo >= -2.0 - 1e-9 && hi < 4.0, || format!("spectrum [{lo}, {hi}]"))?;
    let fraction = ground.multiplicity as f64 / e.len() as f64;
    ensure((fraction - 9.0 / 56.0).abs() < 1e-12, || format!("flat fraction {fraction}"))?;

    let cls = construct_cls(&parent, &medial).unwrap();
    let a = adjacency_matrix(&medial, Weighting::Uniform).unwrap();
    let residual = cls.max_residual(&a);
    ensure(cls.len() == 9 && residual < 1e-9, || format!("{} states, residual {residual:e}", cls.len()))?;
    let numeric = span_projector(&spec.eigenspace(-2.0, 1e-8));
    let diff = (cls.span_projector() - numeric).abs().max();
    ensure(diff < 1e-8, || format!("projector mismatch {diff:e}"))?;
    Ok(format!(
        "E0 = {:.12}, multiplicity 9, range [{lo:.6}, {hi:.6}], flat fraction {:.2}%, CLS residual {residual:.1e}, projector diff {diff:.1e}",
        ground.energy,
        100.0 * fraction
    ))
}

fn parent_range() -> Outcome {
    let spec = uniform(&common::paper_83());
    let e = spec.energies();
    let margin = 3.0 - e[0].abs().max(e[e.len() - 1].abs());
    ensure(margin > 1e-6, || format!("margin {margin}"))?;
    Ok(format!("range [{:.9}, {:.9}], margin {margin:.6}", e[0], e[e.len() - 1]))
}

/// Ordinary least squares `y ≈ a + b x`; returns `(b, max |residual|)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let worst = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).abs()).fold(0.0, f64::max);
    (b, worst)
}

fn circuit_bridge() -> Outcome {
    let g = common::paper_83();
    let design = CircuitDesign::default();
    let c_res = design.resonator.capacitance();
    let plan = derive_couplings(&g, 1e-3 * c_res, DistanceBasis::Euclidean).unwrap();
    let ports = select_port_vertices(&g, 4).unwrap();
    let net = synthesize_netlist(&g, &plan, &design, &ports).unwrap();
    let f0 = design.resonator.frequency;
    let modes = normal_modes(&net, PortTermination::Short).unwrap();
    ensure(modes.len() == g.vertex_count(), || format!("{} modes", modes.len()))?;
    let splittings: Vec<f64> = modes.iter().map(|f| (f - f0) / f0).collect();
    let weighted = adjacency_energies(&g, Weighting::Capacitive(&plan)).unwrap();
    let (slope, worst) = linear_fit(weighted.energies(), &splittings);
    let span = splittings[splittings.len() - 1] - splittings[0];
    let relative = worst / span;
    ensure(relative < 0.01, || format!("relative residual {relative:e}, slope {slope:e}"))?;
    Ok(format!(
        "slope {slope:.6e} (first-order 5e-4), max residual / span {relative:.2e}"
    ))
}

fn mna_single_resonator() -> Outcome {
    let design = CircuitDesign::default();
    let net = single_resonator_netlist(&design).unwrap();
    let f0 = design.resonator.frequency;
    let grid = FrequencyGrid::around(f0, 0.05, 4001).values();
    let sweep = ac_sweep(&net, &grid).unwrap();

    let z0 = design.port_impedance;
    let cp = design.port_coupling;
    let c_shunt = design.resonator.capacitance() - 2.0 * cp;
    let l = design.resonator.inductance();
    let j = Complex64::i();
    let (mut worst_s21, mut worst_recip, mut worst_unit) = (0.0f64, 0.0f64, 0.0f64);
    for (k, &f) in grid.iter().enumerate() {
        let w = TAU * f;
        let y_b = 1.0 / (z0 + 1.0 / (j * w * cp));
        let y_res = j * w * c_shunt + 1.0 / (j * w * l);
        let expected = 2.0 * z0 * y_b * y_b / (y_res + 2.0 * y_b);
        let s = sweep.matrix(k).ok_or_else(|| format!("unsolved point {f}"))?;
        worst_s21 = worst_s21.max((s[(1, 0)].norm() - expected.norm()).abs() / expected.norm());
        worst_recip = worst_recip.max((s[(1, 0)] - s[(0, 1)]).norm());
        let unit = s.adjoint() * s - DMatrix::<Complex64>::identity(2, 2);
        worst_unit = worst_unit.max(unit.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    ensure(worst_s21 < 1e-6, || format!("|S21| relative error {worst_s21:e}"))?;
    ensure(worst_recip < 1e-9, || format!("reciprocity {worst_recip:e}"))?;
    ensure(worst_unit < 1e-6, || format!("unitarity {worst_unit:e}"))?;
    Ok(format!(
        "{} points: |S21| rel err {worst_s21:.1e}, reciprocity {worst_recip:.1e}, unitarity {worst_unit:.1e}",
        grid.len()
    ))
}

fn mapping() -> Outcome {
    let spec = uniform(&common::paper_83());
    let e = spec.energies();
    let (f1, f2) = (6.371e9, 6.389e9);
    let a = Anchors::from_energies(e, f1, f2).map_err(|err| err.to_string())?;
    ensure(a.frequency(a.lambda1) == f1 && a.frequency(a.lambda2) == f2, || "anchors not exact".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x, y, t): (f64, f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random());
        let lhs = a.frequency(t * x + (1.0 - t) * y);
        let rhs = t * a.frequency(x) + (1.0 - t) * a.frequency(y);
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    ensure(worst <= 4.0 * f64::EPSILON, || format!("affinity error {worst:e}"))?;

    let levels = group_degeneracies(&spec, 1e-8).unwrap();
    let (f1, f2) = (4.0e9, 4.3e9);
    let a = Anchors::from_energies(e, f1, f2).unwrap();
    let lines: Vec<SyntheticLine> = levels
        .iter()
        .map(|l| SyntheticLine {
            frequency: a.frequency(l.energy),
            height_db: -25.0,
        })
        .collect();
    let lo = a.frequency(e[0]) - 20e6;
    let hi = a.frequency(e[e.len() - 1]) + 20e6;
    let grid: Vec<f64> = (0..40001).map(|k| lo + (hi - lo) * k as f64 / 40000.0).collect();
    let trace = synthetic_trace(&grid, &lines, 0.5e6, -90.0).unwrap();
    let peaks = find_peaks(&trace, 3.0, 1e6).unwrap();
    let clusters = cluster_peaks(&peaks, -40.0, 10e6).unwrap();
    let gaps = detect_gaps(&spec, 0.25).unwrap();
    let report = compare(e, &a, &peaks, &clusters, &gaps, 2e6, "uniform").unwrap();
    ensure(report.unmatched.is_empty(), || format!("{} unmatched", report.unmatched.len()))?;
    Ok(format!(
        "anchors exact, affinity error {worst:.1e}, round trip: {} peaks, 0 of {} unmatched",
        peaks.len(),
        e.len()
    ))
}

fn peaks_from(lines: &[SyntheticLine]) -> PeakSet {
    let grid: Vec<f64> = (0..20001).map(|k| 6.3e9 + k as f64 * 20e3).collect();
    let trace = synthetic_trace(&grid, lines, 0.2e6, -90.0).unwrap();
    find_peaks(&trace, 3.0, 1e6).unwrap()
}

fn cluster_criteria() -> Outcome {
    let line = |frequency: f64, height_db: f64| SyntheticLine { frequency, height_db };
    // Nine flat-band lines 2 MHz apart, an isolated line, and a second group
    // 40 MHz away.
    let mut lines: Vec<SyntheticLine> = (0..9).map(|k| line(6.40e9 + k as f64 * 2e6, -30.0)).collect();
    lines.push(line(6.36e9, -20.0));
    lines.extend([line(6.46e9, -25.0), line(6.464e9, -28.0)]);
    let peaks = peaks_from(&lines);
    let clusters = cluster_peaks(&peaks, -40.0, 10e6).unwrap();
    let sizes: Vec<usize> = clusters.clusters.iter().map(|c| c.members.len()).collect();
    ensure(peaks.len() == 12, || format!("{} peaks", peaks.len()))?;
    ensure(sizes == [9, 2], || format!("cluster sizes {sizes:?}"))?;
    ensure(clusters.unclustered.len() == 1, || format!("unclustered {:?}", clusters.unclustered))?;

    let faint = peaks_from(&[line(6.40e9, -50.0), line(6.403e9, -55.0)]);
    let none = cluster_peaks(&faint, -40.0, 10e6).unwrap();
    ensure(faint.len() == 2 && none.clusters.is_empty(), || {
        format!("faint pair: {} peaks, {} clusters", faint.len(), none.clusters.len())
    })?;
    Ok("flat-band scenario -> one 9-member cluster; single peak and sub -40 dB pair -> no cluster".into())
}

fn random_flakes(count: usize) -> Vec<LatticeGraph> {
    let tilings: Vec<_> = [(8, 3, 2), (7, 3, 2), (12, 4, 1), (5, 4, 2)]
        .into_iter()
        .map(|(p, q, d)| generate_tiling(&TilingSpec::new(p, q, d).unwrap()).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..count)
        .map(|k| {
            let t = &tilings[k % tilings.len()];
            let size = rng.random_range(1..9);
            let parent = build_flake(t, &FaceSelection::Explicit(random_patch(t, size, &mut rng))).unwrap();
            if k % 2 == 0 {
                parent
            } else {
                medial_lattice(&parent).unwrap()
            }
        })
        .collect()
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hypercirc"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut point = || DiskPoint::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..TAU)).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (x, y, a, b) = (point(), point(), point(), point());
        if a.euclidean_distance(&b) < 1e-3 {
            continue;
        }
        let (rx, ry) = (reflect(&x, (&a, &b)).unwrap(), reflect(&y, (&a, &b)).unwrap());
        let back = reflect(&rx, (&a, &b)).unwrap();
        let d = hyperbolic_distance(&x, &y);
        worst = worst
            .max(back.euclidean_distance(&x))
            .max((hyperbolic_distance(&rx, &ry) - d).abs() / d.max(1.0));
    }
    ensure(worst < 1e-9, || format!("reflection error {worst:e}"))?;

    let presets = [common::paper_83(), common::paper_124()];
    for parent in &presets {
        let m = medial_lattice(parent).unwrap();
        let pairs: usize = parent.degrees().iter().map(|d| d * (d - 1) / 2).sum();
        ensure(m.vertex_count() == parent.edge_count() && m.edge_count() == pairs, || {
            format!("medial identities fail on V={}", parent.vertex_count())
        })?;
    }

    let mut graphs = vec![common::paper_83(), common::paper_124(), common::kagome_83(), common::kagome_124()];
    graphs.extend(random_flakes(50));
    for g in &graphs {
        let spec = uniform(g);
        let symmetric = common::asymmetry(spec.energies()) < 1e-9;
        ensure(is_bipartite(g) == symmetric, || format!("bipartite/symmetry mismatch on V={}", g.vertex_count()))?;
        let total: f64 = dos(&spec, 0.03).unwrap().bins.iter().map(|b| b.1).sum();
        ensure((total - 1.0).abs() < 1e-12, || format!("DOS sums to {total}"))?;
        let n = spec.len() as f64;
        ensure(ipr(&spec).iter().all(|&v| v >= 1.0 / n - 1e-12 && v <= 1.0 + 1e-12), || "IPR out of bounds".into())?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let steps: [&[&str]; 6] = [
        &["flake"],
        &["spectrum"],
        &["design"],
        &["simulate", "--points", "2001"],
        &["analyze", "--noise-db", "0.3"],
        &["compare"],
    ];
    for step in steps {
        cli(d, step)?;
    }
    let first = snapshot(d);
    for step in steps {
        cli(d, step)?;
    }
    ensure(snapshot(d) == first, || "CLI rerun changed an output file".into())?;
    Ok(format!(
        "reflection {worst:.1e}, {} graphs bipartite <=> symmetric, DOS/IPR ok, {} CLI files byte-identical",
        graphs.len(),
        first.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("flake counts", flake_counts),
        ("{8,3} spectrum", spectrum_83),
        ("{12,4} spectrum", spectrum_124),
        ("kagome flat band", kagome_flat_band),
        ("{8,3} spectral range", parent_range),
        ("circuit bridge", circuit_bridge),
        ("MNA single resonator", mna_single_resonator),
        ("eigenvalue mapping", mapping),
        ("cluster criteria", cluster_criteria),
        ("property suites", property_suites),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
