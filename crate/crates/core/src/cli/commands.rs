use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::parse_s_name;
use super::{CliError, PipelineConfig, Staged, WeightingChoice};
use crate::analysis::{
    aggregate_max, anchors_from_peaks, cluster_peaks, compare as compare_report, find_peaks, from_multi_csv,
    Anchors, ClusterSet, PeakSet, Trace, TwoPortData,
};
use crate::circuit::{
    ac_sweep, derive_couplings, describe, select_port_vertices, simulated_trace, single_resonator_netlist,
    site_node, synthesize_netlist, CouplerNetwork, CouplingPlan, FrequencyGrid, Netlist,
};
use crate::hypgeo::{generate_tiling, TilingSpec};
use crate::lattice::{medial_lattice, LatticeGraph, LatticeKind};
use crate::spectrum::{adjacency_energies, construct_cls, SpectrumReport, Weighting};

/// What `analyze` hands to `compare`.
#[derive(Debug, Serialize, Deserialize)]
struct AnalysisFile {
    traces: usize,
    peaks: PeakSet,
    clusters: ClusterSet,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn input_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Input {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn read_lattice(path: &Path) -> Result<LatticeGraph, CliError> {
    LatticeGraph::from_json(&read(path)?).map_err(|e| input_error(path, e))
}

fn counts(g: &LatticeGraph) -> String {
    format!("V={} E={} F={}", g.vertex_count(), g.edge_count(), g.face_count())
}

/// Energy rounded to nine decimals, printed without trailing zeros.
fn energy(e: f64) -> String {
    let r = (e * 1e9).round() / 1e9;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn parent(config: &PipelineConfig) -> Result<LatticeGraph, CliError> {
    match &config.inputs.parent {
        Some(path) => {
            let g = read_lattice(path)?;
            if g.kind() != LatticeKind::Parent {
                return Err(input_error(path, "expected a parent lattice"));
            }
            Ok(g)
        }
        None => Ok(config.flake_spec()?.build()?),
    }
}

fn lattice(config: &PipelineConfig) -> Result<(PathBuf, LatticeGraph), CliError> {
    let path = config.input(config.inputs.lattice.as_ref(), config.lattice_file_name());
    let g = read_lattice(&path)?;
    Ok((path, g))
}

fn coupling_plan(config: &PipelineConfig, g: &LatticeGraph) -> Result<CouplingPlan, CliError> {
    let c = &config.coupling;
    Ok(if c.uniform {
        CouplingPlan::uniform(g.edge_count(), c.reference_capacitance)?
    } else {
        derive_couplings(g, c.reference_capacitance, c.basis)?
    })
}

pub fn tile(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let l = &config.lattice;
    let tiling = generate_tiling(&TilingSpec::new(l.p, l.q, l.depth)?)?;
    staged.add("tiling.json", tiling.to_json());
    Ok(vec![format!(
        "{{{},{}}} depth {}: V={} E={} F={}",
        l.p,
        l.q,
        l.depth,
        tiling.vertices.len(),
        tiling.edges().len(),
        tiling.faces.len()
    )])
}

pub fn flake(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let g = config.flake_spec()?.build()?;
    staged.add("flake.json", g.to_json());
    Ok(vec![counts(&g)])
}

pub fn medial(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let m = medial_lattice(&parent(config)?)?;
    staged.add("medial.json", m.to_json());
    Ok(vec![counts(&m)])
}

pub fn spectrum(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let (_, g) = lattice(config)?;
    let s = &config.spectrum;
    let plan;
    let weighting = match s.weighting {
        WeightingChoice::Uniform => Weighting::Uniform,
        WeightingChoice::Capacitive => {
            plan = coupling_plan(config, &g)?;
            Weighting::Capacitive(&plan)
        }
    };
    let spec = adjacency_energies(&g, weighting)?;
    let report = SpectrumReport::new(&spec, s.dos_bin_width, s.gap_threshold, s.degeneracy_tol)?;

    let mut lines = vec![
        format!("{} sites, {} hopping", spec.len(), s.weighting.label()),
        format!(
            "range [{}, {}], {} levels, max multiplicity {}",
            energy(report.energies[0]),
            energy(report.energies[report.energies.len() - 1]),
            report.levels.len(),
            report.max_multiplicity()
        ),
        format!("{} gaps at threshold {}", report.gaps.gaps.len(), s.gap_threshold),
    ];
    let mut gaps = String::from("lower,upper,width\n");
    for &(lo, hi) in &report.gaps.gaps {
        writeln!(gaps, "{lo:?},{hi:?},{:?}", hi - lo).expect("write to string");
        lines.push(format!("  gap {} .. {} (width {:.4})", energy(lo), energy(hi), hi - lo));
    }

    if g.kind() == LatticeKind::Medial && s.weighting == WeightingChoice::Uniform {
        if let Some(ground) = report.ground_level().filter(|l| l.multiplicity > 1) {
            lines.push(format!(
                "flat band: E={}, multiplicity {}",
                energy(ground.energy),
                ground.multiplicity
            ));
        }
        let cls = construct_cls(&parent(config)?, &g)?;
        lines.push(format!("{} compact localized states", cls.len()));
        staged.add("cls.json", cls.to_json());
    }
    staged.add("spectrum.csv", report.to_csv());
    staged.add("spectrum.json", report.to_json());
    staged.add("dos.csv", report.dos_csv());
    staged.add("gaps.csv", gaps);
    Ok(lines)
}

#[derive(Serialize)]
struct PortFile {
    vertices: Vec<usize>,
    nodes: Vec<usize>,
}

pub fn design(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let design = config.design();
    if config.circuit.single_resonator {
        let net = single_resonator_netlist(&design)?;
        staged.add("netlist.txt", net.to_text());
        return Ok(vec![describe(&net)]);
    }
    let (_, g) = lattice(config)?;
    let ports = match &config.circuit.port_vertices {
        Some(v) => v.clone(),
        None => select_port_vertices(&g, config.circuit.ports)?,
    };
    let plan = coupling_plan(config, &g)?;
    let mut lines = Vec::new();
    let net = if g.kind() == LatticeKind::Medial {
        let network = CouplerNetwork::design(&parent(config)?, &g, &plan, config.coupling.coupler_ground)?;
        lines.push(format!(
            "couplers by branch count: {}",
            network
                .way_counts()
                .iter()
                .map(|(k, n)| format!("{n}x{k}-way"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        lines.push(format!(
            "worst relative coupling error {:.3e}",
            network.fit_error(&g, &plan)?
        ));
        staged.add(
            "couplers.json",
            serde_json::to_string_pretty(&network).expect("couplers serialize"),
        );
        if config.coupling.explicit_couplers {
            network.explicit_netlist(&design, &ports)?
        } else {
            network.reduced_netlist(&design, &ports)?
        }
    } else {
        synthesize_netlist(&g, &plan, &design, &ports)?
    };
    let port_file = PortFile {
        nodes: ports.iter().map(|&v| site_node(v)).collect(),
        vertices: ports,
    };
    staged.add(
        "ports.json",
        serde_json::to_string_pretty(&port_file).expect("ports serialize"),
    );
    staged.add("netlist.txt", net.to_text());
    lines.insert(0, describe(&net));
    Ok(lines)
}

pub fn simulate(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let path = config.input(config.inputs.netlist.as_ref(), "netlist.txt");
    let net = Netlist::parse(&read(&path)?).map_err(|e| input_error(&path, e))?;
    let pairs = s_pairs(config, net.ports().len())?;
    let centre = config.sweep.centre.unwrap_or(config.circuit.frequency);
    let grid = FrequencyGrid::around(centre, config.sweep.span, config.sweep.points);
    grid.validate()?;
    let sweep = ac_sweep(&net, &grid.values())?;
    let failures = sweep.failures().len();
    if failures == sweep.len() {
        return Err(CliError::Numerical("no sweep point could be solved".into()));
    }
    let traces = pairs
        .iter()
        .map(|&(o, i)| simulated_trace(&sweep, o, &[i]))
        .collect::<Result<Vec<_>, _>>()?;
    let trace = aggregate_max(&traces)?;

    staged.add("sweep.csv", sweep.to_csv());
    staged.add(format!("sweep.s{}p", sweep.port_count()), sweep.to_touchstone()?);
    staged.add("trace.csv", trace.to_csv());
    Ok(vec![format!(
        "{} points, {} ports, {} unsolved; trace = max of {}",
        sweep.len(),
        sweep.port_count(),
        failures,
        config.analysis.s_params.join(", ")
    )])
}

fn s_pairs(config: &PipelineConfig, ports: usize) -> Result<Vec<(usize, usize)>, CliError> {
    config
        .analysis
        .s_params
        .iter()
        .map(|name| {
            let (o, i) = parse_s_name(name)?;
            if o >= ports || i >= ports {
                return Err(CliError::Config(format!("{name} needs more than the {ports} ports present")));
            }
            Ok((o, i))
        })
        .collect()
}

/// Series selected from one trace file: plain `frequency, dB` CSV, a
/// multi-column S-parameter CSV, or a two-port Touchstone file.
fn load_traces(config: &PipelineConfig, path: &Path) -> Result<Vec<Trace>, CliError> {
    let text = read(path)?;
    let wanted: Vec<String> = config.analysis.s_params.iter().map(|s| s.to_lowercase()).collect();
    let is_touchstone = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("s2p"));
    if is_touchstone {
        let data = TwoPortData::parse(&text).map_err(|e| input_error(path, e))?;
        return wanted
            .iter()
            .map(|name| {
                let (o, i) = parse_s_name(name)?;
                data.trace(o + 1, i + 1).map_err(|e| input_error(path, e))
            })
            .collect();
    }
    let series = from_multi_csv(&text).map_err(|e| input_error(path, e))?;
    if series.len() == 1 {
        return Ok(series.into_iter().map(|(_, t)| t).collect());
    }
    let chosen: Vec<Trace> = series
        .into_iter()
        .filter(|(name, _)| wanted.contains(&name.to_lowercase()))
        .map(|(_, t)| t)
        .collect();
    if chosen.is_empty() {
        return Err(input_error(path, format!("no column matches {}", wanted.join(", "))));
    }
    Ok(chosen)
}

pub fn analyze(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let paths = if config.inputs.traces.is_empty() {
        vec![config.out_dir.join("trace.csv")]
    } else {
        config.inputs.traces.clone()
    };
    let mut traces = Vec::new();
    for p in &paths {
        traces.extend(load_traces(config, p)?);
    }
    let mut trace = aggregate_max(&traces)?;
    let a = &config.analysis;
    if a.noise_db > 0.0 {
        trace = trace.with_noise(a.noise_db, config.seed)?;
    }
    let peaks = find_peaks(&trace, a.prominence_db, a.peak_separation_hz)?;
    let clusters = cluster_peaks(&peaks, a.cluster_height_db, a.cluster_separation_hz)?;

    let mut cluster_of = vec![None; peaks.len()];
    let mut clusters_csv = String::from("cluster,members,f_lo_hz,f_hi_hz,centre_hz,max_height_db\n");
    let mut lines = vec![format!(
        "{} series from {} file(s); {} peaks, {} clusters",
        traces.len(),
        paths.len(),
        peaks.len(),
        clusters.clusters.len()
    )];
    for (k, c) in clusters.clusters.iter().enumerate() {
        for &m in &c.members {
            cluster_of[m] = Some(k);
        }
        writeln!(
            clusters_csv,
            "{k},{},{:?},{:?},{:?},{:?}",
            c.members.len(),
            c.span.0,
            c.span.1,
            c.centre(),
            c.max_height
        )
        .expect("write to string");
        lines.push(format!(
            "  cluster {k}: {} peaks, {:.4}-{:.4} GHz, max {:.1} dB",
            c.members.len(),
            c.span.0 / 1e9,
            c.span.1 / 1e9,
            c.max_height
        ));
    }
    let mut peaks_csv = String::from("index,frequency_hz,height_db,prominence_db,cluster\n");
    for (k, p) in peaks.peaks.iter().enumerate() {
        let cluster = cluster_of[k].map_or(String::new(), |c| c.to_string());
        writeln!(
            peaks_csv,
            "{k},{:?},{:?},{:?},{cluster}",
            p.frequency, p.height, p.prominence
        )
        .expect("write to string");
    }
    let file = AnalysisFile {
        traces: traces.len(),
        peaks,
        clusters,
    };
    staged.add("analysis_trace.csv", trace.to_csv());
    staged.add("peaks.csv", peaks_csv);
    staged.add("clusters.csv", clusters_csv);
    staged.add(
        "analysis.json",
        serde_json::to_string_pretty(&file).expect("analysis serializes"),
    );
    Ok(lines)
}

pub fn compare(config: &PipelineConfig, staged: &mut Staged) -> Result<Vec<String>, CliError> {
    let sp = config.input(config.inputs.spectrum.as_ref(), "spectrum.json");
    let report = SpectrumReport::from_json(&read(&sp)?).map_err(|e| input_error(&sp, e))?;
    let ap = config.input(config.inputs.analysis.as_ref(), "analysis.json");
    let analysis: AnalysisFile = serde_json::from_str(&read(&ap)?).map_err(|e| input_error(&ap, e))?;
    let anchors = match config.analysis.anchors {
        Some([f1, f2]) => Anchors::from_energies(&report.energies, f1, f2)?,
        None => anchors_from_peaks(&report.energies, &analysis.peaks)?,
    };
    let mapping = compare_report(
        &report.energies,
        &anchors,
        &analysis.peaks,
        &analysis.clusters,
        &report.gaps,
        config.analysis.match_window_hz,
        &report.weighting,
    )?;

    let mut mapped = String::from("index,energy,frequency_hz,multiplicity,nearest_peak_hz,residual_hz,cluster\n");
    for (e, m) in mapping.eigenvalues.iter().zip(&report.multiplicity) {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:?}"));
        writeln!(
            mapped,
            "{},{:?},{:?},{m},{},{},{}",
            e.index,
            e.energy,
            e.frequency,
            opt(e.nearest_peak),
            opt(e.residual),
            e.cluster.map_or(String::new(), |c| c.to_string())
        )
        .expect("write to string");
    }
    staged.add("mapping.json", mapping.to_json());
    staged.add("mapping.txt", mapping.to_table());
    staged.add("mapped.csv", mapped);

    let aligned = mapping.gaps.iter().filter(|g| g.trace_gap.is_some()).count();
    Ok(vec![
        format!(
            "anchors: E={} -> {:.6} GHz, E={} -> {:.6} GHz ({} hopping)",
            energy(anchors.lambda1),
            anchors.f1 / 1e9,
            energy(anchors.lambda2),
            anchors.f2 / 1e9,
            mapping.weighting
        ),
        format!(
            "{} of {} eigenvalues unmatched within {:.3} MHz; max |residual| {:.3} MHz",
            mapping.unmatched.len(),
            mapping.eigenvalues.len(),
            mapping.window / 1e6,
            mapping.max_abs_residual() / 1e6
        ),
        format!(
            "{} of {} spectral gaps overlap a gap between clusters",
            aligned,
            mapping.gaps.len()
        ),
    ])
}
