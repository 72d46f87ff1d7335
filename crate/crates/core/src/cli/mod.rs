//! The `hypercirc` command line: one subcommand per pipeline stage, all
//! exchanging files inside an output directory.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::analysis::AnalysisError;
use crate::circuit::CircuitError;
use crate::hypgeo::GeometryError;
use crate::lattice::{DistanceBasis, LatticeError};
use crate::spectrum::SpectrumError;

pub use config::{
    parse_s_name, AnalysisConfig, CircuitConfig, CouplingConfig, InputPaths, LatticeConfig, PipelineConfig,
    SpectrumConfig, SweepConfig, WeightingChoice, PRESETS,
};
pub use output::Staged;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 1 for bad input or configuration, 2 when a computation breaks down.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_)
            | CliError::Spectrum(SpectrumError::Numerical { .. })
            | CliError::Circuit(CircuitError::Numerical(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hypercirc", version, about = "Hyperbolic lattice flakes, their spectra and resonator circuits")]
pub struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Start from a named preset (overrides the preset in the file).
    #[arg(long, global = true, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    pub preset: Option<String>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the reference tiling.
    Tile(TileArgs),
    /// Cut the flake out of the tiling.
    Flake,
    /// Build the kagome-like lattice of the flake.
    Medial(MedialArgs),
    /// Diagonalize a lattice and report DOS, gaps, degeneracies and IPR.
    Spectrum(SpectrumArgs),
    /// Synthesize the resonator netlist for a lattice.
    Design(DesignArgs),
    /// Sweep the S-parameters of a netlist.
    Simulate(SimulateArgs),
    /// Extract peaks and clusters from transmission traces.
    Analyze(AnalyzeArgs),
    /// Map eigenvalues onto the detected peaks.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct TileArgs {
    #[arg(long)]
    pub depth: Option<u32>,
}

#[derive(Debug, Args)]
pub struct MedialArgs {
    /// Parent lattice JSON; built from the configuration when absent.
    #[arg(long)]
    pub parent: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long)]
    pub parent: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingChoice>,
    #[arg(long)]
    pub gap_threshold: Option<f64>,
    #[arg(long)]
    pub bin_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long)]
    pub parent: Option<PathBuf>,
    #[arg(long)]
    pub ports: Option<usize>,
    #[arg(long)]
    pub reference_capacitance: Option<f64>,
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum BasisArg {
    Euclidean,
    Hyperbolic,
}

impl From<BasisArg> for DistanceBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Euclidean => DistanceBasis::Euclidean,
            BasisArg::Hyperbolic => DistanceBasis::Hyperbolic,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub span: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trace files; several are combined by per-frequency maximum.
    #[arg(long = "trace")]
    pub traces: Vec<PathBuf>,
    #[arg(long)]
    pub prominence: Option<f64>,
    #[arg(long)]
    pub cluster_separation: Option<f64>,
    #[arg(long)]
    pub cluster_height: Option<f64>,
    #[arg(long)]
    pub noise_db: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    #[arg(long)]
    pub analysis: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<f64>,
    /// Anchor frequencies in hertz for the two lowest energies.
    #[arg(long, num_args = 2, value_names = ["F1", "F2"])]
    pub anchors: Option<Vec<f64>>,
}

impl Cli {
    /// Effective configuration: preset, then file, then flags.
    pub fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => PipelineConfig::load(path, self.preset.as_deref())?,
            None => PipelineConfig::preset(self.preset.as_deref().unwrap_or("paper-83"))?,
        };
        if let Some(d) = &self.out_dir {
            c.out_dir = d.clone();
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        match &self.command {
            Command::Tile(a) => set(&mut c.lattice.depth, a.depth),
            Command::Flake => {}
            Command::Medial(a) => set_path(&mut c.inputs.parent, &a.parent),
            Command::Spectrum(a) => {
                set_path(&mut c.inputs.lattice, &a.lattice);
                set_path(&mut c.inputs.parent, &a.parent);
                set(&mut c.spectrum.weighting, a.weighting);
                set(&mut c.spectrum.gap_threshold, a.gap_threshold);
                set(&mut c.spectrum.dos_bin_width, a.bin_width);
            }
            Command::Design(a) => {
                set_path(&mut c.inputs.lattice, &a.lattice);
                set_path(&mut c.inputs.parent, &a.parent);
                if let Some(n) = a.ports {
                    c.circuit.ports = n;
                    c.circuit.port_vertices = None;
                }
                set(&mut c.coupling.reference_capacitance, a.reference_capacitance);
                set(&mut c.coupling.basis, a.basis.map(Into::into));
            }
            Command::Simulate(a) => {
                set_path(&mut c.inputs.netlist, &a.netlist);
                set(&mut c.sweep.points, a.points);
                set(&mut c.sweep.span, a.span);
            }
            Command::Analyze(a) => {
                if !a.traces.is_empty() {
                    c.inputs.traces = a.traces.clone();
                }
                set(&mut c.analysis.prominence_db, a.prominence);
                set(&mut c.analysis.cluster_separation_hz, a.cluster_separation);
                set(&mut c.analysis.cluster_height_db, a.cluster_height);
                set(&mut c.analysis.noise_db, a.noise_db);
            }
            Command::Compare(a) => {
                set_path(&mut c.inputs.spectrum, &a.spectrum);
                set_path(&mut c.inputs.analysis, &a.analysis);
                set(&mut c.analysis.match_window_hz, a.window);
                if let Some(f) = &a.anchors {
                    c.analysis.anchors = Some([f[0], f[1]]);
                }
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn name(&self) -> &'static str {
        match self.command {
            Command::Tile(_) => "tile",
            Command::Flake => "flake",
            Command::Medial(_) => "medial",
            Command::Spectrum(_) => "spectrum",
            Command::Design(_) => "design",
            Command::Simulate(_) => "simulate",
            Command::Analyze(_) => "analyze",
            Command::Compare(_) => "compare",
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, value: &Option<PathBuf>) {
    if value.is_some() {
        slot.clone_from(value);
    }
}

/// Runs one command: resolves the configuration, computes every output in
/// memory, then writes them together with the effective config and a
/// manifest. Summary lines go to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let config = cli.resolve()?;
    let mut staged = Staged::default();
    let lines = match &cli.command {
        Command::Tile(_) => commands::tile(&config, &mut staged)?,
        Command::Flake => commands::flake(&config, &mut staged)?,
        Command::Medial(_) => commands::medial(&config, &mut staged)?,
        Command::Spectrum(_) => commands::spectrum(&config, &mut staged)?,
        Command::Design(_) => commands::design(&config, &mut staged)?,
        Command::Simulate(_) => commands::simulate(&config, &mut staged)?,
        Command::Analyze(_) => commands::analyze(&config, &mut staged)?,
        Command::Compare(_) => commands::compare(&config, &mut staged)?,
    };
    let name = cli.name();
    staged.add(format!("{name}.config.toml"), config.to_toml());
    staged.add_manifest(name);
    let written = staged.commit(&config.out_dir)?;
    for line in lines {
        writeln!(out, "{line}").map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?;
    }
    Ok(written)
}

/// Entry point of the binary.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
