use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analysis::{
    DEFAULT_CLUSTER_HEIGHT_DB, DEFAULT_CLUSTER_SEPARATION_HZ, DEFAULT_PEAK_SEPARATION_HZ, DEFAULT_PROMINENCE_DB,
};
use crate::circuit::{
    CircuitDesign, ResonatorSpec, DEFAULT_PORT_COUPLING, DEFAULT_PORT_IMPEDANCE, DEFAULT_REFERENCE_CAPACITANCE,
    DEFAULT_RESONATOR_FREQUENCY, DEFAULT_RESONATOR_IMPEDANCE, DEFAULT_SWEEP_POINTS, DEFAULT_SWEEP_SPAN,
};
use crate::hypgeo::TilingSpec;
use crate::lattice::{DistanceBasis, FaceSelection, FlakeSpec};
use crate::spectrum::{DEFAULT_DEGENERACY_TOL, DEFAULT_DOS_BIN_WIDTH, DEFAULT_GAP_THRESHOLD};

pub const PRESETS: [&str; 7] = [
    "paper-83",
    "paper-124",
    "paper-83-kagome",
    "paper-124-kagome",
    "euclidean-83-kagome",
    "euclidean-124-kagome",
    "single-resonator",
];

/// Reference coupling used by the device presets. Large enough that the
/// lattice splittings sit well above the 1 MHz peak resolution and the
/// default cluster separation, small enough to stay perturbative.
const PRESET_REFERENCE_CAPACITANCE: f64 = 4e-15;
/// Internal loss of the preset resonators, `Q ≈ 2·10⁴` at 6.5 GHz.
const PRESET_SHUNT_CONDUCTANCE: f64 = 1e-6;
/// The distance rule on the `{12,4}` flake spans a 40:1 capacitance range,
/// so its reference is scaled down to keep the band inside the sweep.
const PRESET_REFERENCE_CAPACITANCE_124: f64 = 0.5e-15;

/// Everything a pipeline run needs. Loaded from TOML on top of a preset,
/// then overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub preset: Option<String>,
    pub out_dir: PathBuf,
    /// Drives every random draw: frequency spread and trace noise.
    pub seed: u64,
    pub lattice: LatticeConfig,
    pub coupling: CouplingConfig,
    pub circuit: CircuitConfig,
    pub spectrum: SpectrumConfig,
    pub sweep: SweepConfig,
    pub analysis: AnalysisConfig,
    pub inputs: InputPaths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    pub p: u32,
    pub q: u32,
    /// Generations of the reference tiling written by `tile`.
    pub depth: u32,
    pub selection: FaceSelection,
    /// Work on the kagome-like lattice of the flake.
    pub medial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    pub reference_capacitance: f64,
    pub basis: DistanceBasis,
    /// Equal capacitance on every edge instead of the distance rule.
    pub uniform: bool,
    /// Island-to-ground capacitance of kagome couplers.
    pub coupler_ground: f64,
    /// Keep coupler islands as nodes rather than reducing them.
    pub explicit_couplers: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitConfig {
    pub frequency: f64,
    pub impedance: f64,
    pub port_coupling: f64,
    pub port_impedance: f64,
    pub compensate_loading: bool,
    pub shunt_conductance: f64,
    pub frequency_spread: f64,
    pub ports: usize,
    /// Explicit port sites; chosen automatically when absent.
    pub port_vertices: Option<Vec<usize>>,
    /// Ignore the lattice and build the two-port reference resonator.
    pub single_resonator: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum WeightingChoice {
    Uniform,
    Capacitive,
}

impl WeightingChoice {
    pub fn label(self) -> &'static str {
        match self {
            WeightingChoice::Uniform => "uniform",
            WeightingChoice::Capacitive => "capacitive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub weighting: WeightingChoice,
    pub dos_bin_width: f64,
    pub gap_threshold: f64,
    pub degeneracy_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Grid centre; the resonator frequency when absent.
    pub centre: Option<f64>,
    /// Relative half-width of the grid.
    pub span: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    /// S-parameters aggregated into the transmission trace, e.g. `s21`.
    pub s_params: Vec<String>,
    pub prominence_db: f64,
    pub peak_separation_hz: f64,
    pub cluster_separation_hz: f64,
    pub cluster_height_db: f64,
    /// Uniform noise added to ingested traces, dB half-width.
    pub noise_db: f64,
    /// An eigenvalue is unmatched when no peak lies this close.
    pub match_window_hz: f64,
    /// Anchor frequencies for the two lowest energies; the two lowest peaks
    /// when absent.
    pub anchors: Option<[f64; 2]>,
}

/// Input files. Relative defaults resolve inside `out_dir`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputPaths {
    pub parent: Option<PathBuf>,
    pub lattice: Option<PathBuf>,
    pub netlist: Option<PathBuf>,
    pub traces: Vec<PathBuf>,
    pub spectrum: Option<PathBuf>,
    pub analysis: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            preset: None,
            out_dir: PathBuf::from("out"),
            seed: 0,
            lattice: LatticeConfig::default(),
            coupling: CouplingConfig::default(),
            circuit: CircuitConfig::default(),
            spectrum: SpectrumConfig::default(),
            sweep: SweepConfig::default(),
            analysis: AnalysisConfig::default(),
            inputs: InputPaths::default(),
        }
    }
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            p: 8,
            q: 3,
            depth: 2,
            selection: FaceSelection::CenterPlusEdgeNeighbors,
            medial: false,
        }
    }
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            reference_capacitance: DEFAULT_REFERENCE_CAPACITANCE,
            basis: DistanceBasis::Euclidean,
            uniform: false,
            coupler_ground: 10e-15,
            explicit_couplers: true,
        }
    }
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            frequency: DEFAULT_RESONATOR_FREQUENCY,
            impedance: DEFAULT_RESONATOR_IMPEDANCE,
            port_coupling: DEFAULT_PORT_COUPLING,
            port_impedance: DEFAULT_PORT_IMPEDANCE,
            compensate_loading: true,
            shunt_conductance: 0.0,
            frequency_spread: 0.0,
            ports: 4,
            port_vertices: None,
            single_resonator: false,
        }
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            weighting: WeightingChoice::Uniform,
            dos_bin_width: DEFAULT_DOS_BIN_WIDTH,
            gap_threshold: DEFAULT_GAP_THRESHOLD,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            centre: None,
            span: DEFAULT_SWEEP_SPAN,
            points: DEFAULT_SWEEP_POINTS,
        }
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            s_params: vec!["s21".into(), "s31".into(), "s41".into()],
            prominence_db: DEFAULT_PROMINENCE_DB,
            peak_separation_hz: DEFAULT_PEAK_SEPARATION_HZ,
            cluster_separation_hz: DEFAULT_CLUSTER_SEPARATION_HZ,
            cluster_height_db: DEFAULT_CLUSTER_HEIGHT_DB,
            noise_db: 0.0,
            match_window_hz: 2e6,
            anchors: None,
        }
    }
}

impl PipelineConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let mut c = Self {
            preset: Some(name.to_string()),
            ..Self::default()
        };
        c.coupling.reference_capacitance = PRESET_REFERENCE_CAPACITANCE;
        c.circuit.shunt_conductance = PRESET_SHUNT_CONDUCTANCE;
        let twelve = |c: &mut Self| {
            c.lattice.p = 12;
            c.lattice.q = 4;
            c.lattice.depth = 1;
            c.lattice.selection = FaceSelection::CenterPlusVertexAttached(vec![0, 3, 6, 9]);
            c.spectrum.gap_threshold = 0.2;
            c.coupling.reference_capacitance = PRESET_REFERENCE_CAPACITANCE_124;
        };
        match name {
            "paper-83" => {}
            "paper-124" => twelve(&mut c),
            "paper-83-kagome" => c.lattice.medial = true,
            "paper-124-kagome" => {
                twelve(&mut c);
                c.lattice.medial = true;
            }
            "euclidean-83-kagome" => {
                c.lattice.medial = true;
                c.coupling.uniform = true;
            }
            "euclidean-124-kagome" => {
                twelve(&mut c);
                c.lattice.medial = true;
                c.coupling.uniform = true;
                c.coupling.reference_capacitance = PRESET_REFERENCE_CAPACITANCE;
            }
            "single-resonator" => {
                c.circuit.single_resonator = true;
                c.circuit.ports = 2;
                c.analysis.s_params = vec!["s21".into()];
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown preset `{other}`; expected one of {}",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(c)
    }

    /// Parses TOML layered over the preset it names (or `preset_override`).
    pub fn from_toml(text: &str, preset_override: Option<&str>) -> Result<Self, CliError> {
        let mut user: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let named = match user.remove("preset") {
            Some(toml::Value::String(s)) => Some(s),
            Some(other) => return Err(CliError::Config(format!("preset must be a string, got {other}"))),
            None => None,
        };
        let base = match preset_override.map(str::to_string).or(named) {
            Some(name) => Self::preset(&name)?,
            None => Self::default(),
        };
        let mut merged = toml::Table::try_from(&base).map_err(|e| CliError::Config(e.to_string()))?;
        merge(&mut merged, user);
        merged
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path, preset_override: Option<&str>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, preset_override)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        TilingSpec::new(self.lattice.p, self.lattice.q, self.lattice.depth)?;
        let positive = [
            ("coupling.reference_capacitance", self.coupling.reference_capacitance),
            ("spectrum.dos_bin_width", self.spectrum.dos_bin_width),
            ("spectrum.gap_threshold", self.spectrum.gap_threshold),
            ("spectrum.degeneracy_tol", self.spectrum.degeneracy_tol),
            ("sweep.span", self.sweep.span),
            ("analysis.prominence_db", self.analysis.prominence_db),
            ("analysis.peak_separation_hz", self.analysis.peak_separation_hz),
            ("analysis.cluster_separation_hz", self.analysis.cluster_separation_hz),
            ("analysis.match_window_hz", self.analysis.match_window_hz),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return bad(format!("{name} must be positive and finite, got {v}"));
        }
        if !(self.coupling.coupler_ground >= 0.0 && self.coupling.coupler_ground.is_finite()) {
            return bad(format!("coupling.coupler_ground {}", self.coupling.coupler_ground));
        }
        if !(self.analysis.noise_db >= 0.0 && self.analysis.noise_db.is_finite()) {
            return bad(format!("analysis.noise_db {}", self.analysis.noise_db));
        }
        if self.sweep.span >= 1.0 {
            return bad(format!("sweep.span {} leaves no positive frequencies", self.sweep.span));
        }
        if self.sweep.points < 2 {
            return bad(format!("sweep.points {} (need at least 2)", self.sweep.points));
        }
        if let Some(c) = self.sweep.centre {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("sweep.centre {c}"));
            }
        }
        if self.circuit.ports == 0 {
            return bad("circuit.ports must be at least 1".into());
        }
        if let Some(v) = &self.circuit.port_vertices {
            if v.len() != self.circuit.ports {
                return bad(format!("{} port vertices for {} ports", v.len(), self.circuit.ports));
            }
        }
        if self.circuit.single_resonator && self.circuit.ports != 2 {
            return bad("the single resonator has exactly 2 ports".into());
        }
        if self.analysis.s_params.is_empty() {
            return bad("analysis.s_params is empty".into());
        }
        for name in &self.analysis.s_params {
            let (out, inp) = parse_s_name(name)?;
            if out >= self.circuit.ports || inp >= self.circuit.ports {
                return bad(format!("{name} refers to a port beyond circuit.ports = {}", self.circuit.ports));
            }
        }
        if let Some([f1, f2]) = self.analysis.anchors {
            if !(f1.is_finite() && f2.is_finite() && f1 != f2) {
                return bad(format!("analysis.anchors {f1}, {f2}"));
            }
        }
        self.design().validate()?;
        Ok(())
    }

    pub fn flake_spec(&self) -> Result<FlakeSpec, CliError> {
        Ok(FlakeSpec {
            base: TilingSpec::new(self.lattice.p, self.lattice.q, 1)?,
            selection: self.lattice.selection.clone(),
        })
    }

    pub fn design(&self) -> CircuitDesign {
        let c = &self.circuit;
        CircuitDesign {
            resonator: ResonatorSpec {
                frequency: c.frequency,
                impedance: c.impedance,
            },
            port_coupling: c.port_coupling,
            port_impedance: c.port_impedance,
            compensate_loading: c.compensate_loading,
            shunt_conductance: c.shunt_conductance,
            frequency_spread: c.frequency_spread,
            seed: self.seed,
        }
    }

    /// `path` when given, else `name` inside the output directory.
    pub fn input(&self, path: Option<&PathBuf>, name: &str) -> PathBuf {
        path.cloned().unwrap_or_else(|| self.out_dir.join(name))
    }

    /// File name of the lattice the spectrum and design stages work on.
    pub fn lattice_file_name(&self) -> &'static str {
        if self.lattice.medial {
            "medial.json"
        } else {
            "flake.json"
        }
    }
}

/// `"s21"` → `(1, 0)`: zero-based (output, input) ports.
pub fn parse_s_name(name: &str) -> Result<(usize, usize), CliError> {
    let digits: Vec<u32> = name
        .strip_prefix(['s', 'S'])
        .filter(|d| d.len() == 2)
        .map(|d| d.chars().filter_map(|c| c.to_digit(10)).collect())
        .unwrap_or_default();
    match digits[..] {
        [a, b] if a > 0 && b > 0 => Ok((a as usize - 1, b as usize - 1)),
        _ => Err(CliError::Config(format!(
            "`{name}` is not an S-parameter name like s21 (one-based, single-digit ports)"
        ))),
    }
}

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (key, value) in user {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid_and_round_trips() {
        for name in PRESETS {
            let c = PipelineConfig::preset(name).unwrap();
            c.validate().unwrap();
            assert_eq!(PipelineConfig::from_toml(&c.to_toml(), None).unwrap(), c, "{name}");
        }
    }

    #[test]
    fn file_values_override_the_preset() {
        let text = "preset = \"paper-124\"\n[spectrum]\ngap_threshold = 0.3\n[coupling]\nbasis = \"hyperbolic\"\n";
        let c = PipelineConfig::from_toml(text, None).unwrap();
        assert_eq!(c.lattice.p, 12);
        assert_eq!(c.spectrum.gap_threshold, 0.3);
        assert_eq!(c.spectrum.degeneracy_tol, DEFAULT_DEGENERACY_TOL);
        assert_eq!(c.coupling.basis, DistanceBasis::Hyperbolic);
        let forced = PipelineConfig::from_toml(text, Some("paper-83")).unwrap();
        assert_eq!((forced.lattice.p, forced.spectrum.gap_threshold), (8, 0.3));
    }

    #[test]
    fn selections_parse_from_toml() {
        let c = PipelineConfig::from_toml("[lattice]\nselection = { center_plus_vertex_attached = [0, 6] }\n", None)
            .unwrap();
        assert_eq!(c.lattice.selection, FaceSelection::CenterPlusVertexAttached(vec![0, 6]));
    }

    #[test]
    fn typos_and_bad_values_are_rejected() {
        assert!(PipelineConfig::from_toml("[spectrum]\ngap_treshold = 0.3\n", None).is_err());
        assert!(PipelineConfig::from_toml("preset = \"nope\"\n", None).is_err());
        let c = PipelineConfig::from_toml("[sweep]\npoints = 1\n", None).unwrap();
        assert!(c.validate().is_err());
        let c = PipelineConfig::from_toml("[analysis]\ns_params = [\"s51\"]\n", None).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn s_names() {
        assert_eq!(parse_s_name("s21").unwrap(), (1, 0));
        assert_eq!(parse_s_name("S14").unwrap(), (0, 3));
        for bad in ["s0", "s01", "x21", "s211", "s2a"] {
            assert!(parse_s_name(bad).is_err(), "{bad}");
        }
    }
}
