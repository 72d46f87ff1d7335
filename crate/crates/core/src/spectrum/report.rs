use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{detect_gaps, dos, group_degeneracies, ipr, DosHistogram, GapList, Level, Spectrum, SpectrumError};

/// Everything derived from one spectrum, in export form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// `"uniform"` or `"capacitive"`.
    pub weighting: String,
    pub energies: Vec<f64>,
    /// Multiplicity of the level each energy belongs to.
    pub multiplicity: Vec<usize>,
    pub ipr: Vec<f64>,
    pub levels: Vec<Level>,
    pub dos: DosHistogram,
    pub gaps: GapList,
}

impl SpectrumReport {
    pub fn new(spec: &Spectrum, bin_width: f64, gap_threshold: f64, degeneracy_tol: f64) -> Result<Self, SpectrumError> {
        let levels = group_degeneracies(spec, degeneracy_tol)?;
        let multiplicity = levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.multiplicity, l.multiplicity))
            .collect();
        Ok(Self {
            weighting: if spec.weighted() { "capacitive" } else { "uniform" }.to_string(),
            energies: spec.energies().to_vec(),
            multiplicity,
            ipr: ipr(spec),
            levels,
            dos: dos(spec, bin_width)?,
            gaps: detect_gaps(spec, gap_threshold)?,
        })
    }

    /// Lowest level, the flat band of a kagome-like lattice.
    pub fn ground_level(&self) -> Option<Level> {
        self.levels.first().copied()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.levels.iter().map(|l| l.multiplicity).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,energy,multiplicity,ipr\n");
        for (k, ((e, m), p)) in self.energies.iter().zip(&self.multiplicity).zip(&self.ipr).enumerate() {
            writeln!(out, "{k},{e:?},{m},{p:?}").expect("write to string");
        }
        out
    }

    pub fn dos_csv(&self) -> String {
        let mut out = String::from("center,fraction\n");
        for (c, f) in &self.dos.bins {
            writeln!(out, "{c:?},{f:?}").expect("write to string");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
