use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, ClusterSet, PeakSet};
use crate::spectrum::GapList;

/// Energies closer than this count as the same anchor level.
pub const ANCHOR_TOLERANCE: f64 = 1e-8;

/// The two `(energy, frequency)` pairs fixing the affine map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchors {
    pub lambda1: f64,
    pub f1: f64,
    pub lambda2: f64,
    pub f2: f64,
}

impl Anchors {
    /// `λ₁` is the lowest energy and `λ₂` the next distinct one.
    pub fn from_energies(energies: &[f64], f1: f64, f2: f64) -> Result<Self, AnalysisError> {
        if energies.is_empty() {
            return Err(AnalysisError::Empty);
        }
        if let Some(index) = (1..energies.len()).find(|&k| !(energies[k] >= energies[k - 1])) {
            return Err(AnalysisError::Unsorted { index });
        }
        let lambda1 = energies[0];
        let lambda2 = energies
            .iter()
            .copied()
            .find(|&e| e - lambda1 > ANCHOR_TOLERANCE)
            .ok_or(AnalysisError::DegenerateAnchor)?;
        Self::new(lambda1, f1, lambda2, f2)
    }

    pub fn new(lambda1: f64, f1: f64, lambda2: f64, f2: f64) -> Result<Self, AnalysisError> {
        if !(lambda2 - lambda1 > ANCHOR_TOLERANCE) {
            return Err(AnalysisError::DegenerateAnchor);
        }
        if !(f2 > f1 && f1.is_finite() && f2.is_finite()) {
            return Err(AnalysisError::InvalidParameter(format!("anchor frequencies {f1} and {f2}")));
        }
        Ok(Self { lambda1, f1, lambda2, f2 })
    }

    /// `f₁ + (λ − λ₁)(f₂ − f₁)/(λ₂ − λ₁)`, evaluated so both anchors land
    /// exactly on `f₁` and `f₂`.
    pub fn frequency(&self, lambda: f64) -> f64 {
        let t = (lambda - self.lambda1) / (self.lambda2 - self.lambda1);
        let d = self.f2 - self.f1;
        if self.f1 + d == self.f2 {
            // `d` is exact, so t = 1 reproduces f₂ and nothing cancels.
            self.f1 + t * d
        } else {
            self.f1 * (1.0 - t) + self.f2 * t
        }
    }

    pub fn energy(&self, f: f64) -> f64 {
        self.lambda1 + (f - self.f1) * (self.lambda2 - self.lambda1) / (self.f2 - self.f1)
    }
}

/// Maps every energy to a frequency using the lowest two distinct energies
/// as anchors at `f1` and `f2`.
pub fn map_eigenvalues(energies: &[f64], f1: f64, f2: f64) -> Result<Vec<f64>, AnalysisError> {
    let a = Anchors::from_energies(energies, f1, f2)?;
    Ok(energies.iter().map(|&e| a.frequency(e)).collect())
}

/// Anchor frequencies taken from the two lowest detected peaks.
pub fn anchors_from_peaks(energies: &[f64], peaks: &PeakSet) -> Result<Anchors, AnalysisError> {
    if peaks.len() < 2 {
        return Err(AnalysisError::InvalidParameter("need two peaks to anchor the map".into()));
    }
    Anchors::from_energies(energies, peaks.peaks[0].frequency, peaks.peaks[1].frequency)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedEigenvalue {
    pub index: usize,
    pub energy: f64,
    pub frequency: f64,
    pub nearest_peak: Option<f64>,
    /// `peak − mapped`, hertz.
    pub residual: Option<f64>,
    pub cluster: Option<usize>,
    /// Distance to that cluster's span, zero when inside.
    pub cluster_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapAlignment {
    /// Theoretical gap edges in energy.
    pub energy: (f64, f64),
    /// Same edges mapped to frequency.
    pub mapped: (f64, f64),
    /// The inter-cluster gap overlapping it most, if any.
    pub trace_gap: Option<(f64, f64)>,
    /// Overlap length over the mapped gap width.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingReport {
    /// `"uniform"` or `"capacitive"` hopping behind the energies.
    pub weighting: String,
    pub anchors: Anchors,
    pub window: f64,
    pub eigenvalues: Vec<MappedEigenvalue>,
    pub gaps: Vec<GapAlignment>,
    /// Indices of eigenvalues with no peak within `window`.
    pub unmatched: Vec<usize>,
}

impl MappingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter_map(|e| e.residual)
            .map(f64::abs)
            .fold(0.0, f64::max)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        let a = &self.anchors;
        writeln!(
            w,
            "weighting {}; anchors E={:.6} -> {:.6} GHz, E={:.6} -> {:.6} GHz",
            self.weighting,
            a.lambda1,
            a.f1 / 1e9,
            a.lambda2,
            a.f2 / 1e9
        )
        .expect("write to string");
        writeln!(w, "{:>4} {:>10} {:>12} {:>12} {:>11} {:>7}", "n", "energy", "mapped_GHz", "peak_GHz", "resid_MHz", "cluster")
            .expect("write to string");
        for e in &self.eigenvalues {
            let peak = e.nearest_peak.map_or("-".to_string(), |f| format!("{:.6}", f / 1e9));
            let res = e.residual.map_or("-".to_string(), |r| format!("{:.3}", r / 1e6));
            let cl = e.cluster.map_or("-".to_string(), |c| c.to_string());
            writeln!(
                w,
                "{:>4} {:>10.6} {:>12.6} {:>12} {:>11} {:>7}",
                e.index + 1,
                e.energy,
                e.frequency / 1e9,
                peak,
                res,
                cl
            )
            .expect("write to string");
        }
        for g in &self.gaps {
            let trace = g
                .trace_gap
                .map_or("none".to_string(), |(lo, hi)| format!("{:.6}-{:.6} GHz", lo / 1e9, hi / 1e9));
            writeln!(
                w,
                "gap E {:.4}..{:.4} -> {:.6}-{:.6} GHz, trace gap {trace}, overlap {:.2}",
                g.energy.0,
                g.energy.1,
                g.mapped.0 / 1e9,
                g.mapped.1 / 1e9,
                g.overlap
            )
            .expect("write to string");
        }
        let unmatched: Vec<String> = self.unmatched.iter().map(|k| (k + 1).to_string()).collect();
        writeln!(w, "unmatched: {}", if unmatched.is_empty() { "none".into() } else { unmatched.join(" ") })
            .expect("write to string");
        s
    }
}

/// Lines up mapped eigenvalues with the detected peaks, clusters and gaps.
pub fn compare(
    energies: &[f64],
    anchors: &Anchors,
    peaks: &PeakSet,
    clusters: &ClusterSet,
    gaps: &GapList,
    window: f64,
    weighting: &str,
) -> Result<MappingReport, AnalysisError> {
    if energies.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if !(window > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!("match window {window}")));
    }
    let eigenvalues: Vec<MappedEigenvalue> = energies
        .iter()
        .enumerate()
        .map(|(index, &energy)| {
            let frequency = anchors.frequency(energy);
            let nearest_peak = peaks.nearest(frequency).map(|k| peaks.peaks[k].frequency);
            let cluster = clusters.nearest(frequency);
            MappedEigenvalue {
                index,
                energy,
                frequency,
                nearest_peak,
                residual: nearest_peak.map(|p| p - frequency),
                cluster,
                cluster_distance: cluster.map(|c| clusters.clusters[c].distance_to(frequency)),
            }
        })
        .collect();
    let unmatched = eigenvalues
        .iter()
        .filter(|e| e.residual.is_none_or(|r| r.abs() > window))
        .map(|e| e.index)
        .collect();

    let trace_gaps = clusters.gaps();
    let gaps = gaps
        .gaps
        .iter()
        .map(|&(lo, hi)| {
            let mapped = (anchors.frequency(lo), anchors.frequency(hi));
            let width = mapped.1 - mapped.0;
            let best = trace_gaps
                .iter()
                .map(|&g| (g, (mapped.1.min(g.1) - mapped.0.max(g.0)).max(0.0)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .filter(|(_, o)| *o > 0.0);
            GapAlignment {
                energy: (lo, hi),
                mapped,
                trace_gap: best.map(|b| b.0),
                overlap: best.map_or(0.0, |b| if width > 0.0 { b.1 / width } else { 0.0 }),
            }
        })
        .collect();

    Ok(MappingReport {
        weighting: weighting.to_string(),
        anchors: *anchors,
        window,
        eigenvalues,
        gaps,
        unmatched,
    })
}
