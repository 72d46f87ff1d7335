//! Transmission traces: aggregation, peak and cluster extraction, and the
//! affine map from tight-binding energies to resonance frequencies.

mod mapping;
mod peaks;
mod trace;

pub use mapping::{
    anchors_from_peaks, compare, map_eigenvalues, Anchors, GapAlignment, MappedEigenvalue, MappingReport,
    ANCHOR_TOLERANCE,
};
pub use peaks::{
    cluster_peaks, find_peaks, Cluster, ClusterSet, Peak, PeakSet, DEFAULT_CLUSTER_HEIGHT_DB,
    DEFAULT_CLUSTER_SEPARATION_HZ, DEFAULT_PEAK_SEPARATION_HZ, DEFAULT_PROMINENCE_DB,
};
pub use trace::{aggregate_max, from_multi_csv, resample, synthetic_trace, SyntheticLine, Trace, TwoPortData};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("{frequencies} frequencies but {values} values")]
    LengthMismatch { frequencies: usize, values: usize },
    #[error("empty input")]
    Empty,
    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },
    #[error("frequencies not strictly increasing at sample {index}")]
    NotIncreasing { index: usize },
    #[error("energies not sorted at index {index}")]
    Unsorted { index: usize },
    #[error("trace {trace} is on a different frequency grid")]
    GridMismatch { trace: usize },
    #[error("frequency {frequency} Hz outside {lo}..{hi} Hz")]
    OutOfRange { frequency: f64, lo: f64, hi: f64 },
    #[error("anchor energies must be distinct")]
    DegenerateAnchor,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
