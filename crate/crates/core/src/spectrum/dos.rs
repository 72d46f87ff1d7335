use serde::{Deserialize, Serialize};

use super::{Spectrum, SpectrumError};

/// Normalized histogram of the energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosHistogram {
    pub bin_width: f64,
    /// `(bin centre, fraction of states)`.
    pub bins: Vec<(f64, f64)>,
}

/// Spectral gaps wider than a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapList {
    pub threshold: f64,
    /// `(lower edge, upper edge)` in ascending order.
    pub gaps: Vec<(f64, f64)>,
}

/// A group of numerically degenerate energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

/// Histogram with bins of `bin_width` laid out symmetrically about the
/// midpoint of `[min, max]`, so a spectrum symmetric about zero gives a
/// mirror-symmetric histogram.
pub fn dos(spec: &Spectrum, bin_width: f64) -> Result<DosHistogram, SpectrumError> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(SpectrumError::InvalidParameter(format!("bin width {bin_width}")));
    }
    let e = spec.energies();
    if e.is_empty() {
        return Ok(DosHistogram {
            bin_width,
            bins: Vec::new(),
        });
    }
    let (lo, hi) = (e[0], e[e.len() - 1]);
    let count = (((hi - lo) / bin_width) - 1e-9).ceil().max(1.0) as usize;
    let start = 0.5 * (lo + hi) - 0.5 * count as f64 * bin_width;
    let mut counts = vec![0usize; count];
    for &x in e {
        let k = ((x - start) / bin_width).floor().clamp(0.0, (count - 1) as f64) as usize;
        counts[k] += 1;
    }
    let total = e.len() as f64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| (start + (k as f64 + 0.5) * bin_width, c as f64 / total))
        .collect();
    Ok(DosHistogram { bin_width, bins })
}

/// Consecutive-energy differences larger than `threshold`.
pub fn detect_gaps(spec: &Spectrum, threshold: f64) -> Result<GapList, SpectrumError> {
    if !(threshold > 0.0) {
        return Err(SpectrumError::InvalidParameter(format!("gap threshold {threshold}")));
    }
    let gaps = spec
        .energies()
        .windows(2)
        .filter(|w| w[1] - w[0] > threshold)
        .map(|w| (w[0], w[1]))
        .collect();
    Ok(GapList { threshold, gaps })
}

/// Merges runs of energies whose consecutive spacing is within `tol`.
pub fn group_degeneracies(spec: &Spectrum, tol: f64) -> Result<Vec<Level>, SpectrumError> {
    if !(tol > 0.0) {
        return Err(SpectrumError::InvalidParameter(format!("degeneracy tolerance {tol}")));
    }
    let mut levels: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &x in spec.energies() {
        match levels.last_mut() {
            Some((sum, n)) if x - last <= tol => {
                *sum += x;
                *n += 1;
            }
            _ => levels.push((x, 1)),
        }
        last = x;
    }
    Ok(levels
        .into_iter()
        .map(|(sum, n)| Level {
            energy: sum / n as f64,
            multiplicity: n,
        })
        .collect())
}

/// Inverse participation ratio `Σ_i ψ_i⁴` of every eigenvector.
pub fn ipr(spec: &Spectrum) -> Vec<f64> {
    spec.vectors()
        .column_iter()
        .map(|c| c.iter().map(|x| x.powi(4)).sum())
        .collect()
}
