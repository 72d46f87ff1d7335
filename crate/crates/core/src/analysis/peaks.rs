use serde::{Deserialize, Serialize};

use super::{AnalysisError, Trace};

pub const DEFAULT_PROMINENCE_DB: f64 = 3.0;
pub const DEFAULT_PEAK_SEPARATION_HZ: f64 = 1e6;
pub const DEFAULT_CLUSTER_SEPARATION_HZ: f64 = 10e6;
pub const DEFAULT_CLUSTER_HEIGHT_DB: f64 = -40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Grid index in the source trace.
    pub index: usize,
    pub frequency: f64,
    pub height: f64,
    pub prominence: f64,
}

/// Peaks sorted by frequency.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.frequency).collect()
    }

    /// Index of the peak closest in frequency to `f`.
    pub fn nearest(&self, f: f64) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| {
            (self.peaks[a].frequency - f)
                .abs()
                .total_cmp(&(self.peaks[b].frequency - f).abs())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Indices into the peak set.
    pub members: Vec<usize>,
    pub span: (f64, f64),
    pub max_height: f64,
}

impl Cluster {
    pub fn centre(&self) -> f64 {
        0.5 * (self.span.0 + self.span.1)
    }

    pub fn distance_to(&self, f: f64) -> f64 {
        if f < self.span.0 {
            self.span.0 - f
        } else if f > self.span.1 {
            f - self.span.1
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    /// Peaks not in any cluster.
    pub unclustered: Vec<usize>,
}

impl ClusterSet {
    /// Frequency intervals between consecutive clusters.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.clusters.windows(2).map(|w| (w[0].span.1, w[1].span.0)).collect()
    }

    /// Index of the cluster containing or closest to `f`.
    pub fn nearest(&self, f: f64) -> Option<usize> {
        (0..self.clusters.len()).min_by(|&a, &b| {
            self.clusters[a]
                .distance_to(f)
                .total_cmp(&self.clusters[b].distance_to(f))
        })
    }
}

/// Local maxima (flat tops count once, at their middle sample), kept when
/// their prominence reaches `min_prominence` dB, then thinned so no two
/// survivors are closer than `min_separation` Hz; the higher peak wins.
pub fn find_peaks(trace: &Trace, min_prominence: f64, min_separation: f64) -> Result<PeakSet, AnalysisError> {
    if !(min_prominence > 0.0) || !(min_separation > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!(
            "prominence {min_prominence} dB, separation {min_separation} Hz"
        )));
    }
    let y = trace.transmission();
    let f = trace.frequencies();
    let n = y.len();

    let mut candidates = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i - 1] < y[i] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                candidates.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    let mut peaks: Vec<Peak> = candidates
        .into_iter()
        .map(|k| Peak {
            index: k,
            frequency: f[k],
            height: y[k],
            prominence: prominence(y, k),
        })
        .filter(|p| p.prominence >= min_prominence)
        .collect();

    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| peaks[b].height.total_cmp(&peaks[a].height).then(a.cmp(&b)));
    let mut keep = vec![false; peaks.len()];
    for &k in &order {
        let clear = (0..peaks.len()).all(|m| !keep[m] || (peaks[m].frequency - peaks[k].frequency).abs() >= min_separation);
        if clear {
            keep[k] = true;
        }
    }
    let mut k = 0;
    peaks.retain(|_| {
        k += 1;
        keep[k - 1]
    });
    Ok(PeakSet { peaks })
}

/// Height above the higher of the two lowest points reached before the
/// trace climbs above the peak on either side.
fn prominence(y: &[f64], k: usize) -> f64 {
    let h = y[k];
    let side_min = |range: &mut dyn Iterator<Item = usize>| {
        let mut lowest = h;
        for i in range {
            if y[i] > h {
                break;
            }
            lowest = lowest.min(y[i]);
        }
        lowest
    };
    let left = side_min(&mut (0..k).rev());
    let right = side_min(&mut (k + 1..y.len()));
    h - left.max(right)
}

/// Single-linkage grouping: neighbours at most `separation` apart share a
/// group. A group is a cluster when it has more than one peak and its
/// highest peak exceeds `height_threshold`; other peaks stay unclustered.
pub fn cluster_peaks(peaks: &PeakSet, height_threshold: f64, separation: f64) -> Result<ClusterSet, AnalysisError> {
    if !(separation > 0.0) {
        return Err(AnalysisError::InvalidParameter(format!("cluster separation {separation}")));
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, p) in peaks.peaks.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if p.frequency - peaks.peaks[*g.last().expect("non-empty group")].frequency <= separation => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut out = ClusterSet::default();
    for members in groups {
        let max_height = members.iter().map(|&k| peaks.peaks[k].height).fold(f64::NEG_INFINITY, f64::max);
        if members.len() > 1 && max_height > height_threshold {
            out.clusters.push(Cluster {
                span: (
                    peaks.peaks[members[0]].frequency,
                    peaks.peaks[*members.last().expect("non-empty group")].frequency,
                ),
                members,
                max_height,
            });
        } else {
            out.unclustered.extend(members);
        }
    }
    out.unclustered.sort_unstable();
    Ok(out)
}
