use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{span_projector, SpectrumError};
use crate::lattice::{LatticeGraph, LatticeKind};

/// Flat-band state confined to the medial vertices of one parent plaquette.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactState {
    /// Index of the parent face hosting the state.
    pub plaquette: usize,
    /// `(medial vertex, amplitude)`, normalized.
    pub amplitudes: Vec<(usize, f64)>,
}

impl CompactState {
    pub fn support(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn ipr(&self) -> f64 {
        self.amplitudes.iter().map(|(_, a)| a.powi(4)).sum()
    }

    pub fn to_dense(&self, n: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        for &(k, a) in &self.amplitudes {
            v[k] = a;
        }
        v
    }
}

/// Compact localized states of a kagome-like lattice, one per plaquette.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClsSet {
    pub medial_vertices: usize,
    pub states: Vec<CompactState>,
}

impl ClsSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn support_sizes(&self) -> Vec<usize> {
        self.states.iter().map(CompactState::support).collect()
    }

    /// States as dense columns.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.states.iter().map(|s| s.to_dense(self.medial_vertices)).collect();
        if cols.is_empty() {
            DMatrix::zeros(self.medial_vertices, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// Largest `‖Aψ + 2ψ‖` over the states.
    pub fn max_residual(&self, adjacency: &DMatrix<f64>) -> f64 {
        self.states
            .iter()
            .map(|s| {
                let v = s.to_dense(self.medial_vertices);
                (adjacency * &v + &v * 2.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Numerical rank of the states (linear independence check).
    pub fn rank(&self) -> usize {
        self.to_matrix().rank(1e-10)
    }

    pub fn span_projector(&self) -> DMatrix<f64> {
        span_projector(&self.to_matrix())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("states serialize")
    }
}

/// Alternating `±1/√p` amplitudes on the edges of each even parent
/// plaquette. Around the plaquette the two neighbours of every medial
/// vertex carry the opposite sign, and any outside medial vertex touches the
/// plaquette through a parent vertex shared by two consecutive plaquette
/// edges, whose amplitudes cancel; hence `A ψ = −2 ψ`.
pub fn construct_cls(parent: &LatticeGraph, medial: &LatticeGraph) -> Result<ClsSet, SpectrumError> {
    if parent.kind() != LatticeKind::Parent || medial.kind() != LatticeKind::Medial {
        return Err(SpectrumError::MedialMismatch("expected a parent and its medial lattice".into()));
    }
    if medial.vertex_count() != parent.edge_count() {
        return Err(SpectrumError::MedialMismatch(format!(
            "{} medial vertices for {} parent edges",
            medial.vertex_count(),
            parent.edge_count()
        )));
    }
    let mut states = Vec::with_capacity(parent.face_count());
    for (f, face) in parent.faces().iter().enumerate() {
        let p = face.len();
        if p % 2 != 0 {
            return Err(SpectrumError::OddFace { face: f, len: p });
        }
        let norm = 1.0 / (p as f64).sqrt();
        let amplitudes = (0..p)
            .map(|k| {
                let edge = parent.edge_index(face[k], face[(k + 1) % p]).ok_or_else(|| {
                    SpectrumError::MedialMismatch(format!("face {f} uses a missing parent edge"))
                })?;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Ok((edge, sign * norm))
            })
            .collect::<Result<Vec<_>, SpectrumError>>()?;
        states.push(CompactState { plaquette: f, amplitudes });
    }
    Ok(ClsSet {
        medial_vertices: medial.vertex_count(),
        states,
    })
}
