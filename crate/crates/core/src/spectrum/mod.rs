//! Tight-binding spectra of lattice graphs.
//!
//! Energies are eigenvalues of `+A` (or of the weighted adjacency matrix) in
//! units of the hopping `|t|`.

mod cls;
mod dos;
mod report;

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::circuit::CouplingPlan;
use crate::lattice::LatticeGraph;

pub use cls::{construct_cls, ClsSet, CompactState};
pub use dos::{detect_gaps, dos, group_degeneracies, ipr, DosHistogram, GapList, Level};
pub use report::SpectrumReport;

pub const DEFAULT_DOS_BIN_WIDTH: f64 = 0.03;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.25;
/// Eigenpairs with a residual above this (relative to the matrix norm) are
/// reported as a numerical failure.
pub const RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("coupling plan has {plan} edge values for a graph with {graph} edges")]
    WeightMismatch { plan: usize, graph: usize },
    #[error("eigendecomposition residual {max_residual:e} exceeds {limit:e}")]
    Numerical { max_residual: f64, limit: f64 },
    #[error("plaquette {face} has odd length {len}; alternating states need even faces")]
    OddFace { face: usize, len: usize },
    #[error("medial lattice does not match the parent: {0}")]
    MedialMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// How edges enter the hopping matrix.
#[derive(Debug, Clone, Copy)]
pub enum Weighting<'a> {
    /// Every edge has hopping 1.
    Uniform,
    /// Edge hopping `C_ij / C_ref` from a coupling plan.
    Capacitive(&'a CouplingPlan),
}

/// Sorted energies with an orthonormal eigenvector per energy (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
    weighted: bool,
}

impl Spectrum {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn eigenvector(&self, k: usize) -> DVectorView<'_, f64> {
        self.vectors.column(k)
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Eigenvectors whose energy lies within `tol` of `energy`, as columns.
    pub fn eigenspace(&self, energy: f64, tol: f64) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = (0..self.len())
            .filter(|&k| (self.energies[k] - energy).abs() <= tol)
            .map(|k| self.vectors.column(k).into_owned())
            .collect();
        if cols.is_empty() {
            DMatrix::zeros(self.vectors.nrows(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }
}

/// Dense hopping matrix of the graph.
pub fn adjacency_matrix(g: &LatticeGraph, weighting: Weighting<'_>) -> Result<DMatrix<f64>, SpectrumError> {
    let n = g.vertex_count();
    let mut a = DMatrix::zeros(n, n);
    match weighting {
        Weighting::Uniform => {
            for e in g.edges() {
                a[(e.i, e.j)] = 1.0;
                a[(e.j, e.i)] = 1.0;
            }
        }
        Weighting::Capacitive(plan) => {
            let caps = plan.capacitances();
            if caps.len() != g.edge_count() {
                return Err(SpectrumError::WeightMismatch {
                    plan: caps.len(),
                    graph: g.edge_count(),
                });
            }
            for (e, c) in g.edges().iter().zip(caps) {
                let w = c / plan.reference_capacitance();
                a[(e.i, e.j)] = w;
                a[(e.j, e.i)] = w;
            }
        }
    }
    Ok(a)
}

/// Full eigendecomposition of the (weighted) adjacency matrix.
pub fn adjacency_energies(g: &LatticeGraph, weighting: Weighting<'_>) -> Result<Spectrum, SpectrumError> {
    if !g.is_connected() {
        return Err(SpectrumError::Disconnected);
    }
    let a = adjacency_matrix(g, weighting)?;
    let spectrum = diagonalize(&a)?;
    Ok(Spectrum {
        weighted: matches!(weighting, Weighting::Capacitive(_)),
        ..spectrum
    })
}

/// Eigendecomposition of a real symmetric matrix, sorted ascending, with a
/// residual check on every pair.
pub fn diagonalize(a: &DMatrix<f64>) -> Result<Spectrum, SpectrumError> {
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<DVector<f64>> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    let vectors = if cols.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        DMatrix::from_columns(&cols)
    };

    let scale = a.norm().max(1.0);
    let limit = RESIDUAL_LIMIT * scale;
    let max_residual = energies
        .iter()
        .zip(&cols)
        .map(|(&e, v)| (a * v - v * e).norm())
        .fold(0.0, f64::max);
    if !(max_residual <= limit) {
        return Err(SpectrumError::Numerical { max_residual, limit });
    }
    Ok(Spectrum {
        energies,
        vectors,
        weighted: false,
    })
}

/// Orthogonal projector onto the column span of `basis`.
pub fn span_projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        return DMatrix::zeros(n, n);
    }
    let svd = basis.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let mut p = DMatrix::zeros(n, n);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-10 * smax {
            let col = u.column(k);
            p += col * col.transpose();
        }
    }
    p
}
