use serde::{Deserialize, Serialize};

use super::CircuitError;
use crate::lattice::{DistanceBasis, LatticeGraph};

/// Per-edge coupling capacitances, inversely proportional to edge length and
/// normalized so the longest edge carries `reference_capacitance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingPlan {
    reference_capacitance: f64,
    capacitances: Vec<f64>,
    basis: DistanceBasis,
}

impl CouplingPlan {
    /// Equal coupling on every edge.
    pub fn uniform(edge_count: usize, c_ref: f64) -> Result<Self, CircuitError> {
        check_capacitance("reference capacitance", c_ref)?;
        Ok(Self {
            reference_capacitance: c_ref,
            capacitances: vec![c_ref; edge_count],
            basis: DistanceBasis::default(),
        })
    }

    pub fn reference_capacitance(&self) -> f64 {
        self.reference_capacitance
    }

    /// One value per graph edge, in the graph's edge order.
    pub fn capacitances(&self) -> &[f64] {
        &self.capacitances
    }

    pub fn basis(&self) -> DistanceBasis {
        self.basis
    }

    /// Dimensionless hopping weights `C_ij / C_ref`.
    pub fn weights(&self) -> Vec<f64> {
        self.capacitances.iter().map(|c| c / self.reference_capacitance).collect()
    }

    /// Same ratios with a different reference capacitance.
    pub fn rescaled(&self, c_ref: f64) -> Result<Self, CircuitError> {
        check_capacitance("reference capacitance", c_ref)?;
        let k = c_ref / self.reference_capacitance;
        Ok(Self {
            reference_capacitance: c_ref,
            capacitances: self.capacitances.iter().map(|c| c * k).collect(),
            basis: self.basis,
        })
    }
}

pub fn derive_couplings(g: &LatticeGraph, c_ref: f64, basis: DistanceBasis) -> Result<CouplingPlan, CircuitError> {
    check_capacitance("reference capacitance", c_ref)?;
    let lengths: Vec<f64> = g.edges().iter().map(|e| e.length(basis)).collect();
    if let Some(edge) = lengths.iter().position(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(CircuitError::ZeroDistance { edge });
    }
    let d_max = lengths.iter().copied().fold(0.0, f64::max);
    Ok(CouplingPlan {
        reference_capacitance: c_ref,
        capacitances: lengths.iter().map(|&d| c_ref * (d_max / d)).collect(),
        basis,
    })
}

pub(crate) fn check_capacitance(what: &str, c: f64) -> Result<(), CircuitError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(CircuitError::InvalidValue(format!("{what} must be positive and finite, got {c}")))
    }
}
