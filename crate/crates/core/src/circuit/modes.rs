use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::sweep::NodalMatrices;
use super::{CircuitError, Netlist};

/// How port nodes are treated when computing free oscillations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortTermination {
    /// Port nodes tied to ground (a 50 Ω load is a near-short next to the
    /// femtofarad port capacitor).
    #[default]
    Short,
    /// Port nodes left floating.
    Open,
}

/// Undamped normal-mode frequencies (hertz, ascending) of the lossless part
/// of the network. Nodes without an inductive path carry no mode and are
/// folded into the capacitance matrix of the others.
pub fn normal_modes(net: &Netlist, termination: PortTermination) -> Result<Vec<f64>, CircuitError> {
    net.validate()?;
    let m = NodalMatrices::assemble(net);
    let n = m.capacitance.nrows();
    let ports: Vec<usize> = net.ports().iter().map(|p| p.node - 1).collect();
    let kept: Vec<usize> = (0..n)
        .filter(|k| termination == PortTermination::Open || !ports.contains(k))
        .collect();
    let (dynamic, passive): (Vec<usize>, Vec<usize>) =
        kept.iter().partition(|&&k| m.inverse_inductance[(k, k)] != 0.0);
    if dynamic.is_empty() {
        return Ok(Vec::new());
    }

    let sub = |a: &DMatrix<f64>, rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| a[(rows[r], cols[c])])
    };
    let mut c = sub(&m.capacitance, &dynamic, &dynamic);
    if !passive.is_empty() {
        let cpp = sub(&m.capacitance, &passive, &passive);
        let cpd = sub(&m.capacitance, &passive, &dynamic);
        let x = cpp
            .cholesky()
            .ok_or_else(|| CircuitError::Numerical("capacitance of floating nodes is not positive definite".into()))?
            .solve(&cpd);
        c -= cpd.transpose() * x;
    }
    let gamma = sub(&m.inverse_inductance, &dynamic, &dynamic);
    let chol = c
        .cholesky()
        .ok_or_else(|| CircuitError::Numerical("capacitance matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| CircuitError::Numerical("singular Cholesky factor".into()))?;
    let mut k = &l_inv * gamma * l_inv.transpose();
    k = (&k + k.transpose()) * 0.5;
    let mut freqs: Vec<f64> = k
        .symmetric_eigenvalues()
        .iter()
        .map(|&lambda| lambda.max(0.0).sqrt() / TAU)
        .collect();
    freqs.sort_by(f64::total_cmp);
    Ok(freqs)
}
