use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::netlist::{resonator_network, site_node};
use super::{CircuitDesign, CircuitError, CouplingPlan, Netlist};
use crate::lattice::{LatticeGraph, LatticeKind};

/// Effective network left after eliminating a floating coupler island.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerReduction {
    /// `(a, b, C_a C_b / S)` for every branch pair, `S = C_g + Σ C_k`.
    pub mutual: Vec<(usize, usize, f64)>,
    /// `(a, C_a C_g / S)`: capacitance from branch `a` straight to ground.
    pub shunt: Vec<(usize, f64)>,
    /// `(a, C_a (C_g + Σ_{k≠a} C_k) / S)`: total capacitance the coupler
    /// adds to the diagonal of resonator `a`.
    pub diagonal: Vec<(usize, f64)>,
}

impl CouplerReduction {
    /// Reduced Maxwell capacitance matrix over the branches, in branch order.
    pub fn maxwell_matrix(&self) -> DMatrix<f64> {
        let ids: Vec<usize> = self.diagonal.iter().map(|d| d.0).collect();
        let pos = |id: usize| ids.iter().position(|&x| x == id).expect("branch id");
        let mut m = DMatrix::zeros(ids.len(), ids.len());
        for (k, &(_, d)) in self.diagonal.iter().enumerate() {
            m[(k, k)] = d;
        }
        for &(a, b, c) in &self.mutual {
            m[(pos(a), pos(b))] = -c;
            m[(pos(b), pos(a))] = -c;
        }
        m
    }

    pub fn coupling(&self, a: usize, b: usize) -> Option<f64> {
        self.mutual
            .iter()
            .find(|&&(x, y, _)| (x, y) == (a, b) || (y, x) == (a, b))
            .map(|m| m.2)
    }
}

/// Eliminates the island node of a multi-way coupler. `island_caps` pairs a
/// resonator id with the capacitance from that resonator to the island.
pub fn reduce_coupler(island_caps: &[(usize, f64)], ground_cap: f64) -> Result<CouplerReduction, CircuitError> {
    if island_caps.len() < 2 {
        return Err(CircuitError::Degenerate("a coupler needs at least two branches".into()));
    }
    if !(ground_cap >= 0.0 && ground_cap.is_finite()) {
        return Err(CircuitError::InvalidValue(format!("island ground capacitance {ground_cap}")));
    }
    for (k, &(id, c)) in island_caps.iter().enumerate() {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CircuitError::Degenerate(format!("branch {id} has capacitance {c}")));
        }
        if island_caps[..k].iter().any(|b| b.0 == id) {
            return Err(CircuitError::InvalidValue(format!("resonator {id} appears twice on one coupler")));
        }
    }
    let total: f64 = ground_cap + island_caps.iter().map(|b| b.1).sum::<f64>();
    let mut mutual = Vec::new();
    for (k, &(a, ca)) in island_caps.iter().enumerate() {
        for &(b, cb) in &island_caps[k + 1..] {
            mutual.push((a, b, ca * cb / total));
        }
    }
    let shunt = island_caps.iter().map(|&(a, ca)| (a, ca * ground_cap / total)).collect();
    let diagonal = island_caps.iter().map(|&(a, ca)| (a, ca * (total - ca) / total)).collect();
    Ok(CouplerReduction { mutual, shunt, diagonal })
}

/// One coupler: the island hangs off `branches` and has `ground` to ground.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupler {
    /// Parent vertex the coupler sits on.
    pub vertex: usize,
    pub ground: f64,
    /// `(medial vertex, branch capacitance)`.
    pub branches: Vec<(usize, f64)>,
}

/// Branch capacitances whose reduced couplings approximate `targets`.
///
/// The reduced coupling is `C_a C_b / S`. Writing `C_a = x_a s` with
/// `s² = s Σx + C_g` turns it into `x_a x_b`, so the fit is a rank-one
/// problem, solved in log space (exact for up to three branches).
pub fn synthesize_coupler(
    branches: &[usize],
    targets: &[(usize, usize, f64)],
    ground_cap: f64,
) -> Result<Vec<(usize, f64)>, CircuitError> {
    let k = branches.len();
    if k < 2 || targets.is_empty() {
        return Err(CircuitError::Degenerate("a coupler needs at least two branches".into()));
    }
    let pos = |id: usize| {
        branches
            .iter()
            .position(|&b| b == id)
            .ok_or_else(|| CircuitError::InvalidValue(format!("target uses resonator {id} not on the coupler")))
    };
    let mut a = DMatrix::zeros(targets.len(), k);
    let mut rhs = DVector::zeros(targets.len());
    for (row, &(x, y, c)) in targets.iter().enumerate() {
        if !(c > 0.0 && c.is_finite()) {
            return Err(CircuitError::InvalidValue(format!("target coupling {c}")));
        }
        a[(row, pos(x)?)] = 1.0;
        a[(row, pos(y)?)] = 1.0;
        rhs[row] = c.ln();
    }
    let logs = a
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| CircuitError::Numerical(e.to_string()))?;
    let x: Vec<f64> = logs.iter().map(|v| v.exp()).collect();
    let sum: f64 = x.iter().sum();
    let s = 0.5 * (sum + (sum * sum + 4.0 * ground_cap).sqrt());
    Ok(branches.iter().zip(&x).map(|(&b, &xb)| (b, xb * s)).collect())
}

/// How a kagome-like lattice is wired: one coupler per parent vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerNetwork {
    pub sites: usize,
    pub couplers: Vec<Coupler>,
}

impl CouplerNetwork {
    /// Couplers whose reduced couplings reproduce `plan` on the medial
    /// lattice as closely as a rank-one fit allows.
    pub fn design(
        parent: &LatticeGraph,
        medial: &LatticeGraph,
        plan: &CouplingPlan,
        ground_cap: f64,
    ) -> Result<Self, CircuitError> {
        if parent.kind() != LatticeKind::Parent
            || medial.kind() != LatticeKind::Medial
            || medial.vertex_count() != parent.edge_count()
        {
            return Err(CircuitError::InvalidValue("expected a parent lattice and its medial lattice".into()));
        }
        if plan.capacitances().len() != medial.edge_count() {
            return Err(CircuitError::PlanMismatch {
                plan: plan.capacitances().len(),
                edges: medial.edge_count(),
            });
        }
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); parent.vertex_count()];
        for (k, e) in parent.edges().iter().enumerate() {
            incident[e.i].push(k);
            incident[e.j].push(k);
        }
        let mut couplers = Vec::new();
        for (vertex, branches) in incident.into_iter().enumerate() {
            if branches.len() < 2 {
                continue;
            }
            let mut targets = Vec::new();
            for (x, &a) in branches.iter().enumerate() {
                for &b in &branches[x + 1..] {
                    let edge = medial.edge_index(a, b).ok_or_else(|| {
                        CircuitError::InvalidValue(format!("medial edge {a}-{b} missing"))
                    })?;
                    targets.push((a, b, plan.capacitances()[edge]));
                }
            }
            couplers.push(Coupler {
                vertex,
                ground: ground_cap,
                branches: synthesize_coupler(&branches, &targets, ground_cap)?,
            });
        }
        Ok(Self {
            sites: medial.vertex_count(),
            couplers,
        })
    }

    pub fn reductions(&self) -> Result<Vec<CouplerReduction>, CircuitError> {
        self.couplers.iter().map(|c| reduce_coupler(&c.branches, c.ground)).collect()
    }

    /// Count of couplers by number of branches, e.g. `[(2, 32), (3, 16)]`.
    pub fn way_counts(&self) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for c in &self.couplers {
            *counts.entry(c.branches.len()).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    /// Largest relative deviation of a realized coupling from the plan.
    pub fn fit_error(&self, medial: &LatticeGraph, plan: &CouplingPlan) -> Result<f64, CircuitError> {
        let mut worst: f64 = 0.0;
        for r in self.reductions()? {
            for &(a, b, c) in &r.mutual {
                let target = medial
                    .edge_index(a, b)
                    .map(|e| plan.capacitances()[e])
                    .ok_or_else(|| CircuitError::InvalidValue(format!("medial edge {a}-{b} missing")))?;
                worst = worst.max((c / target - 1.0).abs());
            }
        }
        Ok(worst)
    }

    /// Netlist with every island kept as its own node.
    pub fn explicit_netlist(&self, design: &CircuitDesign, port_vertices: &[usize]) -> Result<Netlist, CircuitError> {
        let reductions = self.reductions()?;
        let load = self.diagonal_load(&reductions);
        let mut caps = Vec::new();
        for (k, c) in self.couplers.iter().enumerate() {
            let island = self.sites + 1 + k;
            for &(site, cap) in &c.branches {
                caps.push((site_node(site), island, cap));
            }
            if c.ground > 0.0 {
                caps.push((island, 0, c.ground));
            }
        }
        let mut net = resonator_network(self.sites, self.couplers.len(), &caps, &load, design, port_vertices)?;
        net.add_comment(format!(
            " {} sites with {} explicit coupler islands",
            self.sites,
            self.couplers.len()
        ));
        Ok(net)
    }

    /// Netlist after eliminating every island.
    pub fn reduced_netlist(&self, design: &CircuitDesign, port_vertices: &[usize]) -> Result<Netlist, CircuitError> {
        let reductions = self.reductions()?;
        let load = self.diagonal_load(&reductions);
        let mut caps = Vec::new();
        for r in &reductions {
            for &(a, b, c) in &r.mutual {
                caps.push((site_node(a), site_node(b), c));
            }
            for &(a, c) in &r.shunt {
                if c > 0.0 {
                    caps.push((site_node(a), 0, c));
                }
            }
        }
        let mut net = resonator_network(self.sites, 0, &caps, &load, design, port_vertices)?;
        net.add_comment(format!(
            " {} sites, {} couplers reduced to pairwise capacitors",
            self.sites,
            self.couplers.len()
        ));
        Ok(net)
    }

    fn diagonal_load(&self, reductions: &[CouplerReduction]) -> Vec<f64> {
        let mut load = vec![0.0; self.sites];
        for r in reductions {
            for &(a, d) in &r.diagonal {
                load[a] += d;
            }
        }
        load
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeo::TilingSpec;
    use crate::lattice::{medial_lattice, DistanceBasis, FaceSelection, FlakeSpec};
    use crate::circuit::derive_couplings;
    use proptest::prelude::*;

    /// Schur complement of the island row/column of the full Maxwell matrix
    /// `[branches..., island]`, computed directly.
    fn schur_oracle(caps: &[f64], cg: f64) -> DMatrix<f64> {
        let k = caps.len();
        let mut m = DMatrix::<f64>::zeros(k + 1, k + 1);
        for (a, &c) in caps.iter().enumerate() {
            m[(a, a)] += c;
            m[(k, k)] += c;
            m[(a, k)] -= c;
            m[(k, a)] -= c;
        }
        m[(k, k)] += cg;
        let top = m.view((0, 0), (k, k)).into_owned();
        let col = m.view((0, k), (k, 1)).into_owned();
        top - &col * col.transpose() / m[(k, k)]
    }

    #[test]
    fn two_equal_branches_in_series() {
        let r = reduce_coupler(&[(0, 2e-15), (1, 2e-15)], 0.0).unwrap();
        assert!((r.coupling(0, 1).unwrap() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn three_equal_branches_share_a_third() {
        let r = reduce_coupler(&[(0, 3e-15), (1, 3e-15), (2, 3e-15)], 0.0).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert!((r.coupling(a, b).unwrap() - 1e-15).abs() < 1e-27);
        }
        let oracle = schur_oracle(&[3e-15; 3], 0.0);
        assert!((r.maxwell_matrix() - oracle).amax() < 1e-27);
    }

    #[test]
    fn degenerate_couplers_are_rejected() {
        assert!(reduce_coupler(&[(0, 1e-15)], 0.0).is_err());
        assert!(reduce_coupler(&[(0, 0.0), (1, 0.0)], 0.0).is_err());
        assert!(reduce_coupler(&[(0, 1e-15), (0, 1e-15)], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn reduction_equals_schur_elimination(
            caps in prop::collection::vec(0.1f64..10.0, 2..6),
            cg in 0.0f64..5.0,
        ) {
            let branches: Vec<(usize, f64)> = caps.iter().enumerate().map(|(k, &c)| (k, c)).collect();
            let r = reduce_coupler(&branches, cg).unwrap();
            let oracle = schur_oracle(&caps, cg);
            prop_assert!((r.maxwell_matrix() - &oracle).amax() < 1e-12);
            for (k, &(_, s)) in r.shunt.iter().enumerate() {
                // row sums of the reduced matrix are the capacitances to ground
                prop_assert!((oracle.row(k).sum() - s).abs() < 1e-12);
            }
        }

        #[test]
        fn three_way_synthesis_is_exact(
            c in prop::collection::vec(0.5f64..2.0, 3),
            cg in 0.0f64..3.0,
        ) {
            let targets = [(0, 1, c[0]), (0, 2, c[1]), (1, 2, c[2])];
            let branches = synthesize_coupler(&[0, 1, 2], &targets, cg).unwrap();
            let r = reduce_coupler(&branches, cg).unwrap();
            for &(a, b, t) in &targets {
                prop_assert!((r.coupling(a, b).unwrap() / t - 1.0).abs() < 1e-9);
            }
        }
    }

    fn kagome_octagon() -> (LatticeGraph, LatticeGraph) {
        let parent = FlakeSpec {
            base: TilingSpec::new(8, 3, 1).unwrap(),
            selection: FaceSelection::CenterPlusEdgeNeighbors,
        }
        .build()
        .unwrap();
        let medial = medial_lattice(&parent).unwrap();
        (parent, medial)
    }

    #[test]
    fn kagome_octagon_uses_48_couplers() {
        let (parent, medial) = kagome_octagon();
        let plan = derive_couplings(&medial, 1e-15, DistanceBasis::Euclidean).unwrap();
        let net = CouplerNetwork::design(&parent, &medial, &plan, 0.0).unwrap();
        assert_eq!(net.couplers.len(), 48);
        assert_eq!(net.way_counts(), vec![(2, 32), (3, 16)]);
        assert!(net.fit_error(&medial, &plan).unwrap() < 1e-9);
    }

    #[test]
    fn four_way_fit_is_exact_for_uniform_targets() {
        let targets = [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)];
        let branches = synthesize_coupler(&[0, 1, 2, 3], &targets, 0.0).unwrap();
        let r = reduce_coupler(&branches, 0.0).unwrap();
        for &(a, b, t) in &targets {
            assert!((r.coupling(a, b).unwrap() - t).abs() < 1e-12);
        }
        assert!(branches.iter().all(|b| (b.1 - 4.0).abs() < 1e-12));
    }
}
