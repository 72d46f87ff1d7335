use super::{LatticeError, LatticeGraph, LatticeKind};
use crate::hypgeo::{canonical_cycle, hyperbolic_midpoint, DiskPoint};

/// Kagome-like (medial) lattice: one vertex per parent edge at its
/// hyperbolic midpoint, adjacent when the parent edges share an endpoint.
///
/// Medial vertex `k` is parent edge `k`. Faces are the parent plaquettes
/// (as cycles of their edges) followed by one polygon per parent vertex of
/// degree ≥ 3, its edges taken in angular order around the vertex.
pub fn medial_lattice(parent: &LatticeGraph) -> Result<LatticeGraph, LatticeError> {
    if parent.kind() != LatticeKind::Parent {
        return Err(LatticeError::NotParent);
    }
    let pv = parent.vertices();
    let vertices = parent
        .edges()
        .iter()
        .map(|e| hyperbolic_midpoint(&pv[e.i], &pv[e.j]))
        .collect::<Result<Vec<DiskPoint>, _>>()?;

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); pv.len()];
    for (k, e) in parent.edges().iter().enumerate() {
        incident[e.i].push(k);
        incident[e.j].push(k);
    }

    let mut pairs = Vec::new();
    for star in &incident {
        for (x, &a) in star.iter().enumerate() {
            for &b in &star[x + 1..] {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }

    let lookup = parent.edge_lookup();
    let mut faces = Vec::with_capacity(parent.face_count() + pv.len());
    for face in parent.faces() {
        let n = face.len();
        let cycle: Option<Vec<usize>> = (0..n)
            .map(|k| {
                let (a, b) = (face[k], face[(k + 1) % n]);
                lookup.get(&(a.min(b), a.max(b))).copied()
            })
            .collect();
        let cycle = cycle.ok_or_else(|| LatticeError::Malformed(format!("face {face:?} uses a missing edge")))?;
        faces.push(canonical_cycle(&cycle));
    }
    for (v, star) in incident.iter().enumerate() {
        if star.len() < 3 {
            continue;
        }
        let mut around = star.clone();
        let angle = |k: usize| {
            let e = &parent.edges()[k];
            let w = if e.i == v { e.j } else { e.i };
            (pv[w].im() - pv[v].im()).atan2(pv[w].re() - pv[v].re())
        };
        around.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
        faces.push(canonical_cycle(&around));
    }

    LatticeGraph::new(LatticeKind::Medial, vertices, &pairs, faces)
}
