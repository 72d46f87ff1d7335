use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LatticeError, LatticeGraph, LatticeKind};
use crate::hypgeo::{canonical_cycle, face_edges, generate_tiling, Tiling, TilingSpec};

/// Which faces of a tiling make up a flake.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceSelection {
    /// The central polygon and every face sharing an edge with it.
    CenterPlusEdgeNeighbors,
    /// The central polygon plus, at each listed vertex position of it, the
    /// faces that touch it only at that vertex.
    CenterPlusVertexAttached(Vec<usize>),
    /// Face ids of the tiling.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlakeSpec {
    pub base: TilingSpec,
    pub selection: FaceSelection,
}

impl FlakeSpec {
    /// Generates a tiling deep enough for the selection and cuts the flake.
    pub fn build(&self) -> Result<LatticeGraph, LatticeError> {
        let mut base = self.base;
        if !matches!(self.selection, FaceSelection::Explicit(_)) {
            base.depth = base.depth.max(1);
        }
        let tiling = generate_tiling(&base)?;
        build_flake(&tiling, &self.selection)
    }
}

fn resolve(tiling: &Tiling, selection: &FaceSelection) -> Result<Vec<usize>, LatticeError> {
    let central = &tiling.faces[0];
    let shares_edge_with_center = |f: usize| {
        let center: BTreeSet<_> = face_edges(central).collect();
        face_edges(&tiling.faces[f]).any(|e| center.contains(&e))
    };
    match selection {
        FaceSelection::CenterPlusEdgeNeighbors => {
            let mut ids = vec![0];
            ids.extend((1..tiling.faces.len()).filter(|&f| shares_edge_with_center(f)));
            if tiling.spec.depth == 0 {
                return Err(LatticeError::MissingFace(1));
            }
            Ok(ids)
        }
        FaceSelection::CenterPlusVertexAttached(positions) => {
            if tiling.spec.depth == 0 {
                return Err(LatticeError::MissingFace(1));
            }
            let mut ids = vec![0];
            for &pos in positions {
                if pos >= central.len() {
                    return Err(LatticeError::BadVertexPosition {
                        position: pos,
                        p: tiling.spec.p,
                    });
                }
                // Central vertex ids equal their angular positions.
                let v = pos;
                let attached: Vec<usize> = tiling
                    .faces_at(v)
                    .into_iter()
                    .filter(|&f| f != 0 && !shares_edge_with_center(f))
                    .collect();
                if attached.is_empty() {
                    return Err(LatticeError::BadVertexPosition {
                        position: pos,
                        p: tiling.spec.p,
                    });
                }
                ids.extend(attached);
            }
            Ok(ids)
        }
        FaceSelection::Explicit(ids) => Ok(ids.clone()),
    }
}

/// Whether the faces form one patch when faces sharing a vertex are linked.
fn faces_connected(tiling: &Tiling, ids: &[usize]) -> bool {
    let mut reached = vec![false; ids.len()];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(a) = stack.pop() {
        let fa = &tiling.faces[ids[a]];
        for b in 0..ids.len() {
            if !reached[b] && tiling.faces[ids[b]].iter().any(|v| fa.contains(v)) {
                reached[b] = true;
                stack.push(b);
            }
        }
    }
    reached.iter().all(|&r| r)
}

/// A random edge-connected patch of `size` faces grown from a random face,
/// for property tests and synthetic examples.
pub fn random_patch<R: Rng + ?Sized>(tiling: &Tiling, size: usize, rng: &mut R) -> Vec<usize> {
    let edge_sets: Vec<BTreeSet<(usize, usize)>> = tiling.faces.iter().map(|f| face_edges(f).collect()).collect();
    let start = rng.random_range(0..tiling.faces.len());
    let mut patch = vec![start];
    while patch.len() < size {
        let candidates: Vec<usize> = (0..tiling.faces.len())
            .filter(|f| !patch.contains(f))
            .filter(|&f| patch.iter().any(|&g| !edge_sets[f].is_disjoint(&edge_sets[g])))
            .collect();
        match candidates.choose(rng) {
            Some(&f) => patch.push(f),
            None => break,
        }
    }
    patch
}

/// Induced graph of a set of tiling faces. Vertices are renumbered in
/// increasing tiling order; faces are kept as plaquettes.
pub fn build_flake(tiling: &Tiling, selection: &FaceSelection) -> Result<LatticeGraph, LatticeError> {
    let ids = resolve(tiling, selection)?;
    if ids.is_empty() {
        return Err(LatticeError::EmptySelection);
    }
    let mut unique = BTreeSet::new();
    for &f in &ids {
        if f >= tiling.faces.len() {
            return Err(LatticeError::MissingFace(f));
        }
        if !unique.insert(f) {
            return Err(LatticeError::DuplicateFace(f));
        }
    }
    if !faces_connected(tiling, &ids) {
        return Err(LatticeError::DisconnectedSelection);
    }

    let used: BTreeSet<usize> = ids.iter().flat_map(|&f| tiling.faces[f].iter().copied()).collect();
    let mut renumber = vec![usize::MAX; tiling.vertices.len()];
    for (new, &old) in used.iter().enumerate() {
        renumber[old] = new;
    }
    let vertices = used.iter().map(|&v| tiling.vertices[v]).collect();
    let faces: Vec<Vec<usize>> = ids
        .iter()
        .map(|&f| canonical_cycle(&tiling.faces[f].iter().map(|&v| renumber[v]).collect::<Vec<_>>()))
        .collect();
    let pairs: BTreeSet<(usize, usize)> = faces.iter().flat_map(|f| face_edges(f)).collect();
    let pairs: Vec<_> = pairs.into_iter().collect();
    LatticeGraph::new(LatticeKind::Parent, vertices, &pairs, faces)
}
