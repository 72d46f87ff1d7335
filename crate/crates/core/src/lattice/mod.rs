//! Finite lattice samples ("flakes") cut from a tiling, their kagome-like
//! medial lattices, and cycle-space bookkeeping.

mod cycles;
mod flake;
mod medial;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::hypgeo::{hyperbolic_distance, DiskPoint, GeometryError};

pub use cycles::{bipartition, cycle_rank, is_bipartite, plaquette_cycles};
pub use flake::{build_flake, random_patch, FaceSelection, FlakeSpec};
pub use medial::medial_lattice;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("face selection is empty")]
    EmptySelection,
    #[error("face {0} is not part of the tiling")]
    MissingFace(usize),
    #[error("face {0} selected twice")]
    DuplicateFace(usize),
    #[error("vertex position {position} is out of range for a {p}-gon")]
    BadVertexPosition { position: usize, p: u32 },
    #[error("selected faces do not form a connected patch")]
    DisconnectedSelection,
    #[error("flake spec is for {expected:?} but the tiling is {found:?}")]
    TilingMismatch { expected: (u32, u32), found: (u32, u32) },
    #[error("operation needs a parent lattice, got a medial one")]
    NotParent,
    #[error("graph is not connected")]
    Disconnected,
    #[error("malformed lattice graph: {0}")]
    Malformed(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Parent,
    Medial,
}

/// Undirected edge with `i < j` and both length measures of the segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    /// Length of the chord in the projected (Euclidean) disk picture.
    pub euclidean: f64,
    pub hyperbolic: f64,
}

/// Which edge length drives coupling design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceBasis {
    #[default]
    Euclidean,
    Hyperbolic,
}

impl Edge {
    pub fn length(&self, basis: DistanceBasis) -> f64 {
        match basis {
            DistanceBasis::Euclidean => self.euclidean,
            DistanceBasis::Hyperbolic => self.hyperbolic,
        }
    }
}

/// Simple undirected graph with disk positions and recorded plaquettes.
/// Vertex ids are positions in `vertices`; edges are sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGraph {
    kind: LatticeKind,
    vertices: Vec<DiskPoint>,
    edges: Vec<Edge>,
    faces: Vec<Vec<usize>>,
}

impl LatticeGraph {
    /// Builds a graph from vertex positions and index pairs, computing both
    /// edge lengths. Pairs may come in either orientation; loops and
    /// duplicates are rejected.
    pub fn new(
        kind: LatticeKind,
        vertices: Vec<DiskPoint>,
        pairs: &[(usize, usize)],
        faces: Vec<Vec<usize>>,
    ) -> Result<Self, LatticeError> {
        let edges = pairs
            .iter()
            .map(|&(a, b)| {
                let (i, j) = (a.min(b), a.max(b));
                if j >= vertices.len() {
                    return Err(LatticeError::Malformed(format!("edge ({a}, {b}) references a missing vertex")));
                }
                Ok(Edge {
                    i,
                    j,
                    euclidean: vertices[i].euclidean_distance(&vertices[j]),
                    hyperbolic: hyperbolic_distance(&vertices[i], &vertices[j]),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut graph = LatticeGraph {
            kind,
            vertices,
            edges,
            faces,
        };
        graph.edges.sort_by_key(|e| (e.i, e.j));
        graph.validate()?;
        Ok(graph)
    }

    fn validate(&self) -> Result<(), LatticeError> {
        let n = self.vertices.len();
        for (k, e) in self.edges.iter().enumerate() {
            if e.i == e.j {
                return Err(LatticeError::Malformed(format!("loop at vertex {}", e.i)));
            }
            if e.i > e.j || e.j >= n {
                return Err(LatticeError::Malformed(format!("edge ({}, {}) is not canonical", e.i, e.j)));
            }
            if k > 0 && (self.edges[k - 1].i, self.edges[k - 1].j) >= (e.i, e.j) {
                return Err(LatticeError::Malformed(format!("duplicate or unsorted edge ({}, {})", e.i, e.j)));
            }
        }
        for f in &self.faces {
            if f.len() < 3 || f.iter().any(|&v| v >= n) {
                return Err(LatticeError::Malformed(format!("bad face {f:?}")));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn vertices(&self) -> &[DiskPoint] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Sorted neighbour lists.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Index of the edge joining `a` and `b`, if any.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by_key(&key, |e| (e.i, e.j)).ok()
    }

    pub(crate) fn edge_lookup(&self) -> HashMap<(usize, usize), usize> {
        self.edges.iter().enumerate().map(|(k, e)| ((e.i, e.j), k)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency_lists();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    /// Hop distances from `source` (`usize::MAX` when unreachable).
    pub fn hop_distances(&self, source: usize) -> Vec<usize> {
        let adj = self.adjacency_lists();
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices whose degree is below the maximum degree of the graph; on a
    /// flake these sit on the open boundary.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let deg = self.degrees();
        let max = deg.iter().copied().max().unwrap_or(0);
        (0..deg.len()).filter(|&v| deg[v] < max).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LatticeFile::from(self)).expect("lattice serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LatticeError> {
        let file: LatticeFile = serde_json::from_str(text).map_err(|e| LatticeError::Malformed(e.to_string()))?;
        file.try_into()
    }
}

/// On-disk layout: `{"kind", "vertices":[[id,re,im]], "edges":[[i,j,d_eu,d_hyp]], "faces":[[...]]}`.
#[derive(Serialize, Deserialize)]
struct LatticeFile {
    kind: LatticeKind,
    vertices: Vec<(usize, f64, f64)>,
    edges: Vec<(usize, usize, f64, f64)>,
    faces: Vec<Vec<usize>>,
}

impl From<&LatticeGraph> for LatticeFile {
    fn from(g: &LatticeGraph) -> Self {
        LatticeFile {
            kind: g.kind,
            vertices: g.vertices.iter().enumerate().map(|(k, p)| (k, p.re(), p.im())).collect(),
            edges: g.edges.iter().map(|e| (e.i, e.j, e.euclidean, e.hyperbolic)).collect(),
            faces: g.faces.clone(),
        }
    }
}

impl TryFrom<LatticeFile> for LatticeGraph {
    type Error = LatticeError;

    fn try_from(file: LatticeFile) -> Result<Self, Self::Error> {
        let mut vertices = Vec::with_capacity(file.vertices.len());
        for (k, &(id, re, im)) in file.vertices.iter().enumerate() {
            if id != k {
                return Err(LatticeError::Malformed(format!("vertex ids must be 0..n in order, found {id} at {k}")));
            }
            vertices.push(DiskPoint::new(re, im)?);
        }
        let edges = file
            .edges
            .iter()
            .map(|&(i, j, euclidean, hyperbolic)| Edge {
                i,
                j,
                euclidean,
                hyperbolic,
            })
            .collect();
        let graph = LatticeGraph {
            kind: file.kind,
            vertices,
            edges,
            faces: file.faces,
        };
        graph.validate()?;
        Ok(graph)
    }
}
