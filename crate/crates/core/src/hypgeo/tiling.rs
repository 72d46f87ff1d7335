use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::disk::{hyperbolic_distance, DiskPoint, Mirror};
use super::GeometryError;

/// Vertices closer than this hyperbolic distance are the same vertex.
pub const VERTEX_MERGE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_DEPTH: u32 = 4;
pub const DEFAULT_MAX_VERTICES: usize = 250_000;

/// Schläfli symbol `{p,q}` plus the number of reflection generations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingSpec {
    pub p: u32,
    pub q: u32,
    pub depth: u32,
}

impl TilingSpec {
    pub fn new(p: u32, q: u32, depth: u32) -> Result<Self, GeometryError> {
        let spec = TilingSpec { p, q, depth };
        spec.check_hyperbolic()?;
        Ok(spec)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.p >= 3 && self.q >= 3 && (self.p - 2) * (self.q - 2) > 4
    }

    fn check_hyperbolic(&self) -> Result<(), GeometryError> {
        if self.is_hyperbolic() {
            Ok(())
        } else {
            Err(GeometryError::NotHyperbolic { p: self.p, q: self.q })
        }
    }
}

/// Limits applied while generating a tiling.
#[derive(Debug, Clone, Copy)]
pub struct TilingLimits {
    pub max_depth: u32,
    pub max_vertices: usize,
}

impl Default for TilingLimits {
    fn default() -> Self {
        TilingLimits {
            max_depth: DEFAULT_MAX_DEPTH,
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

/// A finite patch of a regular `{p,q}` tiling of the disk.
///
/// Face 0 is the central polygon, whose vertices are `0..p` in
/// counter-clockwise order starting on the positive real axis. Every face is
/// stored in canonical cyclic form: smallest vertex index first, then the
/// direction whose second entry is smaller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tiling {
    pub spec: TilingSpec,
    pub vertices: Vec<DiskPoint>,
    pub faces: Vec<Vec<usize>>,
    pub generation: Vec<u32>,
}

impl Tiling {
    /// Unique undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self.faces.iter().flat_map(|f| face_edges(f)).collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Number of faces incident to each vertex.
    pub fn faces_per_vertex(&self) -> Vec<usize> {
        let mut counts = vec![0; self.vertices.len()];
        for f in &self.faces {
            for &v in f {
                counts[v] += 1;
            }
        }
        counts
    }

    /// Vertices whose full star of `q` faces was generated: every vertex of a
    /// face from a generation before the last.
    pub fn interior_vertices(&self) -> Vec<usize> {
        let mut interior = vec![false; self.vertices.len()];
        for (f, &g) in self.faces.iter().zip(&self.generation) {
            if g < self.spec.depth {
                for &v in f {
                    interior[v] = true;
                }
            }
        }
        (0..self.vertices.len()).filter(|&v| interior[v]).collect()
    }

    /// Faces containing vertex `v`.
    pub fn faces_at(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].contains(&v)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tiling serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Consecutive vertex pairs of a face cycle, each as `(min, max)`.
pub(crate) fn face_edges(face: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = face.len();
    (0..n).map(move |k| {
        let (a, b) = (face[k], face[(k + 1) % n]);
        (a.min(b), a.max(b))
    })
}

/// Rotates a cycle to start at its smallest entry and picks the direction
/// whose second entry is smaller.
pub(crate) fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let n = cycle.len();
    let start = (0..n).min_by_key(|&k| cycle[k]).unwrap_or(0);
    let forward: Vec<usize> = (0..n).map(|k| cycle[(start + k) % n]).collect();
    let backward: Vec<usize> = (0..n).map(|k| cycle[(start + n - k) % n]).collect();
    if forward <= backward {
        forward
    } else {
        backward
    }
}

/// Vertices of the central regular polygon: Euclidean radius
/// `sqrt(cos(π/p + π/q) / cos(π/p − π/q))`, first vertex on the positive
/// real axis, counter-clockwise.
pub fn central_polygon_vertices(spec: &TilingSpec) -> Result<Vec<DiskPoint>, GeometryError> {
    spec.check_hyperbolic()?;
    let (a, b) = (PI / spec.p as f64, PI / spec.q as f64);
    let radius = ((a + b).cos() / (a - b).cos()).sqrt();
    (0..spec.p)
        .map(|k| DiskPoint::from_polar(radius, 2.0 * PI * k as f64 / spec.p as f64))
        .collect()
}

/// Spatial hash over Euclidean cells of side `CELL`. Two points within the
/// merge tolerance are within `VERTEX_MERGE_TOLERANCE / 2` Euclidean (the
/// disk metric is at least twice the Euclidean one), so they always fall in
/// neighbouring cells.
struct VertexIndex {
    points: Vec<DiskPoint>,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl VertexIndex {
    const CELL: f64 = VERTEX_MERGE_TOLERANCE;

    fn new() -> Self {
        VertexIndex {
            points: Vec::new(),
            cells: HashMap::new(),
        }
    }

    fn cell(p: &DiskPoint) -> (i64, i64) {
        ((p.re() / Self::CELL).floor() as i64, (p.im() / Self::CELL).floor() as i64)
    }

    fn find(&self, p: &DiskPoint) -> Option<usize> {
        let (cx, cy) = Self::cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        if hyperbolic_distance(&self.points[id], p) < VERTEX_MERGE_TOLERANCE {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: DiskPoint, limit: usize) -> Result<usize, GeometryError> {
        if let Some(id) = self.find(&p) {
            return Ok(id);
        }
        if self.points.len() >= limit {
            return Err(GeometryError::CapacityExceeded { limit });
        }
        let id = self.points.len();
        self.points.push(p);
        self.cells.entry(Self::cell(&p)).or_default().push(id);
        Ok(id)
    }
}

pub fn generate_tiling(spec: &TilingSpec) -> Result<Tiling, GeometryError> {
    generate_tiling_with(spec, &TilingLimits::default())
}

/// Grows the tiling outward from the central polygon.
///
/// Generation `g + 1` consists of every face that shares at least a vertex
/// with a face of generation `g` and is not already present. The faces
/// around a vertex are found by reflecting repeatedly in the edges at that
/// vertex, so after `depth` generations every vertex of a face of
/// generation `< depth` carries its full star of `q` faces.
pub fn generate_tiling_with(spec: &TilingSpec, limits: &TilingLimits) -> Result<Tiling, GeometryError> {
    spec.check_hyperbolic()?;
    if spec.depth > limits.max_depth {
        return Err(GeometryError::DepthTooLarge {
            depth: spec.depth,
            max: limits.max_depth,
        });
    }

    let mut index = VertexIndex::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let mut generation: Vec<u32> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();

    let central: Vec<usize> = central_polygon_vertices(spec)?
        .into_iter()
        .map(|p| index.insert(p, limits.max_vertices))
        .collect::<Result<_, _>>()?;
    seen.insert(canonical_cycle(&central), 0);
    faces.push(canonical_cycle(&central));
    generation.push(0);

    let q = spec.q as usize;
    let mut frontier: Vec<usize> = vec![0];
    for g in 0..spec.depth {
        let mut next = Vec::new();
        for &f in &frontier {
            let face = faces[f].clone();
            let n = face.len();
            for k in 0..n {
                // Face as points, rotated so the pivot vertex comes first.
                let mut pts: Vec<DiskPoint> = (0..n).map(|i| index.points[face[(k + i) % n]]).collect();
                for _ in 1..q {
                    let mirror = Mirror::new(&pts[0], &pts[1])?;
                    let mut reflected = Vec::with_capacity(n);
                    reflected.push(pts[0]);
                    for p in pts[1..].iter().rev() {
                        reflected.push(mirror.apply(p)?);
                    }
                    pts = reflected;
                    let ids: Vec<usize> = pts
                        .iter()
                        .map(|p| index.insert(*p, limits.max_vertices))
                        .collect::<Result<_, _>>()?;
                    let key = canonical_cycle(&ids);
                    if !seen.contains_key(&key) {
                        seen.insert(key.clone(), faces.len());
                        next.push(faces.len());
                        faces.push(key);
                        generation.push(g + 1);
                    }
                }
            }
        }
        frontier = next;
    }

    Ok(Tiling {
        spec: *spec,
        vertices: index.points,
        faces,
        generation,
    })
}
