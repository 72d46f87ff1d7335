//! Hyperbolic geometry of the Poincaré disk and regular `{p,q}` tilings.

mod disk;
mod tiling;

pub use disk::{hyperbolic_distance, hyperbolic_midpoint, reflect, DiskPoint};
pub use tiling::{
    central_polygon_vertices, generate_tiling, generate_tiling_with, Tiling, TilingLimits, TilingSpec,
    DEFAULT_MAX_DEPTH, DEFAULT_MAX_VERTICES, VERTEX_MERGE_TOLERANCE,
};

pub(crate) use tiling::{canonical_cycle, face_edges};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("point ({re}, {im}) is not strictly inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },
    #[error("geodesic anchors coincide")]
    DegenerateGeodesic,
    #[error("midpoint of coincident points is undefined")]
    DegenerateInput,
    #[error("{{{p},{q}}} is not hyperbolic: need (p-2)(q-2) > 4")]
    NotHyperbolic { p: u32, q: u32 },
    #[error("depth {depth} exceeds the configured maximum {max}")]
    DepthTooLarge { depth: u32, max: u32 },
    #[error("vertex budget of {limit} exhausted before the requested depth")]
    CapacityExceeded { limit: usize },
}
