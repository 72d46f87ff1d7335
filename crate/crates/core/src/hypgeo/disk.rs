//! Points of the Poincaré disk and the isometries used to build tilings.
//!
//! All operations go through the Möbius map that sends one point to the
//! origin, so reflections and midpoints reduce to the radial case and never
//! have to form the (possibly huge) circle of a nearly straight geodesic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Anchors closer than this (hyperbolic length) do not determine a geodesic.
const DEGENERATE_TOLERANCE: f64 = 1e-12;

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self, GeometryError> {
        if !(re.is_finite() && im.is_finite()) || re * re + im * im >= 1.0 {
            return Err(GeometryError::OutsideDisk { re, im });
        }
        Ok(DiskPoint { re, im })
    }

    pub fn from_polar(radius: f64, angle: f64) -> Result<Self, GeometryError> {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    /// Euclidean modulus.
    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn euclidean_distance(&self, other: &DiskPoint) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }

    pub(crate) fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Wraps a value produced by an isometry of the disk. Rounding can push a
    /// point that belongs to the disk onto the unit circle; that is reported
    /// rather than clamped.
    pub(crate) fn from_complex(z: Complex64) -> Result<Self, GeometryError> {
        Self::new(z.re, z.im)
    }
}

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = GeometryError;

    fn try_from(value: [f64; 2]) -> Result<Self, Self::Error> {
        DiskPoint::new(value[0], value[1])
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.re, p.im]
    }
}

/// Möbius transformation of the disk sending `a` to the origin.
fn to_origin(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of [`to_origin`].
fn from_origin(a: Complex64, w: Complex64) -> Complex64 {
    (w + a) / (Complex64::new(1.0, 0.0) + a.conj() * w)
}

/// Hyperbolic distance in the Poincaré metric of curvature -1.
///
/// Evaluated as `2 asinh(|a-b| / sqrt((1-|a|²)(1-|b|²)))`, which equals
/// `arccosh(1 + 2|a-b|²/((1-|a|²)(1-|b|²)))` without the cancellation of
/// `arccosh` near 1.
pub fn hyperbolic_distance(a: &DiskPoint, b: &DiskPoint) -> f64 {
    let da = (1.0 - a.norm()) * (1.0 + a.norm());
    let db = (1.0 - b.norm()) * (1.0 + b.norm());
    2.0 * (a.euclidean_distance(b) / (da * db).sqrt()).asinh()
}

/// Reflection of `point` in the geodesic through `geodesic.0` and `geodesic.1`.
pub fn reflect(point: &DiskPoint, geodesic: (&DiskPoint, &DiskPoint)) -> Result<DiskPoint, GeometryError> {
    let mirror = Mirror::new(geodesic.0, geodesic.1)?;
    mirror.apply(point)
}

/// A precomputed reflection, reused when a whole polygon is mirrored.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Mirror {
    anchor: Complex64,
    /// Square of the unit direction of the geodesic after moving `anchor` to 0.
    rotation: Complex64,
}

impl Mirror {
    pub(crate) fn new(a: &DiskPoint, b: &DiskPoint) -> Result<Self, GeometryError> {
        if hyperbolic_distance(a, b) < DEGENERATE_TOLERANCE {
            return Err(GeometryError::DegenerateGeodesic);
        }
        let anchor = a.as_complex();
        let moved = to_origin(anchor, b.as_complex());
        let direction = moved / moved.norm();
        Ok(Mirror {
            anchor,
            rotation: direction * direction,
        })
    }

    pub(crate) fn apply(&self, p: &DiskPoint) -> Result<DiskPoint, GeometryError> {
        let w = to_origin(self.anchor, p.as_complex());
        DiskPoint::from_complex(from_origin(self.anchor, self.rotation * w.conj()))
    }
}

/// The point on the geodesic segment `ab` equidistant from both ends.
pub fn hyperbolic_midpoint(a: &DiskPoint, b: &DiskPoint) -> Result<DiskPoint, GeometryError> {
    if hyperbolic_distance(a, b) < DEGENERATE_TOLERANCE {
        return Err(GeometryError::DegenerateInput);
    }
    // Evaluate from the end nearer the origin so the swap a<->b differs only
    // by rounding inside an exactly symmetric formula.
    let (near, far) = if (a.norm_sqr(), a.re, a.im) <= (b.norm_sqr(), b.re, b.im) {
        (a, b)
    } else {
        (b, a)
    };
    let anchor = near.as_complex();
    let moved = to_origin(anchor, far.as_complex());
    let r = moved.norm();
    // tanh(artanh(r) / 2)
    let half = r / (1.0 + ((1.0 - r) * (1.0 + r)).sqrt());
    DiskPoint::from_complex(from_origin(anchor, moved * (half / r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(re: f64, im: f64) -> DiskPoint {
        DiskPoint::new(re, im).unwrap()
    }

    /// Length of the straight segment `a -> b` under the disk metric
    /// `2|dz| / (1 - |z|²)`, by composite Simpson quadrature. For a diameter
    /// this segment is the geodesic.
    fn radial_geodesic_length(a: &DiskPoint, b: &DiskPoint) -> f64 {
        let n = 20_000;
        let (dx, dy) = (b.re() - a.re(), b.im() - a.im());
        let speed = dx.hypot(dy);
        let f = |t: f64| {
            let (x, y) = (a.re() + t * dx, a.im() + t * dy);
            2.0 * speed / (1.0 - x * x - y * y)
        };
        let h = 1.0 / n as f64;
        let mut sum = f(0.0) + f(1.0);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(k as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn distance_of_coincident_points_is_zero() {
        assert_eq!(hyperbolic_distance(&DiskPoint::ORIGIN, &DiskPoint::ORIGIN), 0.0);
    }

    #[test]
    fn radial_distance_matches_closed_form_and_quadrature() {
        let z = DiskPoint::from_polar(0.5, 0.7).unwrap();
        let d = hyperbolic_distance(&DiskPoint::ORIGIN, &z);
        let closed = 2.0 * 0.5f64.atanh();
        assert!((d - closed).abs() < 1e-14);
        assert!((d - 1.098_612_288_668_109_7).abs() < 1e-12);
        assert!((d - radial_geodesic_length(&DiskPoint::ORIGIN, &z)).abs() < 1e-10);
    }

    #[test]
    fn points_on_or_outside_the_circle_are_rejected() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.8, 0.7).is_err());
        assert!(DiskPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn coincident_anchors_are_degenerate() {
        let a = point(0.1, 0.2);
        assert!(matches!(reflect(&a, (&a, &a)), Err(GeometryError::DegenerateGeodesic)));
        assert!(matches!(hyperbolic_midpoint(&a, &a), Err(GeometryError::DegenerateInput)));
    }

    #[test]
    fn diameter_reflection_is_a_mirror() {
        let a = point(-0.5, 0.0);
        let b = point(0.5, 0.0);
        let x = point(0.3, 0.4);
        let r = reflect(&x, (&a, &b)).unwrap();
        assert!((r.re() - 0.3).abs() < 1e-15 && (r.im() + 0.4).abs() < 1e-15);
    }

    #[test]
    fn midpoint_from_origin_is_radial_closed_form() {
        for r in [0.1, 0.5, 0.9, 0.999] {
            let b = point(r, 0.0);
            let m = hyperbolic_midpoint(&DiskPoint::ORIGIN, &b).unwrap();
            let expected = (r.atanh() / 2.0).tanh();
            assert!((m.re() - expected).abs() < 1e-14, "r={r}");
            assert!(m.im().abs() < 1e-15);
        }
    }

    fn disk_point() -> impl Strategy<Value = DiskPoint> {
        (0.0..0.95f64, 0.0..std::f64::consts::TAU)
            .prop_map(|(r, t)| DiskPoint::from_polar(r, t).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn distance_is_symmetric(a in disk_point(), b in disk_point()) {
            prop_assert_eq!(hyperbolic_distance(&a, &b), hyperbolic_distance(&b, &a));
        }

        #[test]
        fn reflection_is_an_involutive_isometry(
            x in disk_point(), y in disk_point(), g0 in disk_point(), g1 in disk_point()
        ) {
            prop_assume!(hyperbolic_distance(&g0, &g1) > 1e-3);
            let rx = reflect(&x, (&g0, &g1)).unwrap();
            let ry = reflect(&y, (&g0, &g1)).unwrap();
            let back = reflect(&rx, (&g0, &g1)).unwrap();
            prop_assert!(back.euclidean_distance(&x) < 1e-12);
            let d0 = hyperbolic_distance(&x, &y);
            let d1 = hyperbolic_distance(&rx, &ry);
            prop_assert!((d0 - d1).abs() < 1e-9 * d0.max(1.0));
        }

        #[test]
        fn geodesic_points_are_fixed(g0 in disk_point(), g1 in disk_point(), t in 0.0..1.0f64) {
            prop_assume!(hyperbolic_distance(&g0, &g1) > 1e-3);
            for anchor in [g0, g1] {
                let r = reflect(&anchor, (&g0, &g1)).unwrap();
                prop_assert!(r.euclidean_distance(&anchor) < 1e-12);
            }
            // Interior points of the geodesic, parametrised from g0.
            let a = g0.as_complex();
            let w = to_origin(a, g1.as_complex()) * t;
            let inner = DiskPoint::from_complex(from_origin(a, w)).unwrap();
            let r = reflect(&inner, (&g0, &g1)).unwrap();
            prop_assert!(r.euclidean_distance(&inner) < 1e-12);
        }

        #[test]
        fn midpoint_bisects(a in disk_point(), b in disk_point()) {
            prop_assume!(hyperbolic_distance(&a, &b) > 1e-6);
            let m = hyperbolic_midpoint(&a, &b).unwrap();
            let (da, db) = (hyperbolic_distance(&a, &m), hyperbolic_distance(&m, &b));
            prop_assert!((da - db).abs() < 1e-9);
            prop_assert!((da + db - hyperbolic_distance(&a, &b)).abs() < 1e-9);
            let swapped = hyperbolic_midpoint(&b, &a).unwrap();
            prop_assert!(m.euclidean_distance(&swapped) < 1e-12);
        }
    }
}
