//! Unit-sphere primitives shared by the grid and geometry modules.
//!
//! Points live on the unit sphere as 3-vectors; edges are minor geodesic
//! arcs between consecutive points. All predicates take an explicit
//! angular tolerance so callers decide what "coincident" means.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Angular distance (radians) below which two boundaries are coincident.
pub const TOUCH_TOLERANCE: f64 = 1e-12;

/// A geographic coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLng {
    pub lat: f64,
    pub lng: f64,
}

impl LatLng {
    /// Builds a normalized coordinate. Longitudes wrap into (-180, 180];
    /// latitudes outside [-90, 90] and non-finite values are rejected.
    pub fn new(lat: f64, lng: f64) -> Result<Self, CoordinateError> {
        if !lat.is_finite() || !lng.is_finite() {
            return Err(CoordinateError::NonFinite);
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(CoordinateError::LatitudeOutOfRange(lat));
        }
        Ok(Self::normalized(lat, lng))
    }

    fn normalized(lat: f64, lng: f64) -> Self {
        if lat == 90.0 || lat == -90.0 {
            return LatLng { lat, lng: 0.0 };
        }
        let mut lng = lng % 360.0;
        if lng <= -180.0 {
            lng += 360.0;
        } else if lng > 180.0 {
            lng -= 360.0;
        }
        // -0.0 and 0.0 must serialize identically
        if lng == 0.0 {
            lng = 0.0;
        }
        LatLng { lat, lng }
    }

    pub fn to_point(self) -> Point3 {
        let (phi, theta) = (self.lat.to_radians(), self.lng.to_radians());
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        Point3::new(cp * ct, cp * st, sp)
    }

    pub fn from_point(p: Point3) -> Self {
        let lat = p.z.atan2((p.x * p.x + p.y * p.y).sqrt()).to_degrees();
        let lng = p.y.atan2(p.x).to_degrees();
        Self::normalized(lat.clamp(-90.0, 90.0), lng)
    }
}

impl fmt::Display for LatLng {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lat, self.lng)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoordinateError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("latitude {0} outside [-90, 90]")]
    LatitudeOutOfRange(f64),
}

/// A 3-vector; unit length when it represents a point on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalize(self) -> Point3 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    /// Angle between two unit vectors, accurate for tiny and near-π angles.
    pub fn angle(self, o: Point3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    pub fn abs_max_axis(self) -> usize {
        let (ax, ay, az) = (self.x.abs(), self.y.abs(), self.z.abs());
        if ax >= ay && ax >= az {
            0
        } else if ay >= az {
            1
        } else {
            2
        }
    }

    pub fn component(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Normal of the great circle through `a` and `b` (not normalized).
///
/// Computed as (b + a) × (b − a), which equals 2(a × b) but keeps its
/// direction accurate when `a` and `b` are very close together.
pub fn robust_cross(a: Point3, b: Point3) -> Point3 {
    (b + a).cross(b - a)
}

/// Signed angular offset of `p` from the great circle a→b (positive on the
/// left). Returns 0 for degenerate edges.
pub fn side_distance(a: Point3, b: Point3, p: Point3) -> f64 {
    let n = robust_cross(a, b);
    let len = n.norm();
    if len == 0.0 {
        return 0.0;
    }
    (p.dot(n) / len).clamp(-1.0, 1.0).asin()
}

/// Orientation of the triple with a dead band of `tol` radians around the
/// great circle a→b: +1 left, -1 right, 0 within tolerance.
pub fn orientation(a: Point3, b: Point3, p: Point3, tol: f64) -> i32 {
    let d = side_distance(a, b, p);
    if d > tol {
        1
    } else if d < -tol {
        -1
    } else {
        0
    }
}

/// Angular distance from `p` to the minor arc a→b.
pub fn distance_to_edge(p: Point3, a: Point3, b: Point3) -> f64 {
    let n = robust_cross(a, b);
    let len = n.norm();
    if len > 0.0 {
        let n = n * (1.0 / len);
        // p lies in the lune spanned by the arc iff it is on the inner side
        // of both end-point planes.
        let inside_a = n.cross(a).dot(p) >= 0.0;
        let inside_b = b.cross(n).dot(p) >= 0.0;
        if inside_a && inside_b {
            return p.dot(n).clamp(-1.0, 1.0).asin().abs();
        }
    }
    p.angle(a).min(p.angle(b))
}

/// True when the minor arcs a→b and c→d cross at a point interior to both,
/// with every orientation clear of the tolerance band.
pub fn crosses_properly(a: Point3, b: Point3, c: Point3, d: Point3, tol: f64) -> bool {
    let acb = -orientation(a, b, c, tol);
    if acb == 0 {
        return false;
    }
    let bda = orientation(a, b, d, tol);
    if bda != acb {
        return false;
    }
    let cbd = -orientation(c, d, b, tol);
    if cbd != acb {
        return false;
    }
    let dac = orientation(c, d, a, tol);
    dac == acb
}

/// Intersection point of two arcs already known to cross properly.
pub fn crossing_point(a: Point3, b: Point3, c: Point3, d: Point3) -> Point3 {
    let x = robust_cross(a, b).cross(robust_cross(c, d)).normalize();
    // pick the candidate on the same side as the arcs
    if x.dot(a + b + c + d) < 0.0 {
        -x
    } else {
        x
    }
}

/// Signed area (steradians) of the spherical triangle a, b, c; positive when
/// counter-clockwise seen from outside the sphere.
pub fn signed_triangle_area(a: Point3, b: Point3, c: Point3) -> f64 {
    // Triple product on differences keeps precision for small triangles.
    let det = (b - a).cross(c - a).dot(a);
    let denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * det.atan2(denom)
}

/// Interpolates along the minor arc a→b at fraction t.
pub fn interpolate(a: Point3, b: Point3, t: f64) -> Point3 {
    let theta = a.angle(b);
    if theta < 1e-15 {
        return a;
    }
    let s = theta.sin();
    let wa = ((1.0 - t) * theta).sin() / s;
    let wb = (t * theta).sin() / s;
    (a * wa + b * wb).normalize()
}

/// A spherical cap used as a cheap bound for pruning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cap {
    pub center: Point3,
    /// Angular radius; values ≥ π mean the full sphere.
    pub radius: f64,
}

impl Cap {
    pub const FULL: Cap = Cap { center: Point3::new(1.0, 0.0, 0.0), radius: std::f64::consts::PI };

    /// Smallest-ish cap around a vertex set. Because caps below a hemisphere
    /// are convex, geodesic edges between the vertices stay inside.
    pub fn from_points(points: &[Point3]) -> Cap {
        let sum = points.iter().fold(Point3::new(0.0, 0.0, 0.0), |acc, &p| acc + p);
        let center = sum.normalize();
        if center.norm() == 0.0 {
            return Cap::FULL;
        }
        let radius = points.iter().map(|&p| center.angle(p)).fold(0.0, f64::max);
        if radius >= std::f64::consts::FRAC_PI_2 {
            Cap::FULL
        } else {
            Cap { center, radius }
        }
    }

    pub fn may_intersect(&self, other: &Cap) -> bool {
        if self.radius >= std::f64::consts::PI || other.radius >= std::f64::consts::PI {
            return true;
        }
        self.center.angle(other.center) <= self.radius + other.radius + 1e-9
    }

    pub fn contains(&self, p: Point3) -> bool {
        self.radius >= std::f64::consts::PI || self.center.angle(p) <= self.radius + 1e-9
    }
}
