//! Geometries on the unit sphere with geodesic edges.
//!
//! Polygon exteriors are stored counter-clockwise (interior on the left
//! when seen from outside the sphere) and holes clockwise, so for every
//! directed boundary edge the polygon interior lies on its left. Input rings
//! are re-oriented on construction; a ring always denotes the smaller of the
//! two regions it separates.
//!
//! Rings may cross the ±180° meridian. Edges are geodesics between
//! normalized vertices, so nothing is split at the seam and serialized rings
//! may span it.

mod geojson;
mod relate;
mod wkt;

pub use geojson::{
    geometry_from_geojson, parse_geojson, parse_geojson_value, FeatureError, FeatureParse, GeoJsonError, ParsedFeature,
    PropertyValue,
};
pub use relate::{relate, SpatialRelation};
pub use wkt::{parse_wkt, serialize_wkt, WktError};

use crate::sphere::{
    crosses_properly, distance_to_edge, orientation, robust_cross, signed_triangle_area, Cap, LatLng,
    Point3, TOUCH_TOLERANCE,
};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("ring has fewer than 3 distinct vertices")]
    TooFewVertices,
    #[error("ring is self-intersecting near vertex {0}")]
    SelfIntersection(usize),
    #[error("hole {0} is not inside the exterior ring or crosses another ring")]
    InvalidHole(usize),
    #[error("linestring needs at least 2 distinct vertices")]
    DegenerateLine,
    #[error("geometry is empty")]
    Empty,
    #[error("operation requires an areal geometry, got {0}")]
    NotAreal(GeometryKind),
    #[error(transparent)]
    Coordinate(#[from] crate::sphere::CoordinateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeometryKind {
    Point,
    LineString,
    Polygon,
    MultiPolygon,
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryKind::Point => "Point",
            GeometryKind::LineString => "LineString",
            GeometryKind::Polygon => "Polygon",
            GeometryKind::MultiPolygon => "MultiPolygon",
        })
    }
}

/// Where a point lies relative to an areal geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// A closed loop of vertices. The closing vertex is not repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    vertices: Vec<LatLng>,
    points: Vec<Point3>,
    /// True when the enclosed (smaller) region lies on the left.
    ccw: bool,
}

impl Ring {
    fn from_vertices(mut vertices: Vec<LatLng>) -> Result<Ring, GeometryError> {
        vertices.dedup_by(|a, b| a == b);
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let points: Vec<Point3> = vertices.iter().map(|v| v.to_point()).collect();
        let mut distinct = points.clone();
        distinct.dedup_by(|a, b| a.angle(*b) <= TOUCH_TOLERANCE);
        if distinct.len() < 3 {
            return Err(GeometryError::TooFewVertices);
        }
        let mut ring = Ring { vertices, points, ccw: true };
        ring.ccw = ring.signed_area() >= 0.0;
        Ok(ring)
    }

    pub(crate) fn from_points_unchecked(points: Vec<Point3>) -> Ring {
        let vertices = points.iter().map(|&p| LatLng::from_point(p)).collect();
        Ring { vertices, points, ccw: true }
    }

    pub fn vertices(&self) -> &[LatLng] {
        &self.vertices
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Directed edges including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    fn reversed(&self) -> Ring {
        let mut vertices = self.vertices.clone();
        let mut points = self.points.clone();
        vertices.reverse();
        points.reverse();
        Ring { vertices, points, ccw: !self.ccw }
    }

    /// Signed area of the ring as traversed; positive when the enclosed
    /// region is on the left.
    pub fn signed_area(&self) -> f64 {
        let p = &self.points;
        (1..p.len() - 1).map(|i| signed_triangle_area(p[0], p[i], p[i + 1])).sum()
    }

    fn check_simple(&self) -> Result<(), GeometryError> {
        let p = &self.points;
        let n = p.len();
        let caps: Vec<Cap> = self.edges().map(|(a, b)| Cap::from_points(&[a, b])).collect();
        for i in 0..n {
            let (a, b) = (p[i], p[(i + 1) % n]);
            // spike: the following edge doubles back over this one
            let c = p[(i + 2) % n];
            if distance_to_edge(c, a, b) <= TOUCH_TOLERANCE || distance_to_edge(a, b, c) <= TOUCH_TOLERANCE {
                return Err(GeometryError::SelfIntersection((i + 1) % n));
            }
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if !caps[i].may_intersect(&caps[j]) {
                    continue;
                }
                let (c, d) = (p[j], p[(j + 1) % n]);
                if crosses_properly(a, b, c, d, TOUCH_TOLERANCE)
                    || distance_to_edge(c, a, b) <= TOUCH_TOLERANCE
                    || distance_to_edge(d, a, b) <= TOUCH_TOLERANCE
                    || distance_to_edge(a, c, d) <= TOUCH_TOLERANCE
                    || distance_to_edge(b, c, d) <= TOUCH_TOLERANCE
                {
                    return Err(GeometryError::SelfIntersection(i));
                }
            }
        }
        Ok(())
    }

    /// Locates `p` relative to the region this ring encloses, whichever
    /// direction it is traversed in.
    pub fn locate(&self, p: Point3) -> Location {
        if self.edges().any(|(a, b)| distance_to_edge(p, a, b) <= TOUCH_TOLERANCE) {
            return Location::Boundary;
        }
        let n = self.points.len();
        for k in 0..n {
            let (a, b) = (self.points[k], self.points[(k + 1) % n]);
            let normal = robust_cross(a, b);
            if normal.norm() == 0.0 {
                continue;
            }
            // just off the edge midpoint on the non-enclosed side
            let away = if self.ccw { -1e-9 } else { 1e-9 };
            let reference = ((a + b).normalize() + normal.normalize() * away).normalize();
            if let Some(crossings) = self.count_crossings(reference, p) {
                return if crossings % 2 == 1 { Location::Inside } else { Location::Outside };
            }
        }
        // every reference was degenerate; fall back to the angle sum
        if self.winding_angle(p).abs() > std::f64::consts::PI {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Crossings of the arc r→p with the ring, or None if the arc passes too
    /// close to a vertex to count reliably.
    fn count_crossings(&self, r: Point3, p: Point3) -> Option<usize> {
        if r.dot(p) < -1.0 + 1e-9 {
            return None;
        }
        let tol = TOUCH_TOLERANCE;
        let mut count = 0;
        for (c, d) in self.edges() {
            if distance_to_edge(c, r, p) <= tol * 4.0 {
                return None;
            }
            let o1 = orientation(r, p, c, tol);
            let o2 = orientation(r, p, d, tol);
            if o1 == 0 || o2 == 0 || o1 == o2 {
                continue;
            }
            if orientation(c, d, r, tol) == 0 {
                return None;
            }
            if crosses_properly(r, p, c, d, tol) {
                count += 1;
            }
        }
        Some(count)
    }

    /// Sum of signed turning angles seen from `p`; ±2π inside, 0 outside.
    fn winding_angle(&self, p: Point3) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let ta = robust_cross(p, a);
                let tb = robust_cross(p, b);
                ta.cross(tb).dot(p).atan2(ta.dot(tb))
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineString {
    vertices: Vec<LatLng>,
    points: Vec<Point3>,
}

impl LineString {
    pub fn new(mut vertices: Vec<LatLng>) -> Result<LineString, GeometryError> {
        vertices.dedup_by(|a, b| a == b);
        if vertices.len() < 2 {
            return Err(GeometryError::DegenerateLine);
        }
        let points = vertices.iter().map(|v| v.to_point()).collect();
        Ok(LineString { vertices, points })
    }

    pub fn vertices(&self) -> &[LatLng] {
        &self.vertices
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.len() > 2 && self.vertices.first() == self.vertices.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    exterior: Ring,
    holes: Vec<Ring>,
}

impl Polygon {
    /// Validates and orients a polygon: exterior counter-clockwise, holes
    /// clockwise. Self-intersecting rings are rejected.
    pub fn new(exterior: Vec<LatLng>, holes: Vec<Vec<LatLng>>) -> Result<Polygon, GeometryError> {
        let mut ext = Ring::from_vertices(exterior)?;
        ext.check_simple()?;
        if ext.signed_area() < 0.0 {
            ext = ext.reversed();
        }
        let mut inner = Vec::with_capacity(holes.len());
        for (k, h) in holes.into_iter().enumerate() {
            let mut ring = Ring::from_vertices(h)?;
            ring.check_simple()?;
            if ring.signed_area() > 0.0 {
                ring = ring.reversed();
            }
            if ext.locate(ring.points[0]) == Location::Outside {
                return Err(GeometryError::InvalidHole(k));
            }
            inner.push(ring);
        }
        let poly = Polygon { exterior: ext, holes: inner };
        poly.check_rings_disjoint()?;
        Ok(poly)
    }

    pub(crate) fn from_ccw_points_unchecked(points: Vec<Point3>) -> Polygon {
        Polygon { exterior: Ring::from_points_unchecked(points), holes: Vec::new() }
    }

    fn check_rings_disjoint(&self) -> Result<(), GeometryError> {
        let rings: Vec<&Ring> = self.rings().collect();
        for i in 0..rings.len() {
            for j in (i + 1)..rings.len() {
                for (a, b) in rings[i].edges() {
                    for (c, d) in rings[j].edges() {
                        if crosses_properly(a, b, c, d, TOUCH_TOLERANCE) {
                            return Err(GeometryError::InvalidHole(j - 1));
                        }
                    }
                }
            }
        }
        for (k, hole) in self.holes.iter().enumerate() {
            for (m, other) in self.holes.iter().enumerate() {
                if k != m && other.locate(hole.points[0]) == Location::Inside {
                    return Err(GeometryError::InvalidHole(k));
                }
            }
        }
        Ok(())
    }

    pub fn exterior(&self) -> &Ring {
        &self.exterior
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    /// Exterior followed by holes.
    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    /// Area in steradians.
    pub fn area(&self) -> f64 {
        self.exterior.signed_area() + self.holes.iter().map(|h| h.signed_area()).sum::<f64>()
    }

    pub fn locate(&self, p: Point3) -> Location {
        match self.exterior.locate(p) {
            Location::Outside => Location::Outside,
            Location::Boundary => Location::Boundary,
            Location::Inside => {
                for h in &self.holes {
                    match h.locate(p) {
                        Location::Inside => return Location::Outside,
                        Location::Boundary => return Location::Boundary,
                        Location::Outside => {}
                    }
                }
                Location::Inside
            }
        }
    }
}

/// A point, linestring, polygon, or multipolygon on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(LatLng),
    LineString(LineString),
    Polygon(Polygon),
    MultiPolygon(Vec<Polygon>),
}

impl Geometry {
    pub fn point(lat: f64, lng: f64) -> Result<Geometry, GeometryError> {
        Ok(Geometry::Point(LatLng::new(lat, lng)?))
    }

    /// Polygon from `(lng, lat)` pairs, the WKT axis order.
    pub fn polygon_lnglat(exterior: &[(f64, f64)]) -> Result<Geometry, GeometryError> {
        let ring = exterior
            .iter()
            .map(|&(lng, lat)| LatLng::new(lat, lng))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Geometry::Polygon(Polygon::new(ring, Vec::new())?))
    }

    /// The whole sphere as the six cube-face quadrilaterals.
    pub fn whole_sphere() -> Geometry {
        let polys = crate::dgg::CellId::faces()
            .map(|c| Polygon::from_ccw_points_unchecked(c.vertices().to_vec()))
            .collect();
        Geometry::MultiPolygon(polys)
    }

    pub fn kind(&self) -> GeometryKind {
        match self {
            Geometry::Point(_) => GeometryKind::Point,
            Geometry::LineString(_) => GeometryKind::LineString,
            Geometry::Polygon(_) => GeometryKind::Polygon,
            Geometry::MultiPolygon(_) => GeometryKind::MultiPolygon,
        }
    }

    pub fn dimension(&self) -> u8 {
        match self {
            Geometry::Point(_) => 0,
            Geometry::LineString(_) => 1,
            Geometry::Polygon(_) | Geometry::MultiPolygon(_) => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Geometry::MultiPolygon(p) if p.is_empty())
    }

    pub fn polygons(&self) -> &[Polygon] {
        match self {
            Geometry::Polygon(p) => std::slice::from_ref(p),
            Geometry::MultiPolygon(ps) => ps,
            _ => &[],
        }
    }

    /// Every vertex of every part.
    pub fn points(&self) -> Vec<Point3> {
        match self {
            Geometry::Point(p) => vec![p.to_point()],
            Geometry::LineString(l) => l.points.clone(),
            _ => self.polygons().iter().flat_map(|p| p.rings()).flat_map(|r| r.points.iter().copied()).collect(),
        }
    }

    /// Area in steradians; zero for points and lines.
    pub fn area(&self) -> f64 {
        self.polygons().iter().map(Polygon::area).sum()
    }

    pub fn area_km2(&self) -> f64 {
        let r = crate::sphere::EARTH_RADIUS_KM;
        self.area() * r * r
    }

    pub fn cap_bound(&self) -> Cap {
        Cap::from_points(&self.points())
    }

    pub fn locate(&self, p: Point3) -> Result<Location, GeometryError> {
        match self {
            Geometry::Polygon(poly) => Ok(poly.locate(p)),
            Geometry::MultiPolygon(polys) => {
                let mut boundary = 0;
                for poly in polys {
                    match poly.locate(p) {
                        Location::Inside => return Ok(Location::Inside),
                        Location::Boundary => boundary += 1,
                        Location::Outside => {}
                    }
                }
                // on an edge shared by two parts means interior of the union
                Ok(match boundary {
                    0 => Location::Outside,
                    1 => Location::Boundary,
                    _ => Location::Inside,
                })
            }
            other => Err(GeometryError::NotAreal(other.kind())),
        }
    }

    /// Closed containment: points on the boundary count as inside, matching
    /// the grid's assignment of boundary points to a single cell.
    pub fn contains_point(&self, p: LatLng) -> Result<bool, GeometryError> {
        Ok(self.locate(p.to_point())? != Location::Outside)
    }

    /// Bounding box as (min_lng, min_lat, max_lng, max_lat) over vertices.
    pub fn vertex_bbox(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in self.points().into_iter().map(LatLng::from_point) {
            b.0 = b.0.min(v.lng);
            b.1 = b.1.min(v.lat);
            b.2 = b.2.max(v.lng);
            b.3 = b.3.max(v.lat);
        }
        b
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_wkt(self))
    }
}
