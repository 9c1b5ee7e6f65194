//! Topological relation between two geometries.
//!
//! Boundaries are cut wherever the other geometry's vertices (or proper
//! crossings) fall on them; each resulting piece lies entirely inside,
//! outside, or along the other boundary, so classifying piece midpoints is
//! enough to decide the relation.

use super::{Geometry, LineString, Location, Polygon};
use crate::sphere::{crosses_properly, crossing_point, distance_to_edge, robust_cross, Point3, TOUCH_TOLERANCE};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// The five materialized topological predicates. Disjointness is the absence
/// of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialRelation {
    Equals,
    Within,
    Contains,
    Touches,
    Overlaps,
}

impl SpatialRelation {
    pub const ALL: [SpatialRelation; 5] = [
        SpatialRelation::Equals,
        SpatialRelation::Within,
        SpatialRelation::Contains,
        SpatialRelation::Touches,
        SpatialRelation::Overlaps,
    ];

    pub fn inverse(self) -> SpatialRelation {
        match self {
            SpatialRelation::Within => SpatialRelation::Contains,
            SpatialRelation::Contains => SpatialRelation::Within,
            other => other,
        }
    }

    /// Local name of the pre-computed predicate in the ontology namespace.
    pub fn local_name(self) -> &'static str {
        match self {
            SpatialRelation::Equals => "sfEquals",
            SpatialRelation::Within => "sfWithin",
            SpatialRelation::Contains => "sfContains",
            SpatialRelation::Touches => "sfTouches",
            SpatialRelation::Overlaps => "sfOverlaps",
        }
    }

    pub fn from_local_name(name: &str) -> Option<SpatialRelation> {
        SpatialRelation::ALL.into_iter().find(|r| r.local_name() == name)
    }
}

impl fmt::Display for SpatialRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpatialRelation::Equals => "equals",
            SpatialRelation::Within => "within",
            SpatialRelation::Contains => "contains",
            SpatialRelation::Touches => "touches",
            SpatialRelation::Overlaps => "overlaps",
        })
    }
}

/// Relation of `a` to `b`, or `None` when they are disjoint.
///
/// Always satisfies `relate(a, b) == relate(b, a).map(inverse)`: the pair is
/// evaluated in a canonical order and inverted when needed.
pub fn relate(a: &Geometry, b: &Geometry) -> Option<SpatialRelation> {
    let swap = match a.dimension().cmp(&b.dimension()) {
        Ordering::Less => false,
        Ordering::Greater => true,
        Ordering::Equal => canonical_order(a, b) == Ordering::Greater,
    };
    if swap {
        relate_ordered(b, a).map(SpatialRelation::inverse)
    } else {
        relate_ordered(a, b)
    }
}

fn canonical_order(a: &Geometry, b: &Geometry) -> Ordering {
    a.kind().cmp(&b.kind()).then_with(|| {
        let (pa, pb) = (a.points(), b.points());
        for (x, y) in pa.iter().zip(pb.iter()) {
            let o = x.x.total_cmp(&y.x).then(x.y.total_cmp(&y.y)).then(x.z.total_cmp(&y.z));
            if o != Ordering::Equal {
                return o;
            }
        }
        pa.len().cmp(&pb.len())
    })
}

/// `a` has dimension ≤ `b`.
fn relate_ordered(a: &Geometry, b: &Geometry) -> Option<SpatialRelation> {
    if !a.cap_bound().may_intersect(&b.cap_bound()) {
        return None;
    }
    match (a, b) {
        (Geometry::Point(p), Geometry::Point(q)) => {
            (p.to_point().angle(q.to_point()) <= TOUCH_TOLERANCE).then_some(SpatialRelation::Equals)
        }
        (Geometry::Point(p), Geometry::LineString(l)) => point_line(p.to_point(), l),
        (Geometry::Point(p), _) => match b.locate(p.to_point()).ok()? {
            Location::Inside => Some(SpatialRelation::Within),
            Location::Boundary => Some(SpatialRelation::Touches),
            Location::Outside => None,
        },
        (Geometry::LineString(la), Geometry::LineString(lb)) => line_line(la, lb),
        (Geometry::LineString(l), _) => line_area(l, &Area::new(b.polygons())),
        _ => area_area(&Area::new(a.polygons()), &Area::new(b.polygons())),
    }
}

fn point_line(p: Point3, l: &LineString) -> Option<SpatialRelation> {
    if !l.edges().any(|(a, b)| distance_to_edge(p, a, b) <= TOUCH_TOLERANCE) {
        return None;
    }
    if is_line_endpoint(l, p) {
        Some(SpatialRelation::Touches)
    } else {
        Some(SpatialRelation::Within)
    }
}

fn is_line_endpoint(l: &LineString, p: Point3) -> bool {
    let pts = l.points();
    !l.is_closed()
        && (pts[0].angle(p) <= TOUCH_TOLERANCE || pts[pts.len() - 1].angle(p) <= TOUCH_TOLERANCE)
}

fn on_line(l: &LineString, p: Point3) -> bool {
    l.edges().any(|(a, b)| distance_to_edge(p, a, b) <= TOUCH_TOLERANCE)
}

/// Cut points on arc p→q: the given vertices lying on it (away from its
/// ends) and proper crossings with the given edges, sorted from `p`.
fn cut_arc(p: Point3, q: Point3, vertices: &[Point3], edges: &[(Point3, Point3)]) -> Vec<Point3> {
    let mut cuts: Vec<(f64, Point3)> = Vec::new();
    for &v in vertices {
        if v.angle(p) > TOUCH_TOLERANCE && v.angle(q) > TOUCH_TOLERANCE && distance_to_edge(v, p, q) <= TOUCH_TOLERANCE {
            cuts.push((p.angle(v), v));
        }
    }
    for &(c, d) in edges {
        if crosses_properly(p, q, c, d, TOUCH_TOLERANCE) {
            let x = crossing_point(p, q, c, d);
            cuts.push((p.angle(x), x));
        }
    }
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::with_capacity(cuts.len() + 2);
    out.push(p);
    out.extend(cuts.into_iter().map(|c| c.1));
    out.push(q);
    out
}

fn midpoints(cuts: &[Point3]) -> impl Iterator<Item = Point3> + '_ {
    cuts.windows(2).filter(|w| w[0].angle(w[1]) > TOUCH_TOLERANCE).map(|w| (w[0] + w[1]).normalize())
}

/// A union of interior-disjoint polygons with every boundary edge directed
/// so the interior lies on its left.
struct Area<'a> {
    polygons: &'a [Polygon],
    edges: Vec<(Point3, Point3)>,
    vertices: Vec<Point3>,
}

impl<'a> Area<'a> {
    fn new(polygons: &'a [Polygon]) -> Area<'a> {
        let edges = polygons.iter().flat_map(|p| p.rings()).flat_map(|r| r.edges()).collect();
        let vertices = polygons.iter().flat_map(|p| p.rings()).flat_map(|r| r.points().iter().copied()).collect();
        Area { polygons, edges, vertices }
    }

    fn is_multi(&self) -> bool {
        self.polygons.len() > 1
    }

    fn locate(&self, p: Point3) -> Location {
        let mut boundary = 0;
        for poly in self.polygons {
            match poly.locate(p) {
                Location::Inside => return Location::Inside,
                Location::Boundary => boundary += 1,
                Location::Outside => {}
            }
        }
        match boundary {
            0 => Location::Outside,
            1 => Location::Boundary,
            _ => Location::Inside,
        }
    }

    /// Whether `m` lies on boundary edges running the same and/or opposite
    /// way as a great circle with normal `n`.
    fn boundary_directions(&self, m: Point3, n: Point3) -> (bool, bool) {
        let (mut same, mut opposite) = (false, false);
        for &(c, d) in &self.edges {
            if distance_to_edge(m, c, d) <= TOUCH_TOLERANCE {
                if robust_cross(c, d).dot(n) > 0.0 {
                    same = true;
                } else {
                    opposite = true;
                }
            }
        }
        (same, opposite)
    }

    fn on_boundary(&self, p: Point3) -> bool {
        self.edges.iter().any(|&(c, d)| distance_to_edge(p, c, d) <= TOUCH_TOLERANCE)
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Pieces {
    inside: bool,
    outside: bool,
    on_same: bool,
    on_opposite: bool,
}

fn any_proper_crossing(a: &[(Point3, Point3)], b: &[(Point3, Point3)]) -> bool {
    a.iter().any(|&(p, q)| b.iter().any(|&(c, d)| crosses_properly(p, q, c, d, TOUCH_TOLERANCE)))
}

fn area_pieces(a: &Area, b: &Area) -> Pieces {
    let mut flags = Pieces::default();
    for &(p, q) in &a.edges {
        let n = robust_cross(p, q);
        let cuts = cut_arc(p, q, &b.vertices, &[]);
        for m in midpoints(&cuts) {
            // edges shared between parts of a multipolygon are not boundary
            if a.is_multi() && a.boundary_directions(m, n).1 {
                continue;
            }
            match b.locate(m) {
                Location::Inside => flags.inside = true,
                Location::Outside => flags.outside = true,
                Location::Boundary => match b.boundary_directions(m, n) {
                    (true, true) => flags.inside = true,
                    (true, false) => flags.on_same = true,
                    (false, true) => flags.on_opposite = true,
                    (false, false) => {}
                },
            }
        }
    }
    flags
}

/// A proper crossing between true boundary edges of two areas.
fn areas_cross(a: &Area, b: &Area) -> bool {
    for &(p, q) in &a.edges {
        for &(c, d) in &b.edges {
            if !crosses_properly(p, q, c, d, TOUCH_TOLERANCE) {
                continue;
            }
            let x = crossing_point(p, q, c, d);
            let internal = (a.is_multi() && a.boundary_directions(x, robust_cross(p, q)).1)
                || (b.is_multi() && b.boundary_directions(x, robust_cross(c, d)).1);
            if !internal {
                return true;
            }
        }
    }
    false
}

fn area_area(a: &Area, b: &Area) -> Option<SpatialRelation> {
    if areas_cross(a, b) {
        return Some(SpatialRelation::Overlaps);
    }
    let fa = area_pieces(a, b);
    let fb = area_pieces(b, a);
    let opposite = fa.on_opposite || fb.on_opposite;
    let a_escapes_b = fa.outside || fb.inside || opposite;
    let b_escapes_a = fb.outside || fa.inside || opposite;
    let interiors_meet = fa.inside || fb.inside || fa.on_same || fb.on_same;
    if !interiors_meet {
        let contact = opposite
            || a.vertices.iter().any(|&v| b.on_boundary(v))
            || b.vertices.iter().any(|&v| a.on_boundary(v));
        return contact.then_some(SpatialRelation::Touches);
    }
    Some(match (a_escapes_b, b_escapes_a) {
        (false, false) => SpatialRelation::Equals,
        (false, true) => SpatialRelation::Within,
        (true, false) => SpatialRelation::Contains,
        (true, true) => SpatialRelation::Overlaps,
    })
}

fn line_area(l: &LineString, b: &Area) -> Option<SpatialRelation> {
    let (mut inside, mut outside, mut on) = (false, false, false);
    for (p, q) in l.edges() {
        let cuts = cut_arc(p, q, &b.vertices, &b.edges);
        for m in midpoints(&cuts) {
            match b.locate(m) {
                Location::Inside => inside = true,
                Location::Outside => outside = true,
                Location::Boundary => on = true,
            }
        }
    }
    if inside {
        return Some(if outside { SpatialRelation::Overlaps } else { SpatialRelation::Within });
    }
    let contact =
        on || l.points().iter().any(|&v| b.on_boundary(v)) || b.vertices.iter().any(|&v| on_line(l, v));
    contact.then_some(SpatialRelation::Touches)
}

fn line_line(a: &LineString, b: &LineString) -> Option<SpatialRelation> {
    let shared = |x: &LineString, y: &LineString| -> (bool, bool) {
        let edges: Vec<_> = y.edges().collect();
        let (mut on, mut off) = (false, false);
        for (p, q) in x.edges() {
            let cuts = cut_arc(p, q, y.points(), &edges);
            for m in midpoints(&cuts) {
                if on_line(y, m) {
                    on = true;
                } else {
                    off = true;
                }
            }
        }
        (on, off)
    };
    let (a_on, a_off) = shared(a, b);
    let (b_on, b_off) = shared(b, a);
    match (a_on && !a_off, b_on && !b_off) {
        (true, true) => return Some(SpatialRelation::Equals),
        (true, false) => return Some(SpatialRelation::Within),
        (false, true) => return Some(SpatialRelation::Contains),
        _ => {}
    }
    if a_on || b_on {
        return Some(SpatialRelation::Overlaps);
    }
    let (ea, eb): (Vec<_>, Vec<_>) = (a.edges().collect(), b.edges().collect());
    if any_proper_crossing(&ea, &eb) {
        return Some(SpatialRelation::Overlaps);
    }
    // isolated contact points: interior of both means the lines cross
    let mut contact = false;
    for (x, y) in [(a, b), (b, a)] {
        for &v in x.points() {
            if on_line(y, v) {
                if !is_line_endpoint(x, v) && !is_line_endpoint(y, v) {
                    return Some(SpatialRelation::Overlaps);
                }
                contact = true;
            }
        }
    }
    contact.then_some(SpatialRelation::Touches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    fn g(wkt: &str) -> Geometry {
        parse_wkt(wkt).unwrap()
    }

    #[test]
    fn identity_is_equals() {
        let q = g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        assert_eq!(relate(&q, &q), Some(SpatialRelation::Equals));
        let l = g("LINESTRING (0 0, 1 1, 2 1)");
        assert_eq!(relate(&l, &l), Some(SpatialRelation::Equals));
        let p = g("POINT (3 4)");
        assert_eq!(relate(&p, &p), Some(SpatialRelation::Equals));
    }

    #[test]
    fn shared_edge_touches() {
        let a = g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        let b = g("POLYGON ((1 0, 2 0, 2 1, 1 1, 1 0))");
        assert_eq!(relate(&a, &b), Some(SpatialRelation::Touches));
        assert_eq!(relate(&b, &a), Some(SpatialRelation::Touches));
    }

    #[test]
    fn corner_contact_touches() {
        let a = g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        let b = g("POLYGON ((1 1, 2 1, 2 2, 1 2, 1 1))");
        assert_eq!(relate(&a, &b), Some(SpatialRelation::Touches));
    }

    #[test]
    fn nested_and_overlapping() {
        let big = g("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))");
        let small = g("POLYGON ((1 1, 2 1, 2 2, 1 2, 1 1))");
        let shifted = g("POLYGON ((3 3, 5 3, 5 5, 3 5, 3 3))");
        assert_eq!(relate(&small, &big), Some(SpatialRelation::Within));
        assert_eq!(relate(&big, &small), Some(SpatialRelation::Contains));
        assert_eq!(relate(&big, &shifted), Some(SpatialRelation::Overlaps));
        let far = g("POLYGON ((10 10, 11 10, 11 11, 10 11, 10 10))");
        assert_eq!(relate(&big, &far), None);
    }

    #[test]
    fn inner_polygon_sharing_an_edge_is_within() {
        let big = g("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))");
        let half = g("POLYGON ((0 0, 2 0, 2 4, 0 4, 0 0))");
        assert_eq!(relate(&half, &big), Some(SpatialRelation::Within));
    }

    #[test]
    fn filling_a_hole_touches() {
        let donut = g("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1))");
        let plug = g("POLYGON ((1 1, 2 1, 2 2, 1 2, 1 1))");
        assert_eq!(relate(&plug, &donut), Some(SpatialRelation::Touches));
        let inside_hole = g("POLYGON ((1.2 1.2, 1.8 1.2, 1.8 1.8, 1.2 1.8, 1.2 1.2))");
        assert_eq!(relate(&inside_hole, &donut), None);
        let covering = g("POLYGON ((0.5 0.5, 2.5 0.5, 2.5 2.5, 0.5 2.5, 0.5 0.5))");
        assert_eq!(relate(&covering, &donut), Some(SpatialRelation::Overlaps));
    }

    #[test]
    fn points_and_lines() {
        let q = g("POLYGON ((0 0, 1 0, 1 1, 0 1, 0 0))");
        assert_eq!(relate(&g("POINT (0.5 0.5)"), &q), Some(SpatialRelation::Within));
        assert_eq!(relate(&q, &g("POINT (0.5 0.5)")), Some(SpatialRelation::Contains));
        assert_eq!(relate(&g("POINT (0.5 0)"), &q), Some(SpatialRelation::Touches));
        assert_eq!(relate(&g("POINT (2 2)"), &q), None);
        assert_eq!(relate(&g("LINESTRING (0.2 0.2, 0.8 0.8)"), &q), Some(SpatialRelation::Within));
        assert_eq!(relate(&g("LINESTRING (0.5 0.5, 2 2)"), &q), Some(SpatialRelation::Overlaps));
        assert_eq!(relate(&g("LINESTRING (0 0, 1 0)"), &q), Some(SpatialRelation::Touches));
        assert_eq!(relate(&g("LINESTRING (2 2, 3 3)"), &q), None);
        let l = g("LINESTRING (0 0, 2 0)");
        assert_eq!(relate(&g("POINT (1 0)"), &l), Some(SpatialRelation::Within));
        assert_eq!(relate(&g("POINT (0 0)"), &l), Some(SpatialRelation::Touches));
        assert_eq!(relate(&g("LINESTRING (0.5 0, 1 0)"), &l), Some(SpatialRelation::Within));
        assert_eq!(relate(&g("LINESTRING (1 -1, 1 1)"), &l), Some(SpatialRelation::Overlaps));
        assert_eq!(relate(&g("LINESTRING (2 0, 3 1)"), &l), Some(SpatialRelation::Touches));
        assert_eq!(relate(&g("LINESTRING (1 0, 3 0)"), &l), Some(SpatialRelation::Overlaps));
    }

    #[test]
    fn multipolygon_union_semantics() {
        let halves = g("MULTIPOLYGON (((0 0, 1 0, 1 2, 0 2, 0 0)), ((1 0, 2 0, 2 2, 1 2, 1 0)))");
        // geodesic edges: the union's top boundary runs through (1 2), not along 0 2 → 2 2
        let whole = g("POLYGON ((0 0, 1 0, 2 0, 2 2, 1 2, 0 2, 0 0))");
        assert_eq!(relate(&halves, &whole), Some(SpatialRelation::Equals));
        let bulged = g("POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))");
        assert_eq!(relate(&halves, &bulged), Some(SpatialRelation::Within));
        let straddle = g("POLYGON ((0.5 0.5, 1.5 0.5, 1.5 1.5, 0.5 1.5, 0.5 0.5))");
        assert_eq!(relate(&straddle, &halves), Some(SpatialRelation::Within));
    }

    #[test]
    fn inverse_table() {
        for r in SpatialRelation::ALL {
            assert_eq!(r.inverse().inverse(), r);
            assert_eq!(SpatialRelation::from_local_name(r.local_name()), Some(r));
        }
        assert_eq!(SpatialRelation::Within.inverse(), SpatialRelation::Contains);
        assert_eq!(SpatialRelation::Touches.inverse(), SpatialRelation::Touches);
    }
}
