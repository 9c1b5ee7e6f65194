//! relate() against planar DE-9IM on shapes a few metres across at the
//! equator, where geodesics and straight lines in lat/lng agree to well
//! below the touch tolerance.

mod common;

use geo::{Coord, LineString as GeoLine, Point as GeoPoint, Polygon as GeoPolygon, Relate};
use geokg_core::geometry::{relate, Geometry, SpatialRelation};
use rand::Rng;

/// Grid step in degrees.
const UNIT: f64 = 0.001;

enum Shape {
    Point(i32, i32),
    Ring(Vec<(i32, i32)>),
}

fn random_shape(r: &mut impl Rng) -> Shape {
    let mut c = || r.gen_range(-5..=5);
    let (mut x0, mut x1, mut y0, mut y1) = (c(), c(), c(), c());
    if x0 == x1 {
        x1 += 1;
    }
    if y0 == y1 {
        y1 += 1;
    }
    if x0 > x1 {
        std::mem::swap(&mut x0, &mut x1);
    }
    if y0 > y1 {
        std::mem::swap(&mut y0, &mut y1);
    }
    match r.gen_range(0..6) {
        0 => Shape::Point(x0, y0),
        1 => Shape::Ring(vec![(x0, y0), (x1, y0), (x0, y1)]),
        2 => Shape::Ring(vec![(x0, y0), (x1, y0), (x1, y1)]),
        _ => Shape::Ring(vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)]),
    }
}

fn ours(s: &Shape) -> Geometry {
    match s {
        Shape::Point(x, y) => Geometry::point(*y as f64 * UNIT, *x as f64 * UNIT).unwrap(),
        Shape::Ring(v) => {
            let ring: Vec<(f64, f64)> = v.iter().map(|&(x, y)| (x as f64 * UNIT, y as f64 * UNIT)).collect();
            Geometry::polygon_lnglat(&ring).unwrap()
        }
    }
}

fn planar(a: &Shape, b: &Shape) -> Option<SpatialRelation> {
    let m = match (a, b) {
        (Shape::Point(x, y), Shape::Point(u, v)) => return (x == u && y == v).then_some(SpatialRelation::Equals),
        (Shape::Point(x, y), Shape::Ring(v)) => GeoPoint::new(*x as f64, *y as f64).relate(&polygon(v)),
        (Shape::Ring(v), Shape::Point(x, y)) => polygon(v).relate(&GeoPoint::new(*x as f64, *y as f64)),
        (Shape::Ring(v), Shape::Ring(w)) => polygon(v).relate(&polygon(w)),
    };
    if m.is_disjoint() {
        None
    } else if m.is_equal_topo() {
        Some(SpatialRelation::Equals)
    } else if m.is_within() {
        Some(SpatialRelation::Within)
    } else if m.is_contains() {
        Some(SpatialRelation::Contains)
    } else if m.is_touches() {
        Some(SpatialRelation::Touches)
    } else {
        Some(SpatialRelation::Overlaps)
    }
}

fn polygon(v: &[(i32, i32)]) -> GeoPolygon<f64> {
    let ring: Vec<Coord<f64>> = v.iter().map(|&(x, y)| Coord { x: x as f64, y: y as f64 }).collect();
    GeoPolygon::new(GeoLine::from(ring), vec![])
}

#[test]
fn matches_planar_de9im_on_tiny_shapes() {
    let mut r = common::rng(21);
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..4000 {
        let (a, b) = (random_shape(&mut r), random_shape(&mut r));
        let want = planar(&a, &b);
        let got = relate(&ours(&a), &ours(&b));
        assert_eq!(got, want, "pair {i}");
        seen.insert(format!("{want:?}"));
    }
    // the grid is coarse enough that every outcome occurs
    assert_eq!(seen.len(), 6, "{seen:?}");
}

#[test]
fn symmetric_under_inversion() {
    let mut r = common::rng(22);
    for _ in 0..1000 {
        let (a, b) = (ours(&random_shape(&mut r)), ours(&random_shape(&mut r)));
        assert_eq!(relate(&a, &b), relate(&b, &a).map(SpatialRelation::inverse));
    }
}
