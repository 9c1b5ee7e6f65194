//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use geokg_core::dgg::CellId;
use geokg_core::geometry::{parse_wkt, Geometry};
use geokg_core::ingest::{ingest, IngestOptions, IngestReport, Manifest};
use geokg_core::materialize::{entity_iri, Vocabulary};
use geokg_core::sphere::{LatLng, Point3};
use geokg_core::store::{Store, Term, Triple};
use geokg_core::vocab::{term, GEO};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde_json::{json, Value};
use std::collections::HashMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- geometry

/// Uniform on the sphere.
pub fn random_point(r: &mut impl Rng) -> Point3 {
    let z: f64 = r.gen_range(-1.0..1.0);
    let lng: f64 = r.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let s = (1.0 - z * z).sqrt();
    Point3 { x: s * lng.cos(), y: s * lng.sin(), z }
}

/// Orthonormal tangent basis at `c`.
fn tangent_basis(c: Point3) -> (Point3, Point3) {
    let helper = if c.z.abs() < 0.9 { Point3 { x: 0.0, y: 0.0, z: 1.0 } } else { Point3 { x: 1.0, y: 0.0, z: 0.0 } };
    let e1 = helper.cross(c).normalize();
    let e2 = c.cross(e1).normalize();
    (e1, e2)
}

/// Point at angular distance `radius` from `c` in direction `bearing`.
pub fn offset(c: Point3, radius: f64, bearing: f64) -> Point3 {
    let (e1, e2) = tangent_basis(c);
    let (s, k) = radius.sin_cos();
    Point3 {
        x: c.x * k + s * (bearing.cos() * e1.x + bearing.sin() * e2.x),
        y: c.y * k + s * (bearing.cos() * e1.y + bearing.sin() * e2.y),
        z: c.z * k + s * (bearing.cos() * e1.z + bearing.sin() * e2.z),
    }
    .normalize()
}

pub fn polygon_of(points: &[Point3]) -> Geometry {
    let ring: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let ll = LatLng::from_point(*p);
            (ll.lng, ll.lat)
        })
        .collect();
    Geometry::polygon_lnglat(&ring).expect("generated polygons are simple")
}

/// Star-shaped quadrilateral: one vertex per quarter turn, radius in
/// [radius/2, radius].
pub fn random_quad(r: &mut impl Rng, c: Point3, radius: f64) -> Geometry {
    let pts: Vec<Point3> = (0..4)
        .map(|k| {
            let bearing = (k as f64 + r.gen_range(0.1..0.9)) * std::f64::consts::FRAC_PI_2;
            offset(c, radius * r.gen_range(0.5..1.0), bearing)
        })
        .collect();
    polygon_of(&pts)
}

/// Regular n-gon inscribed in the cap of the given angular radius.
pub fn cap_polygon(c: Point3, radius: f64, n: usize) -> Geometry {
    let pts: Vec<Point3> = (0..n).map(|k| offset(c, radius, k as f64 * std::f64::consts::TAU / n as f64)).collect();
    polygon_of(&pts)
}

/// All cells of a level, by recursive subdivision of the faces.
pub fn all_cells(level: u8) -> Vec<CellId> {
    let mut cells: Vec<CellId> = CellId::faces().collect();
    for _ in 0..level {
        cells = cells.iter().flat_map(|c| c.children().unwrap()).collect();
    }
    cells
}

pub fn geometry_of(store: &Store, entity: &Term) -> Geometry {
    let g = store.objects(entity, &term(GEO, "hasGeometry"));
    let wkt = store.objects(&g[0], &term(GEO, "asWKT"));
    parse_wkt(wkt[0].lexical().unwrap()).unwrap()
}

// ---------------------------------------------------------------- temporal

/// Days since 1970-01-01 of a proleptic Gregorian date.
pub fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146097 + doe - 719468
}

pub fn days_in_month(y: i64, m: i64) -> i64 {
    days_from_civil(if m == 12 { y + 1 } else { y }, if m == 12 { 1 } else { m + 1 }, 1) - days_from_civil(y, m, 1)
}

/// A generated literal and its interval in epoch seconds, [start, end).
#[derive(Debug, Clone)]
pub struct OracleLiteral {
    pub lexical: String,
    pub datatype: &'static str,
    pub start: i64,
    pub end: i64,
}

/// Literals in a narrow window of years so every relation shows up.
pub fn random_literal(r: &mut impl Rng) -> OracleLiteral {
    let y = r.gen_range(1999..=2001);
    let m = r.gen_range(1..=12);
    let d = r.gen_range(1..=days_in_month(y, m));
    match r.gen_range(0..3) {
        0 => OracleLiteral {
            lexical: format!("{y}"),
            datatype: "gYear",
            start: days_from_civil(y, 1, 1) * 86400,
            end: days_from_civil(y + 1, 1, 1) * 86400,
        },
        1 => {
            let s = days_from_civil(y, m, d) * 86400;
            OracleLiteral { lexical: format!("{y:04}-{m:02}-{d:02}"), datatype: "date", start: s, end: s + 86400 }
        }
        _ => {
            let (hh, mm, ss) = (r.gen_range(0..24), r.gen_range(0..60), r.gen_range(0..60));
            let frac = if r.gen_bool(0.3) { format!(".{}", r.gen_range(1..1000)) } else { String::new() };
            let (zone, offset_min) = match r.gen_range(0..4) {
                0 => ("Z".to_string(), 0),
                1 => (String::new(), 0),
                2 => ("+05:30".to_string(), 330),
                _ => ("-08:00".to_string(), -480),
            };
            let s = days_from_civil(y, m, d) * 86400 + hh * 3600 + mm * 60 + ss - offset_min * 60;
            OracleLiteral {
                lexical: format!("{y:04}-{m:02}-{d:02}T{hh:02}:{mm:02}:{ss:02}{frac}{zone}"),
                datatype: "dateTime",
                start: s,
                end: s + 1,
            }
        }
    }
}

pub fn oracle_relation(a: &OracleLiteral, b: &OracleLiteral) -> &'static str {
    if a.end <= b.start {
        "before"
    } else if b.end <= a.start {
        "after"
    } else {
        "intersects"
    }
}

// ---------------------------------------------------------------- query

/// Bindings of a conjunctive query found by scanning every triple for every
/// pattern, in order.
pub fn nested_loop(triples: &[Triple], patterns: &[[Result<Term, String>; 3]]) -> Vec<Vec<(String, Term)>> {
    let ids: HashMap<&Term, u32> = {
        let mut m = HashMap::new();
        for t in triples {
            for x in [&t.subject, &t.predicate, &t.object] {
                let n = m.len() as u32;
                m.entry(x).or_insert(n);
            }
        }
        m
    };
    let mut names: Vec<&Term> = vec![&triples[0].subject; ids.len()];
    for (t, &i) in &ids {
        names[i as usize] = t;
    }
    let rows: Vec<[u32; 3]> = triples.iter().map(|t| [ids[&t.subject], ids[&t.predicate], ids[&t.object]]).collect();
    let mut vars: Vec<String> = Vec::new();
    let mut compiled = Vec::new();
    for p in patterns {
        let mut slot = [(0u32, usize::MAX); 3];
        for (k, x) in p.iter().enumerate() {
            slot[k] = match x {
                Ok(t) => match ids.get(t) {
                    Some(&id) => (id, usize::MAX),
                    None => return Vec::new(),
                },
                Err(v) => {
                    let i = vars.iter().position(|n| n == v).unwrap_or_else(|| {
                        vars.push(v.clone());
                        vars.len() - 1
                    });
                    (0, i)
                }
            };
        }
        compiled.push(slot);
    }
    let mut partial: Vec<Vec<Option<u32>>> = vec![vec![None; vars.len()]];
    for slot in &compiled {
        let mut next = Vec::new();
        for b in &partial {
            'row: for row in &rows {
                let mut fresh: [Option<u32>; 3] = [None; 3];
                for k in 0..3 {
                    let (c, v) = slot[k];
                    if v == usize::MAX {
                        if row[k] != c {
                            continue 'row;
                        }
                        continue;
                    }
                    let earlier = (0..k).find(|&j| slot[j].1 == v).and_then(|j| fresh[j]);
                    match b[v].or(earlier) {
                        Some(x) if x != row[k] => continue 'row,
                        _ => fresh[k] = Some(row[k]),
                    }
                }
                let mut nb = b.clone();
                for k in 0..3 {
                    if slot[k].1 != usize::MAX {
                        nb[slot[k].1] = fresh[k];
                    }
                }
                next.push(nb);
            }
        }
        partial = next;
    }
    let mut out: Vec<Vec<(String, Term)>> = partial
        .into_iter()
        .map(|b| {
            let mut row: Vec<(String, Term)> =
                vars.iter().zip(b).map(|(n, v)| (n.clone(), names[v.unwrap() as usize].clone())).collect();
            row.sort();
            row
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

// ---------------------------------------------------------------- manifests

pub fn descriptor(id: &str, agency: &str, retrieved: &str) -> Value {
    json!({
        "id": id,
        "title": format!("{id} records"),
        "agency": agency,
        "license": "https://creativecommons.org/publicdomain/zero/1.0/",
        "temporal_coverage": {"start": "1980-01-01T00:00:00Z", "end": "2025-01-01T00:00:00Z"},
        "spatial_coverage": "California",
        "retrieved_at": retrieved
    })
}

/// Closed (lng, lat) square ring as GeoJSON.
pub fn square(lng: f64, lat: f64, size: f64) -> Value {
    json!({"type": "Polygon", "coordinates": [[[lng, lat], [lng + size, lat], [lng + size, lat + size], [lng, lat + size], [lng, lat]]]})
}

pub fn point(lng: f64, lat: f64) -> Value {
    json!({"type": "Point", "coordinates": [lng, lat]})
}

pub fn feature(geometry: Value, properties: Value) -> Value {
    json!({"type": "Feature", "geometry": geometry, "properties": properties})
}

pub fn manifest(id: &str, kind: &str, features: Vec<Value>, extra: Value) -> Manifest {
    let mut m = json!({
        "dataset": descriptor(id, "NOAA", "2024-12-01"),
        "kind": kind,
        "id_property": "id",
        "label_property": "name",
        "levels": {"min_level": 8, "max_level": 13},
        "features": {"type": "FeatureCollection", "features": features}
    });
    for (k, v) in extra.as_object().cloned().unwrap_or_default() {
        m[k] = v;
    }
    serde_json::from_value(m).expect("fixture manifests are valid")
}

pub fn load(store: &mut Store, manifests: &[Manifest]) -> Vec<IngestReport> {
    let vocab = Vocabulary::default();
    manifests
        .iter()
        .map(|m| ingest(store, &vocab, m, std::path::Path::new("."), &IngestOptions::default()).expect("fixture ingests"))
        .collect()
}

pub fn entity(dataset: &str, id: &str) -> Term {
    entity_iri(dataset, id).unwrap()
}

pub fn window(start: &str, end: &str) -> Value {
    json!({"start": start, "end": end})
}

// Competency fixtures. Coordinates are (lng, lat) around the Central Coast.

/// County with airports and wildfires: two fires inside the county cross an
/// airport, one inside does not, one outside does.
pub fn wildfire_fixture() -> Vec<Manifest> {
    let counties = manifest(
        "counties",
        "kwg-ont:AdministrativeRegion",
        vec![
            feature(square(-120.0, 34.5, 1.0), json!({"id": "06083", "name": "Santa Barbara County"})),
            feature(square(-118.5, 34.5, 1.0), json!({"id": "06037", "name": "Los Angeles County"})),
        ],
        json!({}),
    );
    let airports = manifest(
        "airports",
        "kwg-ont:Airport",
        vec![
            feature(point(-119.84, 34.43 + 0.2), json!({"id": "SBA", "name": "North Field"})),
            feature(point(-119.30, 35.20), json!({"id": "IZA", "name": "Valley Strip"})),
            feature(point(-119.05, 34.90), json!({"id": "EDGE", "name": "Border Field"})),
            feature(point(-118.20, 34.90), json!({"id": "LAX", "name": "Basin Field"})),
        ],
        json!({}),
    );
    let fires = manifest(
        "fires",
        "kwg-ont:Wildfire",
        vec![
            feature(square(-119.90, 34.58, 0.12), json!({"id": "W1", "name": "Cave", "start": "2019-11-25"})),
            feature(square(-119.60, 35.00, 0.10), json!({"id": "W2", "name": "Ridge", "start": "2020-07-01"})),
            feature(square(-118.25, 34.85, 0.10), json!({"id": "W3", "name": "Canyon", "start": "2020-08-01"})),
            feature(square(-119.10, 34.85, 0.12), json!({"id": "W4", "name": "Boundary", "start": "2021-06-01"})),
        ],
        json!({"time": {"start": "start"}}),
    );
    vec![counties, airports, fires]
}

/// A weather zone and hazards of several kinds, with death counts.
pub fn disaster_fixture() -> Vec<Manifest> {
    let zones = manifest(
        "zones",
        "kwg-ont:NWZone",
        vec![feature(square(-121.0, 36.0, 1.0), json!({"id": "CAZ530", "name": "Santa Lucia Mountains"}))],
        json!({}),
    );
    let deaths = json!([{"property": "deaths", "observed_property": "kwg-ont:deaths", "unit": "unit:NUM"}]);
    let hazard = |id: &str, lng: f64, lat: f64, start: &str, end: &str, deaths: i64| {
        feature(square(lng, lat, 0.1), json!({"id": id, "name": id, "start": start, "end": end, "deaths": deaths}))
    };
    let extra = json!({"time": {"start": "start", "end": "end"}, "observations": deaths});
    let floods = manifest(
        "floods",
        "kwg-ont:Flood",
        vec![
            hazard("D1", -120.5, 36.5, "2010-01-18", "2010-01-22", 12),
            hazard("D2", -120.7, 36.2, "2015-03-01", "2015-03-02", 2),
            hazard("D4", -119.5, 36.5, "2012-02-01", "2012-02-03", 8),
        ],
        extra.clone(),
    );
    let storms = manifest(
        "storms",
        "kwg-ont:Storm",
        vec![
            hazard("D3", -120.4, 36.4, "1990-12-20", "1990-12-23", 30),
            hazard("D5", -120.3, 36.7, "2020-12-30", "2021-01-05", 5),
            hazard("D6", -120.8, 36.8, "2004-12-20", "2005-01-10", 6),
        ],
        extra,
    );
    vec![zones, floods, storms]
}

/// A city and smoke plumes at various times and places.
pub fn plume_fixture() -> Vec<Manifest> {
    let places = manifest(
        "cities",
        "kwg-ont:AdministrativeRegion",
        vec![feature(square(-121.7, 36.6, 0.1), json!({"id": "salinas", "name": "Salinas"}))],
        json!({}),
    );
    let plume = |id: &str, lng: f64, lat: f64, size: f64, start: &str, end: &str| {
        feature(square(lng, lat, size), json!({"id": id, "name": id, "start": start, "end": end}))
    };
    let plumes = manifest(
        "plumes",
        "kwg-ont:SmokePlume",
        vec![
            plume("SP1", -121.8, 36.5, 0.3, "2024-11-10", "2024-11-12"),
            plume("SP2", -121.8, 36.5, 0.3, "2024-06-01", "2024-06-03"),
            plume("SP3", -120.0, 37.5, 0.3, "2024-12-01", "2024-12-02"),
            plume("SP4", -121.65, 36.65, 0.2, "2024-09-30", "2024-10-02"),
        ],
        json!({"time": {"start": "start", "end": "end"}}),
    );
    vec![places, plumes]
}

/// Three datasets with maintainers and retrieval dates.
pub fn metadata_fixture() -> Vec<Manifest> {
    let specs = [
        ("noaa_storms", "NOAA", "2023-05-01", "Ada Park", "curator", "2022-01-01T00:00:00Z", "2024-01-01T00:00:00Z"),
        ("usgs_quakes", "USGS", "2024-02-15", "Ben Ortiz", "maintainer", "2023-06-01T00:00:00Z", "2025-01-01T00:00:00Z"),
        ("nifc_fires", "NIFC", "2024-02-14", "Chen Wu", "maintainer", "2021-03-01T00:00:00Z", "2022-03-01T00:00:00Z"),
    ];
    specs
        .iter()
        .enumerate()
        .map(|(i, (id, agency, retrieved, name, role, from, until))| {
            let mut d = descriptor(id, agency, retrieved);
            d["roles"] = json!([{
                "person": format!("http://example.org/people/{}", name.to_lowercase().replace(' ', "_")),
                "name": name,
                "role": role,
                "validity": {"start": from, "end": until}
            }]);
            let kind = ["kwg-ont:Storm", "kwg-ont:Earthquake", "kwg-ont:Wildfire"][i];
            let m = json!({
                "dataset": d,
                "kind": kind,
                "id_property": "id",
                "levels": {"min_level": 8, "max_level": 10},
                "time": {"start": "start"},
                "features": {"type": "FeatureCollection", "features": [
                    feature(point(-120.0 + i as f64, 36.0), json!({"id": "e1", "start": "2020-01-01"}))
                ]}
            });
            serde_json::from_value(m).unwrap()
        })
        .collect()
}

/// `n` features inside a one-degree box: points and small squares, each
/// with a time and a numeric observation.
pub fn synthetic_manifest(n: usize, seed: u64) -> Manifest {
    let mut r = rng(seed);
    let features: Vec<Value> = (0..n)
        .map(|i| {
            let (lng, lat) = (r.gen_range(-120.0..-119.0), r.gen_range(34.0..35.0));
            let geometry = if i % 3 == 0 { square(lng, lat, r.gen_range(0.002..0.01)) } else { point(lng, lat) };
            let day = r.gen_range(1..=28);
            feature(
                geometry,
                json!({
                    "id": format!("f{i}"),
                    "name": format!("Site {i}"),
                    "time": format!("2021-03-{day:02}T12:00:00Z"),
                    "reading": (r.gen_range(0.0..100.0f64) * 10.0).round() / 10.0
                }),
            )
        })
        .collect();
    manifest(
        "synthetic",
        "kwg-ont:Storm",
        features,
        json!({
            "time": {"start": "time"},
            "observations": [{"property": "reading", "observed_property": "kwg-ont:windSpeed", "unit": "unit:M-PER-SEC"}]
        }),
    )
}
