use axum::body::Body;
use axum::http::{Request, StatusCode};
use geokg_core::ingest::{ingest, IngestOptions, Manifest};
use geokg_core::materialize::Vocabulary;
use geokg_core::query::{briefing, execute, BriefingRequest, Query};
use geokg_core::store::{PrefixTable, Store};
use geokg_core::validate::{inject_defects, DefectKind};
use geokg_service::api::{briefing_json, query_json};
use geokg_service::views::canonical_json;
use geokg_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use std::sync::Arc;
use tower::ServiceExt;

fn state() -> (Arc<AppState>, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let config = ServiceConfig { data_dir: dir.path().to_path_buf(), ..ServiceConfig::default() };
    (AppState::new(config, Store::new()), dir)
}

fn descriptor(id: &str) -> Value {
    json!({
        "id": id,
        "title": format!("{id} dataset"),
        "agency": "NOAA",
        "license": "https://creativecommons.org/publicdomain/zero/1.0/",
        "temporal_coverage": {"start": "2020-01-01T00:00:00Z", "end": "2021-01-01T00:00:00Z"},
        "spatial_coverage": "test area",
        "retrieved_at": "2021-02-01"
    })
}

fn square(x: f64, y: f64, size: f64) -> Value {
    json!({"type": "Polygon", "coordinates": [[[x, y], [x + size, y], [x + size, y + size], [x, y + size], [x, y]]]})
}

fn plumes_manifest() -> Value {
    json!({
        "dataset": descriptor("plumes"),
        "kind": "kwg-ont:SmokePlume",
        "id_property": "id",
        "time": {"start": "start", "end": "end"},
        "levels": {"min_level": 7, "max_level": 9},
        "features": {"type": "FeatureCollection", "features": [
            {"type": "Feature", "geometry": square(-120.0, 38.0, 0.5),
             "properties": {"id": "p1", "start": "2020-08-16", "end": "2020-08-20", "name": "August plume"}}
        ]}
    })
}

fn counties_manifest() -> Value {
    let features: Vec<Value> = (0..3)
        .map(|i| json!({"type": "Feature", "geometry": square(-121.0 + i as f64, 37.5, 1.0),
                        "properties": {"fips": format!("0600{i}"), "name": format!("County {i}")}}))
        .collect();
    json!({
        "dataset": descriptor("counties"),
        "kind": "kwg-ont:AdministrativeRegion",
        "id_property": "fips",
        "levels": {"min_level": 7, "max_level": 9},
        "region_topology": true,
        "features": {"type": "FeatureCollection", "features": features}
    })
}

fn quakes_manifest(n: usize) -> Value {
    let features: Vec<Value> = (0..n)
        .map(|i| json!({"type": "Feature",
                        "geometry": {"type": "Point", "coordinates": [-117.0 + (i % 10) as f64 * 0.05, 35.0 + (i / 10) as f64 * 0.05]},
                        "properties": {"code": format!("q{i}"), "mag": 2.0 + (i % 7) as f64 * 0.5, "time": "2020-03-01T10:00:00Z"}}))
        .collect();
    json!({
        "dataset": descriptor("quakes"),
        "kind": "kwg-ont:Earthquake",
        "id_property": "code",
        "time": {"start": "time"},
        "observations": [{"property": "mag", "observed_property": "kwg-ont:magnitude", "unit": "unit:MagnitudeRichter"}],
        "levels": {"min_level": 9, "max_level": 12},
        "features": {"type": "FeatureCollection", "features": features}
    })
}

async fn call(state: &Arc<AppState>, method: &str, uri: &str, body: String) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body)).unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn post(state: &Arc<AppState>, uri: &str, body: &Value) -> (StatusCode, Value) {
    let (s, b) = call(state, "POST", uri, body.to_string()).await;
    (s, serde_json::from_str(&b).unwrap())
}

#[tokio::test]
async fn ingest_is_deterministic_and_rejects_duplicates() {
    let mut counts = Vec::new();
    for _ in 0..2 {
        let (st, _dir) = state();
        let (status, report) = post(&st, "/ingest", &quakes_manifest(100)).await;
        assert_eq!(status, StatusCode::OK, "{report}");
        assert_eq!(report["feature_count"], 100);
        assert_eq!(report["violation_count"], 0);
        counts.push(report["triple_count"].as_u64().unwrap());
        let (status, _) = post(&st, "/ingest", &quakes_manifest(100)).await;
        assert_eq!(status, StatusCode::CONFLICT);
        assert!(st.config.store_path().exists());
    }
    assert_eq!(counts[0], counts[1]);
    assert!(counts[0] > 0);
}

#[tokio::test]
async fn malformed_manifests_are_bad_requests() {
    let (st, _dir) = state();
    let (status, _) = call(&st, "POST", "/ingest", "{\"dataset\":".into()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let mut m = quakes_manifest(1);
    m["kind"] = json!("kwg-ont:Volcano");
    assert_eq!(post(&st, "/ingest", &m).await.0, StatusCode::BAD_REQUEST);
    let mut m = quakes_manifest(1);
    m.as_object_mut().unwrap().remove("features");
    m["source"] = json!("../outside.geojson");
    assert_eq!(post(&st, "/ingest", &m).await.0, StatusCode::BAD_REQUEST);
    m["source"] = json!("missing.geojson");
    assert_eq!(post(&st, "/ingest", &m).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(st.snapshot().len(), 0);
}

#[tokio::test]
async fn source_files_resolve_in_data_dir() {
    let (st, dir) = state();
    let mut m = quakes_manifest(5);
    let fc = m.as_object_mut().unwrap().remove("features").unwrap();
    std::fs::write(dir.path().join("quakes.geojson"), fc.to_string()).unwrap();
    m["source"] = json!("quakes.geojson");
    let (status, report) = post(&st, "/ingest", &m).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["feature_count"], 5);
}

#[tokio::test]
async fn validation_threshold_gives_422_and_keeps_store() {
    let mut store = Store::new();
    let m: Manifest = serde_json::from_value(quakes_manifest(3)).unwrap();
    ingest(&mut store, &Vocabulary::default(), &m, std::path::Path::new("."), &IngestOptions::default()).unwrap();
    let injected = inject_defects(&mut store, &[DefectKind::MissingObservedProperty], |n| n - 1);
    assert_eq!(injected.len(), 1);
    let before = store.to_nquads();
    let dir = tempfile::tempdir().unwrap();
    let st = AppState::new(ServiceConfig { data_dir: dir.path().into(), ..ServiceConfig::default() }, store);
    let (status, body) = post(&st, "/ingest", &plumes_manifest()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["report"]["total"], 1);
    assert_eq!(st.snapshot().to_nquads(), before);
}

#[tokio::test]
async fn query_pagination_and_errors() {
    let (st, _dir) = state();
    assert_eq!(post(&st, "/ingest", &counties_manifest()).await.0, StatusCode::OK);
    let q = json!({"patterns": [["?c", "a", "kwg-ont:AdministrativeRegion"]], "limit": 1});
    let (status, body) = post(&st, "/query", &q).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["total"], 3);
    assert_eq!(body["bindings"].as_array().unwrap().len(), 1);

    let (_, raw) = call(&st, "POST", "/query", q.to_string()).await;
    let direct = canonical_json(&execute(&st.snapshot(), &Query::from_json(&q.to_string(), &PrefixTable::default()).unwrap()).unwrap());
    assert_eq!(raw, direct);
    assert_eq!(raw, query_json(&st.snapshot(), &q.to_string(), &PrefixTable::default()).unwrap());

    let (status, body) = call(&st, "POST", "/query", "{\"patterns\": [[\"?s\",".into()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let body: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(body["line"], 1);
    assert!(body["column"].as_u64().unwrap() > 0);
    let bad = json!({"patterns": [["?s", "\"lit\"", "?o"]]});
    assert_eq!(post(&st, "/query", &bad).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn briefing_lists_plume_and_matches_in_process() {
    let (st, _dir) = state();
    assert_eq!(post(&st, "/ingest", &counties_manifest()).await.0, StatusCode::OK);
    assert_eq!(post(&st, "/ingest", &plumes_manifest()).await.0, StatusCode::OK);
    let req = json!({
        "area": "POLYGON ((-119.9 38.1, -119.7 38.1, -119.7 38.3, -119.9 38.3, -119.9 38.1))",
        "window": {"start": "2020-08-01T00:00:00Z", "end": "2020-09-01T00:00:00Z"}
    });
    let (status, raw) = call(&st, "POST", "/briefing", req.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{raw}");
    let body: Value = serde_json::from_str(&raw).unwrap();
    let hazards: Vec<&str> = body["hazards"].as_array().unwrap().iter().map(|h| h["iri"].as_str().unwrap()).collect();
    assert_eq!(hazards, vec!["http://stko-kwg.geog.ucsb.edu/lod/resource/plumes.p1"]);
    assert_eq!(body["counts"]["hazards"], 1);
    assert_eq!(body["counts"]["places"], 1);

    let direct = briefing(&st.snapshot(), &BriefingRequest::from_json(&req.to_string(), &PrefixTable::default()).unwrap()).unwrap();
    assert_eq!(raw, canonical_json(&direct));
    assert_eq!(raw, briefing_json(&st.snapshot(), &req.to_string(), &PrefixTable::default(), st.config.covering_cap).unwrap());

    let geojson = json!({"area": square(-119.9, 38.1, 0.2)});
    assert_eq!(post(&st, "/briefing", &geojson).await.0, StatusCode::OK);
    let flat = json!({"area": "POLYGON ((0 0, 1 0, 2 0, 0 0))"});
    assert_eq!(post(&st, "/briefing", &flat).await.0, StatusCode::BAD_REQUEST);
    let line = json!({"area": "LINESTRING (0 0, 1 1)"});
    assert_eq!(post(&st, "/briefing", &line).await.0, StatusCode::BAD_REQUEST);
    let wide = json!({"area": square(-125.0, 30.0, 10.0)});
    assert_eq!(post(&st, "/briefing", &wide).await.0, StatusCode::OK);
    let dir = tempfile::tempdir().unwrap();
    let capped = ServiceConfig { data_dir: dir.path().into(), covering_cap: 100, ..ServiceConfig::default() };
    let small = AppState::new(capped, st.snapshot().as_ref().clone());
    assert_eq!(post(&small, "/briefing", &wide).await.0, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn entity_view_and_facets() {
    let (st, _dir) = state();
    assert_eq!(post(&st, "/ingest", &counties_manifest()).await.0, StatusCode::OK);
    assert_eq!(post(&st, "/ingest", &plumes_manifest()).await.0, StatusCode::OK);
    let (status, raw) = call(&st, "GET", "/entity/kwgr:counties.06001", String::new()).await;
    assert_eq!(status, StatusCode::OK, "{raw}");
    let view: Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(view["geometries"].as_array().unwrap().len(), 1);
    assert!(view["geometries"][0]["wkt"].as_str().unwrap().starts_with("POLYGON"));
    assert!(!view["cells"].as_array().unwrap().is_empty());
    // topology with its neighbours
    assert!(!view["incoming_spatial"].as_array().unwrap().is_empty());

    let full = "/entity/http%3A%2F%2Fstko-kwg.geog.ucsb.edu%2Flod%2Fresource%2Fcounties.06001";
    let (status, raw2) = call(&st, "GET", full, String::new()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(raw, raw2);
    assert_eq!(call(&st, "GET", "/entity/kwgr:nowhere", String::new()).await.0, StatusCode::NOT_FOUND);

    let (status, raw) = call(&st, "GET", "/facets", String::new()).await;
    assert_eq!(status, StatusCode::OK);
    let tree: Value = serde_json::from_str(&raw).unwrap();
    let prefixes = PrefixTable::default();
    let mut checked = 0;
    for root in tree.as_array().unwrap() {
        for f in std::iter::once(root).chain(root["children"].as_array().unwrap()) {
            let class = f["class"].as_str().unwrap();
            let q = json!({"patterns": [["?x", "a", class]]});
            let n = execute(&st.snapshot(), &Query::from_json(&q.to_string(), &prefixes).unwrap()).unwrap().total;
            assert_eq!(f["count"].as_u64().unwrap() as usize, n, "{class}");
            checked += 1;
        }
    }
    assert!(checked > 10);
    let regions = &tree[0];
    assert_eq!(regions["class"], "kwg-ont:Region");
    let names: Vec<&str> = regions["children"].as_array().unwrap().iter().filter_map(|c| c["label"].as_str()).collect();
    for expected in ["ZIP Code Area", "National Weather Zone"] {
        assert!(names.iter().any(|n| n.contains(expected)), "{names:?}");
    }
}

#[tokio::test]
async fn concurrent_reads_agree() {
    let (st, _dir) = state();
    assert_eq!(post(&st, "/ingest", &counties_manifest()).await.0, StatusCode::OK);
    let req = json!({"area": square(-121.0, 37.6, 2.5)}).to_string();
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let st = st.clone();
            let req = req.clone();
            tokio::spawn(async move { call(&st, "POST", "/briefing", req).await })
        })
        .collect();
    let mut outs = Vec::new();
    for t in tasks {
        outs.push(t.await.unwrap());
    }
    assert!(outs.iter().all(|o| o == &outs[0]));
    assert_eq!(outs[0].0, StatusCode::OK);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn serves_over_tcp_and_drains() {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let (st, _dir) = state();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(geokg_service::serve(st, listener, async {
        let _ = rx.await;
    }));
    let mut conn = tokio::net::TcpStream::connect(addr).await.unwrap();
    conn.write_all(b"GET /health HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").await.unwrap();
    let mut resp = String::new();
    conn.read_to_string(&mut resp).await.unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.ends_with(r#"{"statements":0,"status":"ok"}"#), "{resp}");
    tx.send(()).unwrap();
    server.await.unwrap().unwrap();
}
