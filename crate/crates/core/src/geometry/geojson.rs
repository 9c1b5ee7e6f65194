use super::{Geometry, GeometryError, LineString, Polygon};
use crate::sphere::LatLng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

/// A scalar feature property. Nested arrays and objects are kept as their
/// JSON text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl PropertyValue {
    fn from_json(v: &Value) -> Option<PropertyValue> {
        match v {
            Value::Null => None,
            Value::Bool(b) => Some(PropertyValue::Bool(*b)),
            Value::Number(n) => n.as_f64().map(PropertyValue::Number),
            Value::String(s) => Some(PropertyValue::Text(s.clone())),
            other => Some(PropertyValue::Text(other.to_string())),
        }
    }

    pub fn as_text(&self) -> String {
        match self {
            PropertyValue::Bool(b) => b.to_string(),
            PropertyValue::Number(n) => n.to_string(),
            PropertyValue::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            PropertyValue::Number(n) => Some(*n),
            PropertyValue::Text(s) => s.trim().parse().ok(),
            PropertyValue::Bool(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureError {
    /// Position of the feature in the collection.
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFeature {
    /// Position of the feature in the collection.
    pub index: usize,
    pub id: Option<String>,
    pub geometry: Geometry,
    pub properties: BTreeMap<String, PropertyValue>,
}

/// Result of parsing a document: good features plus per-feature failures.
#[derive(Debug, Clone, Default)]
pub struct FeatureParse {
    pub features: Vec<ParsedFeature>,
    pub errors: Vec<FeatureError>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoJsonError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("document must be a FeatureCollection or Feature, got {0}")]
    NotFeature(String),
    #[error("{0}")]
    Geometry(String),
}

/// Parses a FeatureCollection or a single Feature.
pub fn parse_geojson(document: &str) -> Result<FeatureParse, GeoJsonError> {
    let value: Value = serde_json::from_str(document).map_err(|e| GeoJsonError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    parse_geojson_value(&value)
}

pub fn parse_geojson_value(value: &Value) -> Result<FeatureParse, GeoJsonError> {
    let kind = value.get("type").and_then(Value::as_str).unwrap_or("");
    let features: Vec<&Value> = match kind {
        "FeatureCollection" => value
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| GeoJsonError::NotFeature("FeatureCollection without a features array".into()))?
            .iter()
            .collect(),
        "Feature" => vec![value],
        other => return Err(GeoJsonError::NotFeature(other.to_string())),
    };
    let mut out = FeatureParse::default();
    for (index, f) in features.into_iter().enumerate() {
        match parse_feature(f) {
            Ok(feature) => out.features.push(ParsedFeature { index, ..feature }),
            Err(message) => out.errors.push(FeatureError { index, message }),
        }
    }
    Ok(out)
}

fn parse_feature(f: &Value) -> Result<ParsedFeature, String> {
    if f.get("type").and_then(Value::as_str) != Some("Feature") {
        return Err("not a Feature object".into());
    }
    let geometry = match f.get("geometry") {
        None | Some(Value::Null) => return Err("feature has no geometry".into()),
        Some(g) => geometry_from_geojson(g).map_err(|e| e.to_string())?,
    };
    let properties = match f.get("properties") {
        Some(Value::Object(map)) => {
            map.iter().filter_map(|(k, v)| PropertyValue::from_json(v).map(|v| (k.clone(), v))).collect()
        }
        _ => BTreeMap::new(),
    };
    let id = match f.get("id") {
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        _ => None,
    };
    Ok(ParsedFeature { index: 0, id, geometry, properties })
}

fn position(v: &Value) -> Result<LatLng, GeoJsonError> {
    let arr = v.as_array().filter(|a| a.len() >= 2).ok_or_else(|| GeoJsonError::Geometry("bad position".into()))?;
    let lng = arr[0].as_f64().ok_or_else(|| GeoJsonError::Geometry("non-numeric longitude".into()))?;
    let lat = arr[1].as_f64().ok_or_else(|| GeoJsonError::Geometry("non-numeric latitude".into()))?;
    LatLng::new(lat, lng).map_err(|e| GeoJsonError::Geometry(e.to_string()))
}

fn positions(v: &Value) -> Result<Vec<LatLng>, GeoJsonError> {
    v.as_array().ok_or_else(|| GeoJsonError::Geometry("expected an array of positions".into()))?.iter().map(position).collect()
}

fn polygon(v: &Value) -> Result<Polygon, GeoJsonError> {
    let rings = v.as_array().filter(|r| !r.is_empty()).ok_or_else(|| GeoJsonError::Geometry("polygon without rings".into()))?;
    let exterior = positions(&rings[0])?;
    let holes = rings[1..].iter().map(positions).collect::<Result<Vec<_>, _>>()?;
    Polygon::new(exterior, holes).map_err(geometry_error)
}

fn geometry_error(e: GeometryError) -> GeoJsonError {
    GeoJsonError::Geometry(e.to_string())
}

/// Converts a GeoJSON geometry object.
pub fn geometry_from_geojson(g: &Value) -> Result<Geometry, GeoJsonError> {
    let kind = g.get("type").and_then(Value::as_str).unwrap_or("");
    let coords = g.get("coordinates").ok_or_else(|| GeoJsonError::Geometry(format!("{kind} without coordinates")))?;
    match kind {
        "Point" => Ok(Geometry::Point(position(coords)?)),
        "LineString" => Ok(Geometry::LineString(LineString::new(positions(coords)?).map_err(geometry_error)?)),
        "Polygon" => Ok(Geometry::Polygon(polygon(coords)?)),
        "MultiPolygon" => {
            let polys = coords
                .as_array()
                .filter(|p| !p.is_empty())
                .ok_or_else(|| GeoJsonError::Geometry("empty MultiPolygon".into()))?
                .iter()
                .map(polygon)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Geometry::MultiPolygon(polys))
        }
        other => Err(GeoJsonError::Geometry(format!("unsupported geometry type {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","id":1,"geometry":{"type":"Point","coordinates":[-95.3,29.9]},"properties":{"name":"IAH","elev":29.5}},
            {"type":"Feature","geometry":{"type":"Point","coordinates":[-95.2,29.6]},"properties":{"name":"HOU","open":true}}
        ]}"#;
        let parsed = parse_geojson(doc).unwrap();
        assert_eq!(parsed.features.len(), 2);
        assert!(parsed.errors.is_empty());
        let first = &parsed.features[0];
        assert_eq!(first.id.as_deref(), Some("1"));
        assert_eq!(first.properties["name"], PropertyValue::Text("IAH".into()));
        assert_eq!(first.properties["elev"], PropertyValue::Number(29.5));
        assert_eq!(parsed.features[1].properties["open"], PropertyValue::Bool(true));
    }

    #[test]
    fn null_geometry_is_a_feature_error() {
        let doc = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","geometry":null,"properties":{}},
            {"type":"Feature","geometry":{"type":"MultiPoint","coordinates":[[0,0]]},"properties":{}},
            {"type":"Feature","geometry":{"type":"Point","coordinates":[1,1]},"properties":{}}
        ]}"#;
        let parsed = parse_geojson(doc).unwrap();
        assert_eq!(parsed.features.len(), 1);
        assert_eq!(parsed.errors.iter().map(|e| e.index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn malformed_document() {
        assert!(matches!(parse_geojson("{\"type\": "), Err(GeoJsonError::Json { .. })));
        assert!(matches!(parse_geojson("{\"type\": \"Point\", \"coordinates\": [0, 0]}"), Err(GeoJsonError::NotFeature(_))));
    }

    #[test]
    fn polygon_with_hole_area() {
        let doc = r#"{"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[
            [[0,0],[3,0],[3,3],[0,3],[0,0]],
            [[1,1],[1,2],[2,2],[2,1],[1,1]]
        ]}}"#;
        let parsed = parse_geojson(doc).unwrap();
        let g = &parsed.features[0].geometry;
        let poly = &g.polygons()[0];
        assert_eq!(poly.holes().len(), 1);
        // oracle: Girard's theorem per ring, outer minus hole
        let girard = |ring: &[(f64, f64)]| -> f64 {
            let pts: Vec<_> = ring.iter().map(|&(lng, lat)| LatLng::new(lat, lng).unwrap().to_point()).collect();
            let n = pts.len();
            let mut angles = 0.0;
            for i in 0..n {
                let (prev, cur, next) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
                let t1 = cur.cross(prev).normalize();
                let t2 = cur.cross(next).normalize();
                angles += t1.angle(t2);
            }
            angles - (n as f64 - 2.0) * std::f64::consts::PI
        };
        let outer = girard(&[(0.0, 0.0), (3.0, 0.0), (3.0, 3.0), (0.0, 3.0)]);
        let hole = girard(&[(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 1.0)]);
        let expected = outer - hole;
        assert!(((g.area() - expected) / expected).abs() < 1e-9, "{} vs {}", g.area(), expected);
    }
}
