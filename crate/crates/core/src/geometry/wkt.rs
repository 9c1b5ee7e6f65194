//! WKT subset: POINT, LINESTRING, POLYGON, MULTIPOLYGON with `lng lat`
//! coordinate order.

use super::{Geometry, GeometryError, LineString, Polygon};
use crate::sphere::LatLng;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WktError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported geometry type {0}")]
    Unsupported(String),
    #[error("invalid geometry: {0}")]
    Invalid(#[from] GeometryError),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn error(&self, message: impl Into<String>) -> WktError {
        WktError::Syntax { position: self.pos, message: message.into() }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), WktError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len());
        self.pos += len;
        rest[..len].to_ascii_uppercase()
    }

    fn number(&mut self) -> Result<f64, WktError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')))
            .unwrap_or(rest.len());
        let value = rest[..len].parse::<f64>().map_err(|_| self.error("expected a number"))?;
        self.pos += len;
        Ok(value)
    }

    fn coordinate(&mut self) -> Result<LatLng, WktError> {
        let start = self.pos;
        let lng = self.number()?;
        let lat = self.number()?;
        LatLng::new(lat, lng).map_err(|e| WktError::Syntax { position: start, message: e.to_string() })
    }

    fn coordinate_list(&mut self) -> Result<Vec<LatLng>, WktError> {
        self.expect('(')?;
        let mut out = vec![self.coordinate()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.coordinate()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn polygon_body(&mut self) -> Result<Polygon, WktError> {
        self.expect('(')?;
        let exterior = self.coordinate_list()?;
        let mut holes = Vec::new();
        while self.peek() == Some(',') {
            self.pos += 1;
            holes.push(self.coordinate_list()?);
        }
        self.expect(')')?;
        Ok(Polygon::new(exterior, holes)?)
    }
}

pub fn parse_wkt(text: &str) -> Result<Geometry, WktError> {
    let mut lx = Lexer { src: text, pos: 0 };
    let tag_pos = {
        lx.skip_ws();
        lx.pos
    };
    let tag = lx.word();
    if lx.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
        let modifier = lx.word();
        if modifier == "EMPTY" {
            return Err(WktError::Invalid(GeometryError::Empty));
        }
        return Err(WktError::Unsupported(format!("{tag} {modifier}")));
    }
    let geometry = match tag.as_str() {
        "POINT" => {
            lx.expect('(')?;
            let c = lx.coordinate()?;
            lx.expect(')')?;
            Geometry::Point(c)
        }
        "LINESTRING" => Geometry::LineString(LineString::new(lx.coordinate_list()?)?),
        "POLYGON" => Geometry::Polygon(lx.polygon_body()?),
        "MULTIPOLYGON" => {
            lx.expect('(')?;
            let mut polys = vec![lx.polygon_body()?];
            while lx.peek() == Some(',') {
                lx.pos += 1;
                polys.push(lx.polygon_body()?);
            }
            lx.expect(')')?;
            Geometry::MultiPolygon(polys)
        }
        "" => return Err(WktError::Syntax { position: tag_pos, message: "expected a geometry type".into() }),
        other => return Err(WktError::Unsupported(other.to_string())),
    };
    if lx.peek().is_some() {
        return Err(lx.error("trailing characters"));
    }
    Ok(geometry)
}

fn write_coords(out: &mut String, coords: &[LatLng], close: bool) {
    out.push('(');
    let n = coords.len();
    let total = if close { n + 1 } else { n };
    for k in 0..total {
        let c = coords[k % n];
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{} {}", c.lng, c.lat);
    }
    out.push(')');
}

fn write_polygon(out: &mut String, p: &Polygon) {
    out.push('(');
    for (k, ring) in p.rings().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        write_coords(out, ring.vertices(), true);
    }
    out.push(')');
}

/// Serializes with shortest round-trip float formatting, so parsing the
/// output reproduces the same vertices.
pub fn serialize_wkt(g: &Geometry) -> String {
    let mut out = String::new();
    match g {
        Geometry::Point(p) => {
            let _ = write!(out, "POINT ({} {})", p.lng, p.lat);
        }
        Geometry::LineString(l) => {
            out.push_str("LINESTRING ");
            write_coords(&mut out, l.vertices(), false);
        }
        Geometry::Polygon(p) => {
            out.push_str("POLYGON ");
            write_polygon(&mut out, p);
        }
        Geometry::MultiPolygon(ps) => {
            out.push_str("MULTIPOLYGON (");
            for (k, p) in ps.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_polygon(&mut out, p);
            }
            out.push(')');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point() {
        let g = parse_wkt("POINT (0 0)").unwrap();
        assert_eq!(g, Geometry::Point(LatLng::new(0.0, 0.0).unwrap()));
        assert_eq!(serialize_wkt(&g), "POINT (0 0)");
        let g = parse_wkt("  point(-119.7 34.42) ").unwrap();
        assert_eq!(g, Geometry::point(34.42, -119.7).unwrap());
    }

    #[test]
    fn degenerate_ring() {
        let err = parse_wkt("POLYGON ((0 0, 1 0))").unwrap_err();
        assert_eq!(err, WktError::Invalid(GeometryError::TooFewVertices));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_wkt("POLYGON ((0 0, 1 x, 1 1, 0 0))").unwrap_err() {
            WktError::Syntax { position, .. } => assert_eq!(position, 17),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_wkt("POINT (1 2) junk"), Err(WktError::Syntax { .. })));
        assert!(matches!(parse_wkt("GEOMETRYCOLLECTION (POINT (1 2))"), Err(WktError::Unsupported(_))));
        assert!(matches!(parse_wkt("POINT Z (1 2 3)"), Err(WktError::Unsupported(_))));
        assert!(matches!(parse_wkt("POINT EMPTY"), Err(WktError::Invalid(GeometryError::Empty))));
    }

    #[test]
    fn multipolygon_round_trip() {
        let src = "MULTIPOLYGON (((0 0, 1 0, 1 1, 0 1, 0 0)), ((2 2, 3 2, 3 3, 2 3, 2 2), (2.2 2.2, 2.2 2.8, 2.8 2.8, 2.8 2.2, 2.2 2.2)))";
        let g = parse_wkt(src).unwrap();
        assert_eq!(serialize_wkt(&g), src);
    }

    proptest! {
        #[test]
        fn polygon_round_trip(
            lat in -60.0f64..60.0, lng in -179.0f64..179.0,
            w in 1e-4f64..2.0, h in 1e-4f64..2.0, skew in -0.4f64..0.4,
        ) {
            let ring = [
                (lng, lat), (lng + w, lat + skew * h), (lng + w, lat + h), (lng - skew * w, lat + h), (lng, lat),
            ];
            let g = Geometry::polygon_lnglat(&ring).unwrap();
            let back = parse_wkt(&serialize_wkt(&g)).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
