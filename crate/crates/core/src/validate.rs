//! Cardinality, value-kind and pairing checks over a store.

use crate::geometry::{parse_wkt, SpatialRelation};
use crate::store::{Store, Term, Triple};
use crate::temporal::{parse_temporal, Granularity};
use crate::vocab::{GEO, KWG_ONT, RDF, SOSA, TIME};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Instances of a class.
    Class(String),
    /// Subjects of any of the predicates.
    SubjectsOf(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Any,
    Iri,
    /// IRI or blank node.
    Node,
    Literal,
    Datatype(String),
    /// A geo:wktLiteral that parses.
    Wkt,
    /// A literal of the granularity's datatype with a valid lexical form.
    Temporal(Granularity),
    /// The value must point back at the focus node with this predicate.
    InverseOf(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub path: String,
    pub min: usize,
    pub max: Option<usize>,
    pub kind: ValueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub id: String,
    pub target: Target,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("shape {shape}: {message}")]
pub struct ShapeError {
    pub shape: String,
    pub message: String,
}

impl Shape {
    pub fn new(id: &str, target: Target, constraints: Vec<Constraint>) -> Result<Shape, ShapeError> {
        let err = |m: String| ShapeError { shape: id.to_string(), message: m };
        for c in &constraints {
            if c.max.is_some_and(|max| max < c.min) {
                return Err(err(format!("min {} exceeds max for {}", c.min, c.path)));
            }
            Term::iri(&c.path).map_err(|e| err(e.to_string()))?;
        }
        Ok(Shape { id: id.to_string(), target, constraints })
    }
}

fn c(path: String, min: usize, max: Option<usize>, kind: ValueKind) -> Constraint {
    Constraint { path, min, max, kind }
}

/// Observation, Region, Geometry, SpatialRelation and TemporalEntity.
pub fn builtin_shapes() -> Vec<Shape> {
    let sosa = |l: &str| format!("{SOSA}{l}");
    let sf = |r: SpatialRelation| format!("{KWG_ONT}{}", r.local_name());
    let time_preds = [
        (Granularity::DateTime, format!("{TIME}inXSDDateTime")),
        (Granularity::Date, format!("{TIME}inXSDDate")),
        (Granularity::Year, format!("{TIME}inXSDgYear")),
    ];
    vec![
        Shape {
            id: "Observation".into(),
            target: Target::Class(sosa("Observation")),
            constraints: vec![
                c(sosa("hasFeatureOfInterest"), 1, Some(1), ValueKind::Node),
                c(sosa("observedProperty"), 1, Some(1), ValueKind::Node),
                c(sosa("hasResult"), 1, None, ValueKind::Any),
                c(sosa("phenomenonTime"), 1, None, ValueKind::Node),
            ],
        },
        Shape {
            id: "Region".into(),
            target: Target::Class(format!("{KWG_ONT}Region")),
            constraints: vec![c(format!("{GEO}hasGeometry"), 1, None, ValueKind::Node)],
        },
        Shape {
            id: "Geometry".into(),
            target: Target::Class(format!("{GEO}Geometry")),
            constraints: vec![c(format!("{GEO}asWKT"), 1, Some(1), ValueKind::Wkt)],
        },
        Shape {
            id: "SpatialRelation".into(),
            target: Target::SubjectsOf(SpatialRelation::ALL.iter().map(|&r| sf(r)).collect()),
            constraints: SpatialRelation::ALL
                .iter()
                .map(|&r| c(sf(r), 0, None, ValueKind::InverseOf(sf(r.inverse()))))
                .collect(),
        },
        Shape {
            id: "TemporalEntity".into(),
            target: Target::SubjectsOf(time_preds.iter().map(|(_, p)| p.clone()).collect()),
            constraints: time_preds.into_iter().map(|(g, p)| c(p, 0, None, ValueKind::Temporal(g))).collect(),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub focus: String,
    pub shape: String,
    pub constraint: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub conforms: bool,
    pub total: usize,
    /// Violations per shape id.
    pub summary: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

fn focus_nodes(store: &Store, target: &Target) -> BTreeSet<Term> {
    match target {
        Target::Class(class) => store.subjects(&Term::iri_unchecked(format!("{RDF}type")), &Term::iri_unchecked(class)).into_iter().collect(),
        Target::SubjectsOf(preds) => preds
            .iter()
            .flat_map(|p| store.match_pattern(None, Some(&Term::iri_unchecked(p)), None))
            .map(|t| t.subject)
            .collect(),
    }
}

fn check_value(store: &Store, focus: &Term, v: &Term, kind: &ValueKind) -> Option<String> {
    let ok = match kind {
        ValueKind::Any => true,
        ValueKind::Iri => v.is_iri(),
        ValueKind::Node => !v.is_literal(),
        ValueKind::Literal => v.is_literal(),
        ValueKind::Datatype(dt) => v.datatype() == Some(dt.as_str()),
        ValueKind::Wkt => {
            if v.datatype() != Some(&format!("{GEO}wktLiteral")) {
                return Some(format!("{v} is not a WKT literal"));
            }
            match parse_wkt(v.value()) {
                Ok(_) => true,
                Err(e) => return Some(format!("unparseable WKT: {e}")),
            }
        }
        ValueKind::Temporal(g) => {
            let dt = g.datatype_iri();
            if v.datatype() != Some(dt.as_str()) {
                return Some(format!("{v} is not a {dt} literal"));
            }
            match parse_temporal(v.value(), &dt) {
                Ok(_) => true,
                Err(e) => return Some(format!("invalid lexical form: {e}")),
            }
        }
        ValueKind::InverseOf(inv) => {
            let back = Triple { subject: v.clone(), predicate: Term::iri_unchecked(inv), object: focus.clone() };
            if store.contains(&back) {
                true
            } else {
                return Some(format!("missing inverse {}", back.to_ntriples()));
            }
        }
    };
    (!ok).then(|| format!("{v} does not match {kind:?}"))
}

fn validate_shape(store: &Store, shape: &Shape) -> Vec<Violation> {
    let mut out = Vec::new();
    for focus in focus_nodes(store, &shape.target) {
        for con in &shape.constraints {
            let values = store.objects(&focus, &Term::iri_unchecked(&con.path));
            let n = values.len();
            let violation = |message: String| Violation {
                focus: focus.value().to_string(),
                shape: shape.id.clone(),
                constraint: con.path.clone(),
                message,
            };
            if n < con.min {
                out.push(violation(format!("expected at least {} value(s), found {n}", con.min)));
            } else if con.max.is_some_and(|m| n > m) {
                out.push(violation(format!("expected at most {} value(s), found {n}", con.max.unwrap())));
            }
            for v in &values {
                if let Some(m) = check_value(store, &focus, v, &con.kind) {
                    out.push(violation(m));
                }
            }
        }
    }
    out
}

/// Checks every shape; problems become report entries, never errors.
pub fn validate(store: &Store, shapes: &[Shape]) -> ViolationReport {
    let mut violations: Vec<Violation> = shapes.par_iter().flat_map_iter(|s| validate_shape(store, s)).collect();
    violations.sort();
    let mut summary = BTreeMap::new();
    for s in shapes {
        summary.insert(s.id.clone(), 0);
    }
    for v in &violations {
        *summary.entry(v.shape.clone()).or_insert(0) += 1;
    }
    ViolationReport { conforms: violations.is_empty(), total: violations.len(), summary, violations }
}

/// Kinds of defect the injection harness can plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DefectKind {
    MissingObservedProperty,
    ExtraFeatureOfInterest,
    MissingRegionGeometry,
    BadWkt,
    UnpairedSpatialLink,
    BadTemporalLiteral,
}

impl DefectKind {
    pub const ALL: [DefectKind; 6] = [
        DefectKind::MissingObservedProperty,
        DefectKind::ExtraFeatureOfInterest,
        DefectKind::MissingRegionGeometry,
        DefectKind::BadWkt,
        DefectKind::UnpairedSpatialLink,
        DefectKind::BadTemporalLiteral,
    ];
}

/// A planted defect: what was broken and which node should be reported.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub focus: String,
    pub shape: String,
}

/// Breaks a conforming store so each planted defect yields exactly one
/// violation. `pick(n)` chooses an index below `n`. Kinds with no
/// remaining candidate are skipped, so the result may be shorter than
/// `plan`.
pub fn inject_defects(store: &mut Store, plan: &[DefectKind], mut pick: impl FnMut(usize) -> usize) -> Vec<Defect> {
    let iri = |s: String| Term::iri_unchecked(s);
    let ty = iri(format!("{RDF}type"));
    let mut used: BTreeSet<Term> = BTreeSet::new();
    let mut out = Vec::new();
    for &kind in plan {
        let (candidates, shape): (Vec<Triple>, &str) = match kind {
            DefectKind::MissingObservedProperty | DefectKind::ExtraFeatureOfInterest => {
                let p = if kind == DefectKind::MissingObservedProperty { "observedProperty" } else { "hasFeatureOfInterest" };
                (store.match_pattern(None, Some(&iri(format!("{SOSA}{p}"))), None), "Observation")
            }
            DefectKind::MissingRegionGeometry => {
                let regions = store.subjects(&ty, &iri(format!("{KWG_ONT}Region")));
                let has = iri(format!("{GEO}hasGeometry"));
                let ts = regions
                    .iter()
                    .map(|r| store.match_pattern(Some(r), Some(&has), None))
                    .filter(|ts| ts.len() == 1)
                    .flatten()
                    .collect();
                (ts, "Region")
            }
            DefectKind::BadWkt => (store.match_pattern(None, Some(&iri(format!("{GEO}asWKT"))), None), "Geometry"),
            DefectKind::UnpairedSpatialLink => {
                let ts = SpatialRelation::ALL
                    .iter()
                    .flat_map(|r| store.match_pattern(None, Some(&iri(format!("{KWG_ONT}{}", r.local_name()))), None))
                    .collect();
                (ts, "SpatialRelation")
            }
            DefectKind::BadTemporalLiteral => {
                let ts = ["inXSDDateTime", "inXSDDate", "inXSDgYear"]
                    .iter()
                    .flat_map(|p| store.match_pattern(None, Some(&iri(format!("{TIME}{p}"))), None))
                    .collect();
                (ts, "TemporalEntity")
            }
        };
        // one defect per node; for spatial links both ends count as used so
        // a pair is never broken from both sides
        let candidates: Vec<Triple> = candidates
            .into_iter()
            .filter(|t| !used.contains(&t.subject) && !(kind == DefectKind::UnpairedSpatialLink && used.contains(&t.object)))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let t = candidates[pick(candidates.len()) % candidates.len()].clone();
        let mut focus = t.subject.clone();
        match kind {
            DefectKind::MissingObservedProperty | DefectKind::MissingRegionGeometry => {
                store.remove(&t);
            }
            DefectKind::ExtraFeatureOfInterest => {
                let extra = iri(format!("{}.extraFeature", t.object.value()));
                store.insert(&Triple { object: extra, ..t.clone() }).expect("well-formed");
            }
            DefectKind::BadWkt => {
                store.remove(&t);
                let bad = Term::Literal { lexical: "POLYGON ((0 0, 1".into(), datatype: format!("{GEO}wktLiteral"), lang: None };
                store.insert(&Triple { object: bad, ..t.clone() }).expect("well-formed");
            }
            DefectKind::UnpairedSpatialLink => {
                // removing the forward triple leaves its inverse unpaired
                store.remove(&t);
                used.insert(t.subject.clone());
                focus = t.object.clone();
            }
            DefectKind::BadTemporalLiteral => {
                store.remove(&t);
                let dt = t.object.datatype().unwrap_or_default().to_string();
                let bad = Term::Literal { lexical: "2021-13-45".into(), datatype: dt, lang: None };
                store.insert(&Triple { object: bad, ..t.clone() }).expect("well-formed");
            }
        }
        used.insert(focus.clone());
        out.push(Defect { kind, focus: focus.value().to_string(), shape: shape.to_string() });
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgg::LevelRange;
    use crate::geometry::Geometry;
    use crate::materialize::*;
    use crate::temporal::TemporalLiteral;

    fn sample() -> Store {
        let v = Vocabulary::default();
        let mut store = Store::new();
        let mut add = |ts: Vec<Triple>| {
            for t in ts {
                store.insert(&t).unwrap();
            }
        };
        let zip = format!("{KWG_ONT}ZipCodeArea");
        for k in 0..3 {
            let x = k as f64 * 0.3;
            let g = Geometry::polygon_lnglat(&[(x, 0.0), (x + 0.2, 0.0), (x + 0.2, 0.2), (x, 0.2)]).unwrap();
            let mut rec = FeatureRecord::new("zip", &format!("z{k}"), &zip, g.clone());
            rec.start = Some(TemporalLiteral::infer("2020-01-01").unwrap());
            add(materialize_entity(&v, &rec).unwrap());
            let e = rec.iri().unwrap();
            add(materialize_spatial_links(&geometry_iri(&e), &g, LevelRange::new(6, 8).unwrap()).unwrap());
            let mut spec = ObservationSpec::numeric(e.value(), &format!("{KWG_ONT}population"), 100.0, Some(&format!("{}NUM", crate::vocab::UNIT)));
            spec.phenomenon_time = Some(TemporalLiteral::infer("2020").unwrap());
            add(materialize_observation(&spec).unwrap());
        }
        store
    }

    #[test]
    fn clean_graph_conforms() {
        let report = validate(&sample(), &builtin_shapes());
        assert!(report.conforms, "{:?}", report.violations);
        assert_eq!(report.summary.len(), 5);
    }

    #[test]
    fn one_missing_observed_property() {
        let mut store = sample();
        let defects = inject_defects(&mut store, &[DefectKind::MissingObservedProperty], |_| 0);
        let report = validate(&store, &builtin_shapes());
        assert_eq!(report.total, 1);
        assert_eq!(report.violations[0].focus, defects[0].focus);
        assert_eq!(report.violations[0].shape, "Observation");
    }

    #[test]
    fn each_defect_kind_detected_once() {
        for kind in DefectKind::ALL {
            let mut store = sample();
            let defects = inject_defects(&mut store, &[kind], |n| n / 2);
            assert_eq!(defects.len(), 1);
            let report = validate(&store, &builtin_shapes());
            assert_eq!(report.total, 1, "{kind:?}: {:?}", report.violations);
            assert_eq!(report.violations[0].focus, defects[0].focus);
            assert_eq!(report.violations[0].shape, defects[0].shape);
        }
    }

    #[test]
    fn bad_shape_rejected() {
        let bad = Shape::new("x", Target::Class("http://x/C".into()), vec![c("http://x/p".into(), 2, Some(1), ValueKind::Any)]);
        assert!(bad.is_err());
    }
}
