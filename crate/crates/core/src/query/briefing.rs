//! The area briefing: what is here, what happened here, who knows about it.

use super::pattern::parse_term;
use super::spatial::{area_matches, check_area, stored_level_range};
use super::QueryError;
use crate::dgg::COVERING_CAP;
use crate::geometry::{geometry_from_geojson, parse_wkt, Geometry};
use crate::materialize::{scope_of, temporal_extent};
use crate::store::{PrefixTable, Store, Term, Triple};
use crate::temporal::TimeInterval;
use crate::vocab::{term, DEO, KWG_ONT, QUDT, RDF, RDFS, SKOS, SOSA};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq)]
pub struct BriefingRequest {
    pub area: Geometry,
    pub window: Option<TimeInterval>,
    /// Restricts places and hazards to instances of any of these classes.
    pub kinds: Vec<Term>,
    /// Restricts experts to these topics or narrower ones.
    pub topics: Vec<Term>,
    pub exact: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRequest {
    area: serde_json::Value,
    #[serde(default)]
    window: Option<TimeInterval>,
    #[serde(default)]
    kinds: Vec<String>,
    #[serde(default)]
    topics: Vec<String>,
    #[serde(default = "yes")]
    exact: bool,
}

fn yes() -> bool {
    true
}

impl BriefingRequest {
    pub fn new(area: Geometry) -> BriefingRequest {
        BriefingRequest { area, window: None, kinds: Vec::new(), topics: Vec::new(), exact: true }
    }

    /// JSON form; `area` is WKT text or a GeoJSON geometry object.
    pub fn from_json(text: &str, prefixes: &PrefixTable) -> Result<BriefingRequest, QueryError> {
        let raw: RawRequest = serde_json::from_str(text).map_err(|e| QueryError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let area = match &raw.area {
            serde_json::Value::String(wkt) => parse_wkt(wkt).map_err(|e| QueryError::InvalidArea(e.to_string()))?,
            v @ serde_json::Value::Object(_) => {
                geometry_from_geojson(v).map_err(|e| QueryError::InvalidArea(e.to_string()))?
            }
            _ => return Err(QueryError::InvalidArea("area must be WKT text or a GeoJSON geometry".into())),
        };
        check_area(&area)?;
        let terms = |v: &[String]| v.iter().map(|s| parse_term(s, prefixes)).collect::<Result<Vec<_>, _>>();
        Ok(BriefingRequest {
            area,
            window: raw.window,
            kinds: terms(&raw.kinds)?,
            topics: terms(&raw.topics)?,
            exact: raw.exact,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BriefingItem {
    pub iri: String,
    pub label: Option<String>,
    pub kind: String,
    pub matched_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BriefingReport {
    pub places: Vec<BriefingItem>,
    pub hazards: Vec<BriefingItem>,
    pub observations: Vec<BriefingItem>,
    pub experts: Vec<BriefingItem>,
    pub counts: BTreeMap<String, usize>,
}

fn has_type(store: &Store, e: &Term, class: &Term) -> bool {
    store.contains(&Triple { subject: e.clone(), predicate: term(RDF, "type"), object: class.clone() })
}

fn label(store: &Store, e: &Term) -> Option<String> {
    let mut ls: Vec<String> =
        store.objects(e, &term(RDFS, "label")).iter().filter_map(|l| l.lexical().map(String::from)).collect();
    ls.sort();
    ls.into_iter().next()
}

/// Most specific known kind: a type declared as a direct subclass of one of
/// the family roots, else the root itself.
fn kind_of(store: &Store, e: &Term, roots: &[Term]) -> String {
    let sub = term(RDFS, "subClassOf");
    let mut types = store.objects(e, &term(RDF, "type"));
    types.sort();
    types
        .iter()
        .find(|t| roots.iter().any(|r| store.contains(&Triple { subject: (*t).clone(), predicate: sub.clone(), object: r.clone() })))
        .or_else(|| types.iter().find(|t| roots.contains(t)))
        .or(types.first())
        .map(|t| t.value().to_string())
        .unwrap_or_default()
}

/// The topic and everything broader.
fn broader_closure(store: &Store, topic: &Term) -> BTreeSet<Term> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![topic.clone()];
    while let Some(t) = stack.pop() {
        if seen.insert(t.clone()) {
            stack.extend(store.objects(&t, &term(SKOS, "broader")));
        }
    }
    seen
}

fn observation_label(store: &Store, o: &Term, property: &Term) -> String {
    let prop = property.value().rsplit(['/', '#']).next().unwrap_or_default().to_string();
    let value = store.objects(o, &term(SOSA, "hasResult")).into_iter().find_map(|r| {
        let v = store.objects(&r, &term(QUDT, "numericValue")).into_iter().next()
            .or_else(|| store.objects(&r, &term(RDF, "value")).into_iter().next())?;
        Some(v.value().to_string())
    });
    match value {
        Some(v) => format!("{prop} = {v}"),
        None => prop,
    }
}

pub fn briefing(store: &Store, req: &BriefingRequest) -> Result<BriefingReport, QueryError> {
    briefing_capped(store, req, COVERING_CAP)
}

/// As [`briefing`], refusing query coverings of more than `cap` cells.
pub fn briefing_capped(store: &Store, req: &BriefingRequest, cap: usize) -> Result<BriefingReport, QueryError> {
    let range = stored_level_range(store);
    let matches = area_matches(store, &req.area, &[], req.exact, range, cap)?;
    let place_roots = [term(KWG_ONT, "Region"), term(KWG_ONT, "Place")];
    let hazard_roots = [term(KWG_ONT, "Hazard"), term(DEO, "Event")];
    let in_window = |scope: Option<TimeInterval>| match (&req.window, scope) {
        (None, _) => true,
        (Some(w), Some(s)) => w.intersects(&s),
        (Some(_), None) => false,
    };
    let kind_ok = |e: &Term| req.kinds.is_empty() || req.kinds.iter().any(|k| has_type(store, e, k));

    let mut places = Vec::new();
    let mut hazards = Vec::new();
    let mut cells_of: BTreeMap<Term, usize> = BTreeMap::new();
    for m in &matches {
        cells_of.insert(m.entity.clone(), m.matched_cells);
        let item = |roots: &[Term]| BriefingItem {
            iri: m.entity.value().to_string(),
            label: label(store, &m.entity),
            kind: kind_of(store, &m.entity, roots),
            matched_cells: m.matched_cells,
        };
        if place_roots.iter().any(|r| has_type(store, &m.entity, r)) {
            if kind_ok(&m.entity) {
                places.push(item(&place_roots));
            }
        } else if hazard_roots.iter().any(|r| has_type(store, &m.entity, r))
            && kind_ok(&m.entity)
            && in_window(scope_of(store, &m.entity))
        {
            hazards.push(item(&hazard_roots));
        }
    }

    let mut observations = Vec::new();
    for item in places.iter().chain(hazards.iter()) {
        let foi = Term::iri_unchecked(&item.iri);
        for o in store.subjects(&term(SOSA, "hasFeatureOfInterest"), &foi) {
            let when = store.objects(&o, &term(SOSA, "phenomenonTime")).into_iter().find_map(|t| temporal_extent(store, &t));
            if !in_window(when) {
                continue;
            }
            let property = store.objects(&o, &term(SOSA, "observedProperty")).into_iter().next();
            let Some(property) = property else { continue };
            observations.push(BriefingItem {
                iri: o.value().to_string(),
                label: Some(observation_label(store, &o, &property)),
                kind: property.value().to_string(),
                matched_cells: item.matched_cells,
            });
        }
    }

    let mut experts = Vec::new();
    let scope_pred = term(KWG_ONT, "hasSpatialScope");
    let mut seen = BTreeSet::new();
    for (region, &cells) in &cells_of {
        for x in store.subjects(&scope_pred, region) {
            if !has_type(store, &x, &term(KWG_ONT, "Expert")) || !in_window(scope_of(store, &x)) {
                continue;
            }
            if !req.topics.is_empty() {
                let expertise = store.objects(&x, &term(KWG_ONT, "hasExpertise"));
                let covered = expertise.iter().any(|t| {
                    let up = broader_closure(store, t);
                    req.topics.iter().any(|q| up.contains(q))
                });
                if !covered {
                    continue;
                }
            }
            if seen.insert(x.clone()) {
                experts.push(BriefingItem {
                    iri: x.value().to_string(),
                    label: label(store, &x),
                    kind: format!("{KWG_ONT}Expert"),
                    matched_cells: cells,
                });
            } else if let Some(e) = experts.iter_mut().find(|e| e.iri == x.value()) {
                e.matched_cells = e.matched_cells.max(cells);
            }
        }
    }

    for section in [&mut places, &mut hazards, &mut observations, &mut experts] {
        section.sort();
    }
    let counts = BTreeMap::from([
        ("places".to_string(), places.len()),
        ("hazards".to_string(), hazards.len()),
        ("observations".to_string(), observations.len()),
        ("experts".to_string(), experts.len()),
    ]);
    Ok(BriefingReport { places, hazards, observations, experts, counts })
}
