use super::iri::{child_iri, entity_iri, geometry_iri};
use super::{Batch, MaterializeError, Vocabulary};
use crate::geometry::{serialize_wkt, Geometry, PropertyValue};
use crate::store::{Term, Triple};
use crate::temporal::TemporalLiteral;
use crate::vocab::{term, GEO, KWG_ONT, RDFS};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub dataset: String,
    pub local_id: String,
    pub kind: String,
    pub geometry: Geometry,
    pub properties: BTreeMap<String, PropertyValue>,
    /// Explicit label; otherwise the `name` or `label` property is used.
    pub label: Option<String>,
    pub start: Option<TemporalLiteral>,
    pub end: Option<TemporalLiteral>,
}

impl FeatureRecord {
    pub fn new(dataset: &str, local_id: &str, kind: &str, geometry: Geometry) -> FeatureRecord {
        FeatureRecord {
            dataset: dataset.to_string(),
            local_id: local_id.to_string(),
            kind: kind.to_string(),
            geometry,
            properties: BTreeMap::new(),
            label: None,
            start: None,
            end: None,
        }
    }

    pub fn iri(&self) -> Result<Term, MaterializeError> {
        entity_iri(&self.dataset, &self.local_id)
    }

    fn label_text(&self) -> Option<String> {
        self.label
            .clone()
            .or_else(|| ["name", "label"].iter().find_map(|k| self.properties.get(*k)).map(PropertyValue::as_text))
            .filter(|l| !l.is_empty())
    }
}

/// Typed entity with its geometry node, label and temporal scope.
pub fn materialize_entity(vocab: &Vocabulary, rec: &FeatureRecord) -> Result<Vec<Triple>, MaterializeError> {
    let kind = vocab.kind(&rec.kind).ok_or_else(|| MaterializeError::UnknownKind(rec.kind.clone()))?;
    if rec.geometry.is_empty() {
        return Err(MaterializeError::InvalidGeometry("geometry is empty".into()));
    }
    let e = rec.iri()?;
    let mut b = Batch::default();
    b.typed(&e, Term::iri_unchecked(&kind.term.iri));
    for sup in &kind.supertypes {
        b.typed(&e, Term::iri_unchecked(sup));
    }
    if let Some(label) = rec.label_text() {
        b.add(&e, term(RDFS, "label"), Term::string(label));
    }
    let g = geometry_iri(&e);
    b.add(&e, term(GEO, "hasGeometry"), g.clone());
    b.typed(&g, term(GEO, "Geometry"));
    b.add(&g, term(GEO, "asWKT"), Term::Literal {
        lexical: serialize_wkt(&rec.geometry),
        datatype: format!("{GEO}wktLiteral"),
        lang: None,
    });
    let scope = child_iri(&e, "time");
    match (&rec.start, &rec.end) {
        (Some(s), Some(t)) => {
            b.add(&e, term(KWG_ONT, "hasTemporalScope"), scope.clone());
            b.interval(&scope, s, t);
        }
        (Some(one), None) | (None, Some(one)) => {
            b.add(&e, term(KWG_ONT, "hasTemporalScope"), scope.clone());
            b.instant(&scope, one);
        }
        (None, None) => {}
    }
    Ok(b.finish())
}
