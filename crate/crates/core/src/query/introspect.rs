//! Questions about the graph's own provenance.

use super::QueryError;
use crate::materialize::{literal_of, scope_of};
use crate::store::{Store, Term};
use crate::temporal::format_instant;
use crate::vocab::{term, DCTERMS, FOAF, KWG_ONT, PROV, RDF, TIME};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntrospectKind {
    /// Where did each dataset originate?
    DatasetOrigin,
    /// Which team member maintained each subgraph, and when?
    SubgraphMaintainer,
    /// How current is the graph?
    GraphCurrency,
}

impl std::str::FromStr for IntrospectKind {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, QueryError> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| QueryError::Malformed(format!("unknown introspection {s:?}")))
    }
}

pub type Row = BTreeMap<String, String>;

fn first(store: &Store, s: &Term, p: &Term) -> Option<Term> {
    let mut v = store.objects(s, p);
    v.sort();
    v.into_iter().next()
}

fn retrieved_literal(store: &Store, dataset: &Term) -> Option<crate::temporal::TemporalLiteral> {
    let node = first(store, dataset, &term(KWG_ONT, "retrievedAt"))?;
    ["inXSDDateTime", "inXSDDate", "inXSDgYear"]
        .iter()
        .find_map(|p| store.objects(&node, &term(TIME, p)).iter().find_map(literal_of))
}

pub fn introspect(store: &Store, kind: IntrospectKind) -> Result<Vec<Row>, QueryError> {
    let datasets = store.subjects(&term(RDF, "type"), &term(KWG_ONT, "Dataset"));
    if datasets.is_empty() {
        return Err(QueryError::NoMetadata);
    }
    let mut rows = Vec::new();
    match kind {
        IntrospectKind::DatasetOrigin => {
            for d in &datasets {
                let mut row = Row::new();
                row.insert("dataset".into(), d.value().into());
                let text = |p: &Term| first(store, d, p).map(|t| t.value().to_string());
                for (key, p) in [
                    ("id", term(DCTERMS, "identifier")),
                    ("title", term(DCTERMS, "title")),
                    ("license", term(DCTERMS, "license")),
                    ("spatial_coverage", term(DCTERMS, "spatial")),
                ] {
                    if let Some(v) = text(&p) {
                        row.insert(key.into(), v);
                    }
                }
                if let Some(agent) = first(store, d, &term(DCTERMS, "creator")) {
                    row.insert("agency".into(), first(store, &agent, &term(FOAF, "name")).map_or_else(|| agent.value().to_string(), |n| n.value().to_string()));
                }
                if let Some(lit) = retrieved_literal(store, d) {
                    row.insert("retrieved_at".into(), lit.lexical().to_string());
                }
                rows.push(row);
            }
        }
        IntrospectKind::SubgraphMaintainer => {
            for role in store.subjects(&term(RDF, "type"), &term(KWG_ONT, "Role")) {
                let mut row = Row::new();
                let Some(sub) = first(store, &role, &term(KWG_ONT, "roleOf")) else { continue };
                row.insert("subgraph".into(), sub.value().into());
                if let Some(d) = first(store, &sub, &term(PROV, "wasDerivedFrom")) {
                    row.insert("dataset".into(), d.value().into());
                }
                if let Some(p) = first(store, &role, &term(KWG_ONT, "performedBy")) {
                    if let Some(n) = first(store, &p, &term(FOAF, "name")) {
                        row.insert("name".into(), n.value().into());
                    }
                    row.insert("person".into(), p.value().into());
                }
                if let Some(r) = first(store, &role, &term(KWG_ONT, "roleName")) {
                    row.insert("role".into(), r.value().into());
                }
                if let Some(v) = scope_of(store, &role) {
                    row.insert("valid_from".into(), format_instant(v.start));
                    row.insert("valid_until".into(), format_instant(v.end));
                }
                rows.push(row);
            }
        }
        IntrospectKind::GraphCurrency => {
            for g in store.subjects(&term(RDF, "type"), &term(KWG_ONT, "KnowledgeGraph")) {
                let members: Vec<Term> = store
                    .objects(&g, &term(DCTERMS, "hasPart"))
                    .iter()
                    .flat_map(|s| store.objects(s, &term(PROV, "wasDerivedFrom")))
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let latest = members
                    .iter()
                    .filter_map(|d| retrieved_literal(store, d).map(|l| (l.to_interval().end, l.to_interval().start, l, d)))
                    .max_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
                let mut row = Row::new();
                row.insert("graph".into(), g.value().into());
                row.insert("datasets".into(), members.len().to_string());
                if let Some((_, _, lit, d)) = latest {
                    row.insert("retrieved_at".into(), lit.lexical().to_string());
                    row.insert("dataset".into(), d.value().into());
                }
                rows.push(row);
            }
        }
    }
    rows.sort();
    Ok(rows)
}
