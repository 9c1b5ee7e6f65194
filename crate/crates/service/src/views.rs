//! Read-only views computed from pattern matches over the store.

use geokg_core::geometry::SpatialRelation;
use geokg_core::materialize::{cell_of_iri, KindFamily};
use geokg_core::store::{PrefixTable, Store, Term};
use geokg_core::vocab::{term, GEO, KWG_ONT, RDF, RDFS};
use serde::Serialize;
use std::collections::BTreeSet;

/// Sorted keys, no insignificant whitespace.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's map type is ordered by key unless preserve_order is enabled
    let v = serde_json::to_value(value).expect("view types serialize");
    v.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub predicate: String,
    /// Object for outgoing edges, subject for incoming ones.
    pub node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometryView {
    pub iri: String,
    pub wkt: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityView {
    pub iri: String,
    pub outgoing: Vec<Edge>,
    pub incoming_spatial: Vec<Edge>,
    pub geometries: Vec<GeometryView>,
    pub cells: Vec<String>,
}

pub fn show(t: &Term, prefixes: &PrefixTable) -> String {
    match t {
        Term::Iri { value } => prefixes.compact(value),
        Term::Blank { label } => format!("_:{label}"),
        Term::Literal { lexical, lang: Some(lang), .. } => format!("\"{lexical}\"@{lang}"),
        Term::Literal { lexical, datatype, lang: None } => format!("\"{lexical}\"^^{}", prefixes.compact(datatype)),
    }
}

fn spatial_predicates() -> Vec<Term> {
    SpatialRelation::ALL.iter().map(|r| term(KWG_ONT, r.local_name())).collect()
}

/// None when the store never mentions the IRI.
pub fn entity_view(store: &Store, iri: &Term, prefixes: &PrefixTable) -> Option<EntityView> {
    let outgoing = store.match_pattern(Some(iri), None, None);
    let incoming = store.match_pattern(None, None, Some(iri));
    if outgoing.is_empty() && incoming.is_empty() {
        return None;
    }
    let preds = spatial_predicates();
    let mut out: Vec<Edge> = outgoing
        .iter()
        .map(|t| Edge { predicate: show(&t.predicate, prefixes), node: show(&t.object, prefixes) })
        .collect();
    out.sort();
    let mut inc: Vec<Edge> = incoming
        .iter()
        .filter(|t| preds.contains(&t.predicate))
        .map(|t| Edge { predicate: show(&t.predicate, prefixes), node: show(&t.subject, prefixes) })
        .collect();
    inc.sort();

    let mut geoms = store.objects(iri, &term(GEO, "hasGeometry"));
    geoms.sort();
    let mut cells = BTreeSet::new();
    for node in std::iter::once(iri).chain(geoms.iter()) {
        for p in &preds {
            for o in store.objects(node, p) {
                if cell_of_iri(o.value()).is_some() {
                    cells.insert(show(&o, prefixes));
                }
            }
        }
    }
    let geometries = geoms
        .iter()
        .map(|g| GeometryView {
            iri: show(g, prefixes),
            wkt: store.objects(g, &term(GEO, "asWKT")).iter().find_map(|l| l.lexical().map(String::from)),
        })
        .collect();
    Some(EntityView {
        iri: iri.value().to_string(),
        outgoing: out,
        incoming_spatial: inc,
        geometries,
        cells: cells.into_iter().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Facet {
    pub class: String,
    pub label: Option<String>,
    /// Instances typed with the class.
    pub count: usize,
    pub children: Vec<Facet>,
}

fn facet(store: &Store, class: &Term, children: Vec<Facet>, prefixes: &PrefixTable) -> Facet {
    let mut labels: Vec<String> =
        store.objects(class, &term(RDFS, "label")).iter().filter_map(|l| l.lexical().map(String::from)).collect();
    labels.sort();
    Facet {
        class: show(class, prefixes),
        label: labels.into_iter().next(),
        count: store.subjects(&term(RDF, "type"), class).len(),
        children,
    }
}

/// One facet per kind family, each listing the declared direct subclasses.
pub fn facets(store: &Store, prefixes: &PrefixTable) -> Vec<Facet> {
    [KindFamily::Region, KindFamily::Place, KindFamily::Hazard]
        .iter()
        .map(|family| {
            let root = Term::iri(family.root_class()).expect("family roots are IRIs");
            let mut subs = store.subjects(&term(RDFS, "subClassOf"), &root);
            subs.sort();
            subs.dedup();
            let children = subs.iter().filter(|s| **s != root).map(|s| facet(store, s, Vec::new(), prefixes)).collect();
            facet(store, &root, children, prefixes)
        })
        .collect()
}
