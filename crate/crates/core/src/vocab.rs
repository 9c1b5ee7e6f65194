//! Namespace IRIs and frequently used terms.

pub const GEO: &str = "http://www.opengis.net/ont/geosparql#";
pub const CDT: &str = "http://w3id.org/lindt/custom_datatypes#";
pub const KWG_ONT: &str = "http://stko-kwg.geog.ucsb.edu/lod/ontology/";
pub const KWGR: &str = "http://stko-kwg.geog.ucsb.edu/lod/resource/";
pub const PROV: &str = "http://www.w3.org/ns/prov#";
pub const QUDT: &str = "http://qudt.org/schema/qudt/";
pub const SOSA: &str = "http://www.w3.org/ns/sosa/";
pub const TIME: &str = "http://www.w3.org/2006/time#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";
pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const UNIT: &str = "http://qudt.org/vocab/unit/";
/// Disaster/event ontology terms, kept under the ontology namespace.
pub const DEO: &str = "http://stko-kwg.geog.ucsb.edu/lod/ontology/deo/";

/// The nine namespaces every prefix table starts with.
pub const CORE_PREFIXES: [(&str, &str); 9] = [
    ("geo", GEO),
    ("cdt", CDT),
    ("kwg-ont", KWG_ONT),
    ("kwgr", KWGR),
    ("prov", PROV),
    ("qudt", QUDT),
    ("sosa", SOSA),
    ("time", TIME),
    ("xsd", XSD),
];

pub const EXTRA_PREFIXES: [(&str, &str); 7] = [
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("dcterms", DCTERMS),
    ("foaf", FOAF),
    ("skos", SKOS),
    ("unit", UNIT),
    ("deo", DEO),
];

pub fn iri(ns: &str, local: &str) -> String {
    format!("{ns}{local}")
}

pub fn rdf_type() -> String {
    iri(RDF, "type")
}

pub fn kwg(local: &str) -> String {
    iri(KWG_ONT, local)
}

pub fn xsd(local: &str) -> String {
    iri(XSD, local)
}

/// An IRI term in namespace `ns`.
pub fn term(ns: &str, local: &str) -> crate::store::Term {
    crate::store::Term::iri_unchecked(iri(ns, local))
}
