//! Dataset/subgraph provenance, causal links and expert records.

use super::iri::{child_iri, mint_iri, percent_encode, resource_local, MintKind};
use super::{literal_term, Batch, MaterializeError, Vocabulary};
use crate::dgg::LevelRange;
use crate::store::{Store, Term, Triple};
use crate::temporal::{TemporalLiteral, TimeInterval};
use crate::vocab::{term, DCTERMS, DEO, FOAF, KWGR, KWG_ONT, PROV, RDFS};
use serde::{Deserialize, Serialize};

/// Node every subgraph is a part of.
pub const GRAPH_NODE: &str = "http://stko-kwg.geog.ucsb.edu/lod/resource/knowledgeGraph";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleSpec {
    pub person: String,
    #[serde(default)]
    pub name: Option<String>,
    pub role: String,
    pub validity: TimeInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub id: String,
    pub title: String,
    pub agency: String,
    pub license: String,
    pub temporal_coverage: TimeInterval,
    pub spatial_coverage: String,
    pub retrieved_at: TemporalLiteral,
    #[serde(default)]
    pub roles: Vec<RoleSpec>,
    /// Filled in by ingestion from the observation mapping.
    #[serde(default)]
    pub observable_properties: Vec<String>,
    #[serde(default)]
    pub feature_kinds: Vec<String>,
}

pub fn dataset_iri(id: &str) -> Result<Term, MaterializeError> {
    mint_iri(MintKind::Dataset, id)
}

fn iri_term(s: &str) -> Result<Term, MaterializeError> {
    Term::iri(s).map_err(|e| MaterializeError::Vocabulary(e.to_string()))
}

/// Dataset node, the subgraph derived from it, and role nodes. Provenance
/// attaches here rather than to individual observations.
pub fn materialize_dataset_metadata(
    store: &Store,
    d: &DatasetDescriptor,
    subgraph: &Term,
    range: LevelRange,
) -> Result<Vec<Triple>, MaterializeError> {
    let ds = dataset_iri(&d.id)?;
    let title = Term::string(&d.title);
    let retrieved = literal_term(&d.retrieved_at);
    let retrieved_node = child_iri(&ds, "retrievedAt");
    let described = store.objects(&ds, &term(DCTERMS, "title"));
    let stamp = store.objects(&retrieved_node, &Term::iri_unchecked(d.retrieved_at.predicate_iri()));
    if !described.is_empty() && (described != [title.clone()] || stamp != [retrieved]) {
        return Err(MaterializeError::DuplicateDataset(d.id.clone()));
    }

    let mut b = Batch::default();
    b.typed(&ds, term(KWG_ONT, "Dataset"));
    b.typed(&ds, term(PROV, "Entity"));
    b.add(&ds, term(DCTERMS, "identifier"), Term::string(&d.id));
    b.add(&ds, term(DCTERMS, "title"), title);
    let agent = mint_iri(MintKind::Agent, &d.agency)?;
    b.add(&ds, term(DCTERMS, "creator"), agent.clone());
    b.typed(&agent, term(FOAF, "Organization"));
    b.add(&agent, term(FOAF, "name"), Term::string(&d.agency));
    let license = Term::iri(&d.license).unwrap_or_else(|_| Term::string(&d.license));
    b.add(&ds, term(DCTERMS, "license"), license);
    b.add(&ds, term(DCTERMS, "spatial"), Term::string(&d.spatial_coverage));
    let coverage = child_iri(&ds, "temporalCoverage");
    b.add(&ds, term(DCTERMS, "temporal"), coverage.clone());
    b.time_interval(&coverage, &d.temporal_coverage);
    b.add(&ds, term(KWG_ONT, "retrievedAt"), retrieved_node.clone());
    b.instant(&retrieved_node, &d.retrieved_at);
    b.add(&ds, term(KWG_ONT, "assumedTimeZone"), Term::string("UTC"));
    for p in &d.observable_properties {
        b.add(&ds, term(KWG_ONT, "hasObservableProperty"), iri_term(p)?);
    }
    for k in &d.feature_kinds {
        b.add(&ds, term(KWG_ONT, "hasFeatureKind"), iri_term(k)?);
    }

    b.typed(subgraph, term(KWG_ONT, "Subgraph"));
    b.typed(subgraph, term(PROV, "Entity"));
    b.add(subgraph, term(PROV, "wasDerivedFrom"), ds.clone());
    b.add(subgraph, term(KWG_ONT, "minCellLevel"), Term::integer(range.min_level.into()));
    b.add(subgraph, term(KWG_ONT, "maxCellLevel"), Term::integer(range.max_level.into()));
    let graph = Term::iri_unchecked(GRAPH_NODE);
    b.typed(&graph, term(KWG_ONT, "KnowledgeGraph"));
    b.add(&graph, term(DCTERMS, "hasPart"), subgraph.clone());

    for (n, role) in d.roles.iter().enumerate() {
        let person = iri_term(&role.person)?;
        let node = child_iri(subgraph, &format!("role.{}", n + 1));
        b.typed(&node, term(KWG_ONT, "Role"));
        b.add(&node, term(KWG_ONT, "roleName"), Term::string(&role.role));
        b.add(&node, term(KWG_ONT, "performedBy"), person.clone());
        b.add(&node, term(KWG_ONT, "roleOf"), subgraph.clone());
        b.typed(&person, term(FOAF, "Person"));
        if let Some(name) = &role.name {
            b.add(&person, term(FOAF, "name"), Term::string(name));
        }
        let validity = child_iri(&node, "validity");
        b.add(&node, term(KWG_ONT, "hasTemporalScope"), validity.clone());
        b.time_interval(&validity, &role.validity);
    }
    Ok(b.finish())
}

fn exists(store: &Store, t: &Term) -> bool {
    !store.match_pattern(Some(t), None, None).is_empty()
}

/// A reified "possibly causes" relation. Each call names a fresh node, so
/// two links between one pair stay distinct.
pub fn materialize_causal_link(store: &Store, cause: &Term, effect: &Term, note: &str) -> Result<Vec<Triple>, MaterializeError> {
    if cause == effect {
        return Err(MaterializeError::SelfLink(cause.value().to_string()));
    }
    for t in [cause, effect] {
        if !exists(store, t) {
            return Err(MaterializeError::MissingEndpoint(t.value().to_string()));
        }
    }
    let has_cause = term(DEO, "hasCause");
    let has_effect = term(DEO, "hasEffect");
    let existing = store
        .subjects(&has_cause, cause)
        .into_iter()
        .filter(|r| store.contains(&Triple { subject: r.clone(), predicate: has_effect.clone(), object: effect.clone() }))
        .count();
    let local = |t: &Term| percent_encode(&resource_local(t)).replace('.', "%2E");
    let node = Term::iri_unchecked(format!("{KWGR}causal.{}.{}.{}", local(cause), local(effect), existing + 1));
    let mut b = Batch::default();
    b.typed(&node, term(DEO, "PossiblyCausesRelation"));
    b.add(&node, has_cause, cause.clone());
    b.add(&node, has_effect, effect.clone());
    b.add(&node, term(RDFS, "comment"), Term::string(note));
    Ok(b.finish())
}

/// An expert with topic instances, a region and a validity interval.
pub fn materialize_expert(
    vocab: &Vocabulary,
    person: &str,
    topics: &[String],
    region: &Term,
    validity: &TimeInterval,
) -> Result<Vec<Triple>, MaterializeError> {
    if topics.is_empty() {
        return Err(MaterializeError::NoTopics);
    }
    if let Some(t) = topics.iter().find(|t| vocab.topic(t).is_none()) {
        return Err(MaterializeError::UnknownTopic(t.clone()));
    }
    let x = mint_iri(MintKind::Expert, person)?;
    let mut b = Batch::default();
    b.typed(&x, term(KWG_ONT, "Expert"));
    b.typed(&x, term(FOAF, "Person"));
    b.add(&x, term(RDFS, "label"), Term::string(person));
    for t in topics {
        b.add(&x, term(KWG_ONT, "hasExpertise"), Term::iri_unchecked(t));
        b.extend(vocab.topic_triples(t));
    }
    b.add(&x, term(KWG_ONT, "hasSpatialScope"), region.clone());
    let scope = child_iri(&x, "validity");
    b.add(&x, term(KWG_ONT, "hasTemporalScope"), scope.clone());
    b.time_interval(&scope, validity);
    Ok(b.finish())
}
