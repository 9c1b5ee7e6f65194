//! Turns features, observations and metadata into triples.
//!
//! Every operation returns a sorted, duplicate-free batch; nothing touches a
//! store until the caller inserts the batch, so a failed call emits nothing.

mod entity;
mod iri;
mod metadata;
mod observation;
mod spatial;
mod vocabulary;

pub use entity::{materialize_entity, FeatureRecord};
pub use iri::{
    cell_iri, cell_of_iri, entity_iri, geometry_iri, mint_iri, observation_iri, percent_encode, MintKind,
};
pub use metadata::{
    dataset_iri, materialize_causal_link, materialize_dataset_metadata, materialize_expert, DatasetDescriptor,
    RoleSpec, GRAPH_NODE,
};
pub use observation::{is_forecast, materialize_observation, unit_warning, ObservationResult, ObservationSpec};
pub use spatial::{
    materialize_region_topology, materialize_spatial_links, materialize_spatial_links_capped, region_topology_of,
    spatial_predicate,
};
pub use vocabulary::{topic_iri, KindFamily, KindInfo, VocabularyTerm, Vocabulary};

use crate::dgg::DggError;
use crate::store::{Store, Term, Triple};
use crate::temporal::{parse_temporal, TemporalError, TemporalLiteral, TimeInterval};
use crate::vocab::{term, RDF, TIME};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MaterializeError {
    #[error("local id must not be empty")]
    EmptyLocalId,
    #[error("unknown kind {0}")]
    UnknownKind(String),
    #[error("unknown topic {0}")]
    UnknownTopic(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("observation has no feature of interest")]
    MissingFeatureOfInterest,
    #[error("observation is missing its {0}")]
    MissingTime(&'static str),
    #[error("{0} has no geometry")]
    MissingGeometry(String),
    #[error("{0} does not exist in the store")]
    MissingEndpoint(String),
    #[error("an event cannot cause itself: {0}")]
    SelfLink(String),
    #[error("dataset {0:?} is already described differently")]
    DuplicateDataset(String),
    #[error("expert needs at least one topic")]
    NoTopics,
    #[error("vocabulary: {0}")]
    Vocabulary(String),
    #[error(transparent)]
    Grid(#[from] DggError),
    #[error(transparent)]
    Temporal(#[from] TemporalError),
}

/// Triple accumulator.
#[derive(Debug, Default)]
pub(crate) struct Batch(Vec<Triple>);

impl Batch {
    pub(crate) fn add(&mut self, s: &Term, p: Term, o: Term) {
        self.0.push(Triple { subject: s.clone(), predicate: p, object: o });
    }

    pub(crate) fn typed(&mut self, s: &Term, class: Term) {
        self.add(s, term(RDF, "type"), class);
    }

    pub(crate) fn extend(&mut self, ts: impl IntoIterator<Item = Triple>) {
        self.0.extend(ts);
    }

    /// An instant node carrying the literal under its granularity's predicate.
    pub(crate) fn instant(&mut self, node: &Term, lit: &TemporalLiteral) {
        self.typed(node, term(TIME, "Instant"));
        self.add(node, Term::iri_unchecked(lit.predicate_iri()), literal_term(lit));
    }

    /// An interval node spanning from the start of `begin` to the end of `end`.
    pub(crate) fn interval(&mut self, node: &Term, begin: &TemporalLiteral, end: &TemporalLiteral) {
        self.typed(node, term(TIME, "Interval"));
        let b = iri::child_iri(node, "beginning");
        let e = iri::child_iri(node, "end");
        self.add(node, term(TIME, "hasBeginning"), b.clone());
        self.add(node, term(TIME, "hasEnd"), e.clone());
        self.instant(&b, begin);
        self.instant(&e, end);
    }

    /// A half-open interval as an interval node. The end instant is the last
    /// whole second inside it.
    pub(crate) fn time_interval(&mut self, node: &Term, ti: &TimeInterval) {
        let last = (ti.end - chrono::Duration::seconds(1)).max(ti.start);
        self.interval(node, &TemporalLiteral::instant(ti.start), &TemporalLiteral::instant(last));
    }

    pub(crate) fn finish(mut self) -> Vec<Triple> {
        self.0.sort_unstable();
        self.0.dedup();
        self.0
    }
}

pub fn literal_term(lit: &TemporalLiteral) -> Term {
    Term::Literal { lexical: lit.lexical().to_string(), datatype: lit.datatype_iri(), lang: None }
}

/// Reads a temporal literal term back.
pub fn literal_of(t: &Term) -> Option<TemporalLiteral> {
    match t {
        Term::Literal { lexical, datatype, lang: None } => parse_temporal(lexical, datatype).ok(),
        _ => None,
    }
}

/// The interval denoted by an instant or interval node: an instant covers
/// its literal's granule, an interval the hull of its two ends.
pub fn temporal_extent(store: &Store, node: &Term) -> Option<TimeInterval> {
    for p in ["inXSDDateTime", "inXSDDate", "inXSDgYear"] {
        if let Some(lit) = store.objects(node, &term(TIME, p)).iter().find_map(literal_of) {
            return Some(lit.to_interval());
        }
    }
    let b = store.objects(node, &term(TIME, "hasBeginning")).into_iter().next()?;
    let e = store.objects(node, &term(TIME, "hasEnd")).into_iter().next()?;
    let (b, e) = (temporal_extent(store, &b)?, temporal_extent(store, &e)?);
    TimeInterval::new(b.start, e.end.max(b.end)).ok()
}

/// Temporal scope of an entity, expert or role node.
pub fn scope_of(store: &Store, node: &Term) -> Option<TimeInterval> {
    let scope = store.objects(node, &term(crate::vocab::KWG_ONT, "hasTemporalScope")).into_iter().next()?;
    temporal_extent(store, &scope)
}
