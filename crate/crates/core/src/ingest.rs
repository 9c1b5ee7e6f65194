//! Manifest-driven ingestion of a GeoJSON dataset into a staged store.
//!
//! Staging works on a copy; the caller's store only changes when the whole
//! dataset, its metadata and the validation pass have succeeded.

use crate::dgg::{LevelRange, COVERING_CAP};
use crate::geometry::{parse_geojson, parse_geojson_value, FeatureError, GeoJsonError, Geometry, ParsedFeature, PropertyValue};
use crate::materialize::{
    dataset_iri, geometry_iri, materialize_causal_link, materialize_dataset_metadata, materialize_entity,
    materialize_expert, materialize_observation, materialize_spatial_links_capped, mint_iri, region_topology_of,
    unit_warning, DatasetDescriptor, FeatureRecord, KindFamily, MaterializeError, MintKind, ObservationResult,
    ObservationSpec, Vocabulary,
};
use crate::store::{PrefixTable, Store, Term, Triple};
use crate::temporal::{TemporalLiteral, TimeInterval};
use crate::validate::{builtin_shapes, validate, ViolationReport};
use crate::vocab::{term, KWGR, KWG_ONT, RDF};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Feature properties holding temporal values.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeFields {
    #[serde(default)]
    pub start: Option<String>,
    #[serde(default)]
    pub end: Option<String>,
    /// Falls back to `start` when absent.
    #[serde(default)]
    pub phenomenon: Option<String>,
    #[serde(default)]
    pub result: Option<String>,
}

/// One feature property recorded as an observation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationMapping {
    pub property: String,
    pub observed_property: String,
    #[serde(default)]
    pub unit: Option<String>,
}

/// How observations are grouped into collections.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollectionAxis {
    None,
    /// One collection per feature of interest and result time.
    #[default]
    FeatureResultTime,
    /// One collection per value of a feature property.
    Property(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertRecord {
    pub person: String,
    pub topics: Vec<String>,
    pub region: String,
    pub validity: TimeInterval,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalRecord {
    pub cause: String,
    pub effect: String,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub dataset: DatasetDescriptor,
    /// GeoJSON file, relative to the manifest's directory.
    #[serde(default)]
    pub source: Option<String>,
    /// Inline GeoJSON, used instead of `source`.
    #[serde(default)]
    pub features: Option<serde_json::Value>,
    pub kind: String,
    #[serde(default)]
    pub id_property: Option<String>,
    #[serde(default)]
    pub label_property: Option<String>,
    #[serde(default)]
    pub time: TimeFields,
    #[serde(default)]
    pub observations: Vec<ObservationMapping>,
    #[serde(default)]
    pub collection: CollectionAxis,
    /// Defaults to the ingesting service's configured range.
    #[serde(default)]
    pub levels: Option<LevelRange>,
    /// Relate every pair of this dataset's regions.
    #[serde(default)]
    pub region_topology: bool,
    /// Defaults to the dataset id.
    #[serde(default)]
    pub subgraph: Option<String>,
    #[serde(default)]
    pub experts: Vec<ExpertRecord>,
    #[serde(default)]
    pub causal_links: Vec<CausalRecord>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest, IngestError> {
        serde_json::from_str(text).map_err(|e| IngestError::Manifest(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    /// Reads a manifest file; the returned directory resolves `source`.
    pub fn load(path: &Path) -> Result<(Manifest, PathBuf), IngestError> {
        let text = std::fs::read_to_string(path).map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Manifest::from_json(&text)?, dir))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Largest tolerated number of violations in the staged store.
    pub max_violations: usize,
    pub covering_cap: usize,
    /// Used when the manifest names no levels.
    pub levels: LevelRange,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { max_violations: 0, covering_cap: COVERING_CAP, levels: LevelRange::default() }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("cannot read source: {0}")]
    Io(String),
    #[error(transparent)]
    GeoJson(#[from] GeoJsonError),
    #[error("dataset {0:?} is already ingested")]
    DuplicateDataset(String),
    #[error(transparent)]
    Materialize(#[from] MaterializeError),
    #[error("validation found {} violations, more than the {limit} allowed", report.total)]
    Validation { report: ViolationReport, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub dataset_id: String,
    pub subgraph: String,
    pub feature_count: usize,
    /// Statements the dataset added to the store.
    pub triple_count: usize,
    pub violation_count: usize,
    pub skipped: Vec<FeatureError>,
    pub warnings: Vec<String>,
}

/// A fully built store awaiting a swap.
#[derive(Debug, Clone)]
pub struct Staged {
    pub store: Store,
    pub report: IngestReport,
}

struct FeatureOut {
    local: String,
    triples: Vec<Triple>,
    warnings: Vec<String>,
    region: Option<(Term, Geometry)>,
}

struct Plan<'a> {
    manifest: &'a Manifest,
    vocab: &'a Vocabulary,
    kind: String,
    family: KindFamily,
    observations: Vec<(String, String, Option<String>)>,
    levels: LevelRange,
    cap: usize,
}

fn text_of(f: &ParsedFeature, key: &Option<String>) -> Option<String> {
    key.as_ref().and_then(|k| f.properties.get(k)).map(PropertyValue::as_text).filter(|s| !s.is_empty())
}

fn time_of(f: &ParsedFeature, key: &Option<String>) -> Result<Option<TemporalLiteral>, String> {
    match text_of(f, key) {
        None => Ok(None),
        Some(v) => TemporalLiteral::infer(&v).map(Some).map_err(|e| format!("{}: {e}", key.as_deref().unwrap_or_default())),
    }
}

fn local_id(f: &ParsedFeature, m: &Manifest) -> String {
    match &m.id_property {
        Some(_) => text_of(f, &m.id_property).unwrap_or_default(),
        None => f.id.clone().unwrap_or_else(|| f.index.to_string()),
    }
}

impl Plan<'_> {
    fn feature(&self, f: &ParsedFeature, local: &str) -> Result<FeatureOut, String> {
        let m = self.manifest;
        let mut rec = FeatureRecord::new(&m.dataset.id, local, &self.kind, f.geometry.clone());
        rec.properties = f.properties.clone();
        rec.label = text_of(f, &m.label_property);
        rec.start = time_of(f, &m.time.start)?;
        rec.end = time_of(f, &m.time.end)?;
        let e = rec.iri().map_err(|e| e.to_string())?;
        let mut triples = materialize_entity(self.vocab, &rec).map_err(|e| e.to_string())?;
        triples.extend(
            materialize_spatial_links_capped(&geometry_iri(&e), &f.geometry, self.levels, self.cap).map_err(|e| e.to_string())?,
        );

        let mut warnings = Vec::new();
        let phenomenon = match &m.time.phenomenon {
            Some(_) => time_of(f, &m.time.phenomenon)?,
            None => rec.start.clone(),
        };
        let result_time = time_of(f, &m.time.result)?;
        for (property, observed, unit) in &self.observations {
            let Some(value) = f.properties.get(property) else { continue };
            let result = match value {
                PropertyValue::Number(_) | PropertyValue::Text(_) if value.as_f64().is_some() => {
                    ObservationResult::Numeric { value: value.as_f64().unwrap_or_default(), unit: unit.clone() }
                }
                other => ObservationResult::Text(other.as_text()),
            };
            let collection_key = match &m.collection {
                CollectionAxis::None => None,
                CollectionAxis::FeatureResultTime => {
                    let tail = e.value().strip_prefix(KWGR).unwrap_or(e.value()).to_string();
                    Some(match &result_time {
                        Some(rt) => format!("{tail}.{}", rt.lexical()),
                        None => tail,
                    })
                }
                CollectionAxis::Property(p) => f.properties.get(p).map(PropertyValue::as_text),
            };
            let spec = ObservationSpec {
                feature_of_interest: Some(e.value().to_string()),
                observed_property: observed.clone(),
                result,
                phenomenon_time: phenomenon.clone(),
                result_time: result_time.clone(),
                collection_key,
                sequence: 1,
            };
            if spec.phenomenon_time.is_none() {
                return Err(format!("observation of {property} has no phenomenon time"));
            }
            warnings.extend(unit_warning(&spec));
            triples.extend(materialize_observation(&spec).map_err(|e| e.to_string())?);
        }
        let region = (self.family == KindFamily::Region).then(|| (e, f.geometry.clone()));
        Ok(FeatureOut { local: local.to_string(), triples, warnings, region })
    }
}

fn source_features(m: &Manifest, base_dir: &Path) -> Result<crate::geometry::FeatureParse, IngestError> {
    match (&m.source, &m.features) {
        (Some(_), Some(_)) => Err(IngestError::Manifest("give either source or features, not both".into())),
        (None, None) => Err(IngestError::Manifest("manifest names no features".into())),
        (None, Some(v)) => Ok(parse_geojson_value(v)?),
        (Some(path), None) => {
            let path = base_dir.join(path);
            let text = std::fs::read_to_string(&path).map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))?;
            Ok(parse_geojson(&text)?)
        }
    }
}

fn resolve(prefixes: &PrefixTable, s: &str) -> Result<String, IngestError> {
    prefixes.resolve(s).map_err(|e| IngestError::Manifest(e.to_string()))
}

fn insert_all(store: &mut Store, triples: &[Triple], graph: Option<&Term>) {
    for t in triples {
        store.insert_in(t, graph).expect("materialized triples are well formed");
    }
}

/// Builds the store that results from adding the dataset to `store`.
pub fn stage(
    store: &Store,
    vocab: &Vocabulary,
    manifest: &Manifest,
    base_dir: &Path,
    opts: &IngestOptions,
) -> Result<Staged, IngestError> {
    let prefixes = PrefixTable::default();
    let kind = resolve(&prefixes, &manifest.kind)?;
    let info = vocab.kind(&kind).ok_or_else(|| IngestError::Materialize(MaterializeError::UnknownKind(kind.clone())))?;
    let observations = manifest
        .observations
        .iter()
        .map(|o| {
            let unit = o.unit.as_deref().map(|u| resolve(&prefixes, u)).transpose()?;
            Ok((o.property.clone(), resolve(&prefixes, &o.observed_property)?, unit))
        })
        .collect::<Result<Vec<_>, IngestError>>()?;

    let ds = dataset_iri(&manifest.dataset.id)?;
    let subgraph_id = manifest.subgraph.clone().unwrap_or_else(|| manifest.dataset.id.clone());
    let subgraph = mint_iri(MintKind::Subgraph, &subgraph_id)?;
    let ty = term(RDF, "type");
    let subgraph_known = store.contains(&Triple { subject: subgraph.clone(), predicate: ty.clone(), object: term(KWG_ONT, "Subgraph") });
    if subgraph_known {
        return Err(IngestError::DuplicateDataset(manifest.dataset.id.clone()));
    }

    let parsed = source_features(manifest, base_dir)?;
    let levels = manifest.levels.unwrap_or(opts.levels);
    let plan = Plan { manifest, vocab, kind: kind.clone(), family: info.family, observations, levels, cap: opts.covering_cap };
    let mut skipped = parsed.errors;
    let mut seen = BTreeSet::new();
    let mut todo = Vec::new();
    for f in &parsed.features {
        let local = local_id(f, manifest);
        if local.is_empty() {
            skipped.push(FeatureError { index: f.index, message: "feature has no id".into() });
        } else if !seen.insert(local.clone()) {
            skipped.push(FeatureError { index: f.index, message: format!("duplicate feature id {local:?}") });
        } else {
            todo.push((f, local));
        }
    }
    let results: Vec<(usize, Result<FeatureOut, String>)> =
        todo.par_iter().map(|(f, local)| (f.index, plan.feature(f, local))).collect();

    let mut descriptor = manifest.dataset.clone();
    descriptor.feature_kinds.push(kind);
    descriptor.observable_properties.extend(plan.observations.iter().map(|o| o.1.clone()));
    descriptor.feature_kinds.sort();
    descriptor.feature_kinds.dedup();
    descriptor.observable_properties.sort();
    descriptor.observable_properties.dedup();
    let metadata = materialize_dataset_metadata(store, &descriptor, &subgraph, levels)?;

    let mut staged = store.clone();
    let before = staged.len();
    let mut warnings = Vec::new();
    let mut regions = Vec::new();
    let mut feature_count = 0;
    for (index, r) in results {
        match r {
            Ok(out) => {
                insert_all(&mut staged, &out.triples, Some(&subgraph));
                warnings.extend(out.warnings);
                regions.extend(out.region);
                feature_count += 1;
                log::debug!("materialized {} ({} triples)", out.local, out.triples.len());
            }
            Err(message) => skipped.push(FeatureError { index, message }),
        }
    }
    skipped.sort_by(|a, b| (a.index, &a.message).cmp(&(b.index, &b.message)));
    insert_all(&mut staged, &vocab.class_triples(), None);
    insert_all(&mut staged, &metadata, None);
    if manifest.region_topology {
        insert_all(&mut staged, &region_topology_of(&regions), Some(&subgraph));
    }
    for x in &manifest.experts {
        let region = Term::iri(resolve(&prefixes, &x.region)?).map_err(|e| IngestError::Manifest(e.to_string()))?;
        if staged.match_pattern(Some(&region), None, None).is_empty() {
            return Err(MaterializeError::MissingEndpoint(region.value().to_string()).into());
        }
        let topics = x.topics.iter().map(|t| resolve(&prefixes, t)).collect::<Result<Vec<_>, _>>()?;
        let ts = materialize_expert(vocab, &x.person, &topics, &region, &x.validity)?;
        insert_all(&mut staged, &ts, Some(&subgraph));
    }
    for c in &manifest.causal_links {
        let endpoint = |s: &str| -> Result<Term, IngestError> {
            Term::iri(resolve(&prefixes, s)?).map_err(|e| IngestError::Manifest(e.to_string()))
        };
        let ts = materialize_causal_link(&staged, &endpoint(&c.cause)?, &endpoint(&c.effect)?, &c.note)?;
        insert_all(&mut staged, &ts, Some(&subgraph));
    }

    let report = validate(&staged, &builtin_shapes());
    if report.total > opts.max_violations {
        return Err(IngestError::Validation { report, limit: opts.max_violations });
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let report = IngestReport {
        dataset_id: manifest.dataset.id.clone(),
        subgraph: subgraph.value().to_string(),
        feature_count,
        triple_count: staged.len() - before,
        violation_count: report.total,
        skipped,
        warnings,
    };
    log::info!("staged {} with {} new statements", ds.value(), report.triple_count);
    Ok(Staged { store: staged, report })
}

/// Stages the dataset and swaps the result into `store`.
pub fn ingest(
    store: &mut Store,
    vocab: &Vocabulary,
    manifest: &Manifest,
    base_dir: &Path,
    opts: &IngestOptions,
) -> Result<IngestReport, IngestError> {
    let staged = stage(store, vocab, manifest, base_dir, opts)?;
    *store = staged.store;
    Ok(staged.report)
}
