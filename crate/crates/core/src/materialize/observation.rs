use super::iri::{child_iri, mint_iri, observation_iri, MintKind};
use super::{Batch, MaterializeError};
use crate::store::{Term, Triple};
use crate::temporal::{compare, TemporalLiteral, TemporalRelation};
use crate::vocab::{term, QUDT, RDF, SOSA, UNIT};

#[derive(Debug, Clone, PartialEq)]
pub enum ObservationResult {
    Numeric { value: f64, unit: Option<String> },
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSpec {
    pub feature_of_interest: Option<String>,
    pub observed_property: String,
    pub result: ObservationResult,
    pub phenomenon_time: Option<TemporalLiteral>,
    pub result_time: Option<TemporalLiteral>,
    pub collection_key: Option<String>,
    /// Distinguishes repeated observations of one property on one feature.
    pub sequence: u32,
}

impl ObservationSpec {
    pub fn numeric(foi: &str, property: &str, value: f64, unit: Option<&str>) -> ObservationSpec {
        ObservationSpec {
            feature_of_interest: Some(foi.to_string()),
            observed_property: property.to_string(),
            result: ObservationResult::Numeric { value, unit: unit.map(String::from) },
            phenomenon_time: None,
            result_time: None,
            collection_key: None,
            sequence: 1,
        }
    }

    pub fn iri(&self) -> Result<Term, MaterializeError> {
        let foi = self.feature_of_interest.as_deref().ok_or(MaterializeError::MissingFeatureOfInterest)?;
        Ok(observation_iri(&Term::iri_unchecked(foi), &self.observed_property, self.sequence))
    }
}

/// Warning text for a numeric result that carries no unit.
pub fn unit_warning(spec: &ObservationSpec) -> Option<String> {
    match &spec.result {
        ObservationResult::Numeric { unit: None, .. } => Some(format!(
            "numeric result for {} on {} has no unit; recorded as unit:UNITLESS",
            spec.observed_property,
            spec.feature_of_interest.as_deref().unwrap_or("?")
        )),
        _ => None,
    }
}

pub fn materialize_observation(spec: &ObservationSpec) -> Result<Vec<Triple>, MaterializeError> {
    let foi = spec.feature_of_interest.as_deref().ok_or(MaterializeError::MissingFeatureOfInterest)?;
    let foi = Term::iri(foi).map_err(|e| MaterializeError::Vocabulary(e.to_string()))?;
    let property = Term::iri(&spec.observed_property).map_err(|e| MaterializeError::Vocabulary(e.to_string()))?;
    let phenomenon = spec.phenomenon_time.as_ref().ok_or(MaterializeError::MissingTime("phenomenon time"))?;
    let o = spec.iri()?;
    let mut b = Batch::default();
    b.typed(&o, term(SOSA, "Observation"));
    b.add(&o, term(SOSA, "hasFeatureOfInterest"), foi);
    b.add(&o, term(SOSA, "observedProperty"), property.clone());
    b.typed(&property, term(SOSA, "ObservableProperty"));

    let r = child_iri(&o, "result");
    b.add(&o, term(SOSA, "hasResult"), r.clone());
    match &spec.result {
        ObservationResult::Numeric { value, unit } => {
            b.typed(&r, term(QUDT, "QuantityValue"));
            b.add(&r, term(QUDT, "numericValue"), Term::double(*value));
            let unit = match unit {
                Some(u) => Term::iri(u).map_err(|e| MaterializeError::Vocabulary(e.to_string()))?,
                None => {
                    log::warn!("{}", unit_warning(spec).unwrap_or_default());
                    term(UNIT, "UNITLESS")
                }
            };
            b.add(&r, term(QUDT, "unit"), unit);
        }
        ObservationResult::Text(text) => {
            b.typed(&r, term(SOSA, "Result"));
            b.add(&r, term(RDF, "value"), Term::string(text));
        }
    }

    let pt = child_iri(&o, "phenomenonTime");
    b.add(&o, term(SOSA, "phenomenonTime"), pt.clone());
    b.instant(&pt, phenomenon);
    if let Some(rt) = &spec.result_time {
        let node = child_iri(&o, "resultTime");
        b.add(&o, term(SOSA, "resultTime"), node.clone());
        b.instant(&node, rt);
    }
    if let Some(key) = &spec.collection_key {
        let c = mint_iri(MintKind::Resource, &format!("collection.{key}"))?;
        b.typed(&c, term(SOSA, "ObservationCollection"));
        b.add(&c, term(SOSA, "hasMember"), o.clone());
    }
    Ok(b.finish())
}

/// True iff the result was produced before the observed phenomenon.
pub fn is_forecast(spec: &ObservationSpec) -> Result<bool, MaterializeError> {
    let r = spec.result_time.as_ref().ok_or(MaterializeError::MissingTime("result time"))?;
    let p = spec.phenomenon_time.as_ref().ok_or(MaterializeError::MissingTime("phenomenon time"))?;
    Ok(compare(r, p) == TemporalRelation::Before)
}
