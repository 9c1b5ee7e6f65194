//! Feature kinds and the topic hierarchy.

use super::MaterializeError;
use crate::store::{Term, Triple};
use crate::vocab::{term, DEO, GEO, KWGR, KWG_ONT, RDF, RDFS, SKOS, SOSA};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindFamily {
    Region,
    Hazard,
    Place,
}

impl KindFamily {
    /// Class every kind of the family is subtyped under.
    pub fn root_class(self) -> String {
        match self {
            KindFamily::Region => format!("{KWG_ONT}Region"),
            KindFamily::Hazard => format!("{KWG_ONT}Hazard"),
            KindFamily::Place => format!("{KWG_ONT}Place"),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            KindFamily::Region => "Place",
            KindFamily::Hazard => "Hazard",
            KindFamily::Place => "Feature type",
        }
    }

    fn supertypes(self) -> Vec<String> {
        let foi = format!("{SOSA}FeatureOfInterest");
        let feature = format!("{GEO}Feature");
        match self {
            KindFamily::Region => vec![self.root_class(), foi, feature],
            KindFamily::Hazard => {
                vec![self.root_class(), format!("{DEO}Hazard"), format!("{DEO}Event"), foi, feature]
            }
            KindFamily::Place => vec![self.root_class(), format!("{DEO}ElementAtRisk"), foi, feature],
        }
    }
}

/// A class features can be ingested as, or a topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabularyTerm {
    pub iri: String,
    pub label: String,
    pub broader: Option<String>,
    pub reference: Option<String>,
    pub definition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KindInfo {
    pub term: VocabularyTerm,
    pub family: KindFamily,
    /// Every class an instance is also typed as, most specific first.
    pub supertypes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Vocabulary {
    kinds: BTreeMap<String, KindInfo>,
    topics: BTreeMap<String, VocabularyTerm>,
}

const REGION_KINDS: [(&str, &str); 5] = [
    ("AdministrativeRegion", "Administrative Regions"),
    ("ZipCodeArea", "ZIP Code Area"),
    ("FIPSCodeArea", "FIPS Code Area"),
    ("ClimateDivision", "U.S. Climate Division"),
    ("NWZone", "National Weather Zone"),
];

const HAZARD_KINDS: [(&str, &str, &str); 9] = [
    ("Wildfire", "Wildfire", "Unplanned fire burning in vegetation."),
    ("SmokePlume", "Smoke plume", "Airborne smoke emitted by a fire."),
    ("Earthquake", "Earthquake", "Sudden ground shaking from fault rupture."),
    ("Hurricane", "Hurricane", "Tropical cyclone with sustained winds of at least 119 km/h."),
    ("Flood", "Flood", "Overflow of water onto normally dry land."),
    ("Tornado", "Tornado", "Rotating column of air in contact with the ground."),
    ("Drought", "Drought", "Prolonged shortage of water supply."),
    ("Storm", "Storm", "Severe weather event reported by a weather service."),
    ("Heatwave", "Heat wave", "Period of abnormally hot weather."),
];

const PLACE_KINDS: [(&str, &str); 3] = [("Airport", "Airport"), ("School", "School"), ("Hospital", "Hospital")];

const TOPICS: [(&str, &str, Option<&str>); 6] = [
    ("disaster_response", "disaster response", None),
    ("hurricane_response", "hurricane response", Some("disaster_response")),
    ("wildfire_response", "wildfire response", Some("disaster_response")),
    ("flood_response", "flood response", Some("disaster_response")),
    ("public_health", "public health", None),
    ("air_quality", "air quality", Some("public_health")),
];

impl Default for Vocabulary {
    fn default() -> Self {
        let mut v = Vocabulary { kinds: BTreeMap::new(), topics: BTreeMap::new() };
        for (local, label) in REGION_KINDS {
            v.add_kind(&format!("{KWG_ONT}{local}"), label, KindFamily::Region).unwrap();
        }
        for (local, label, def) in HAZARD_KINDS {
            v.add_kind(&format!("{KWG_ONT}{local}"), label, KindFamily::Hazard).unwrap();
            v.kinds.get_mut(&format!("{KWG_ONT}{local}")).unwrap().term.definition = Some(def.into());
        }
        for (local, label) in PLACE_KINDS {
            v.add_kind(&format!("{KWG_ONT}{local}"), label, KindFamily::Place).unwrap();
        }
        for (local, label, broader) in TOPICS {
            v.add_topic(&topic_iri(local), label, broader.map(topic_iri).as_deref()).unwrap();
        }
        v
    }
}

pub fn topic_iri(local: &str) -> String {
    format!("{KWGR}topic.{local}")
}

impl Vocabulary {
    pub fn empty() -> Vocabulary {
        Vocabulary { kinds: BTreeMap::new(), topics: BTreeMap::new() }
    }

    pub fn add_kind(&mut self, iri: &str, label: &str, family: KindFamily) -> Result<(), MaterializeError> {
        Term::iri(iri).map_err(|e| MaterializeError::Vocabulary(e.to_string()))?;
        let mut supertypes = family.supertypes();
        supertypes.retain(|s| s != iri);
        let term = VocabularyTerm {
            iri: iri.to_string(),
            label: label.to_string(),
            broader: Some(family.root_class()),
            reference: None,
            definition: None,
        };
        self.kinds.insert(iri.to_string(), KindInfo { term, family, supertypes });
        Ok(())
    }

    /// Attaches hazard-classification slots to a kind.
    pub fn annotate(&mut self, iri: &str, reference: Option<&str>, definition: Option<&str>) -> Result<(), MaterializeError> {
        let k = self.kinds.get_mut(iri).ok_or_else(|| MaterializeError::UnknownKind(iri.to_string()))?;
        if k.family != KindFamily::Hazard {
            return Err(MaterializeError::Vocabulary(format!("{iri} is not a hazard type")));
        }
        k.term.reference = reference.map(String::from);
        k.term.definition = definition.map(String::from);
        Ok(())
    }

    /// Adds a topic; its broader topic must already exist, and re-adding a
    /// topic may not introduce a cycle.
    pub fn add_topic(&mut self, iri: &str, label: &str, broader: Option<&str>) -> Result<(), MaterializeError> {
        Term::iri(iri).map_err(|e| MaterializeError::Vocabulary(e.to_string()))?;
        if let Some(b) = broader {
            if !self.topics.contains_key(b) {
                return Err(MaterializeError::UnknownTopic(b.to_string()));
            }
            let mut cur = Some(b.to_string());
            while let Some(c) = cur {
                if c == iri {
                    return Err(MaterializeError::Vocabulary(format!("broader cycle through {iri}")));
                }
                cur = self.topics.get(&c).and_then(|t| t.broader.clone());
            }
        }
        let t = VocabularyTerm {
            iri: iri.to_string(),
            label: label.to_string(),
            broader: broader.map(String::from),
            reference: None,
            definition: None,
        };
        self.topics.insert(iri.to_string(), t);
        Ok(())
    }

    pub fn kind(&self, iri: &str) -> Option<&KindInfo> {
        self.kinds.get(iri)
    }

    pub fn kinds(&self) -> impl Iterator<Item = &KindInfo> {
        self.kinds.values()
    }

    pub fn topic(&self, iri: &str) -> Option<&VocabularyTerm> {
        self.topics.get(iri)
    }

    pub fn topics(&self) -> impl Iterator<Item = &VocabularyTerm> {
        self.topics.values()
    }

    /// The topic followed by its broader chain.
    pub fn topic_ancestors(&self, iri: &str) -> Vec<&VocabularyTerm> {
        let mut out = Vec::new();
        let mut cur = self.topics.get(iri);
        while let Some(t) = cur {
            out.push(t);
            cur = t.broader.as_deref().and_then(|b| self.topics.get(b));
        }
        out
    }

    /// Class hierarchy and labels for every kind.
    pub fn class_triples(&self) -> Vec<Triple> {
        let sub = term(RDFS, "subClassOf");
        let label = term(RDFS, "label");
        let mut out = Vec::new();
        for k in self.kinds.values() {
            let c = Term::iri_unchecked(&k.term.iri);
            out.push(Triple { subject: c.clone(), predicate: term(RDF, "type"), object: term(RDFS, "Class") });
            out.push(Triple { subject: c.clone(), predicate: label.clone(), object: Term::string(&k.term.label) });
            let mut chain = vec![k.term.iri.clone()];
            chain.extend(k.supertypes.iter().cloned());
            for w in chain.windows(2) {
                out.push(Triple {
                    subject: Term::iri_unchecked(&w[0]),
                    predicate: sub.clone(),
                    object: Term::iri_unchecked(&w[1]),
                });
            }
            if let Some(r) = &k.term.reference {
                out.push(Triple { subject: c.clone(), predicate: term(SKOS, "notation"), object: Term::string(r) });
            }
            if let Some(d) = &k.term.definition {
                out.push(Triple { subject: c.clone(), predicate: term(SKOS, "definition"), object: Term::string(d) });
            }
        }
        out
    }

    /// Instance triples for a topic and everything broader than it.
    pub fn topic_triples(&self, iri: &str) -> Vec<Triple> {
        let mut out = Vec::new();
        for t in self.topic_ancestors(iri) {
            let s = Term::iri_unchecked(&t.iri);
            out.push(Triple { subject: s.clone(), predicate: term(RDF, "type"), object: term(KWG_ONT, "Topic") });
            out.push(Triple { subject: s.clone(), predicate: term(RDFS, "label"), object: Term::string(&t.label) });
            if let Some(b) = &t.broader {
                out.push(Triple { subject: s, predicate: term(SKOS, "broader"), object: Term::iri_unchecked(b) });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_kinds_under_region() {
        let v = Vocabulary::default();
        let zip = v.kind(&format!("{KWG_ONT}ZipCodeArea")).unwrap();
        assert_eq!(zip.family, KindFamily::Region);
        assert!(zip.supertypes.contains(&format!("{KWG_ONT}Region")));
        assert!(zip.supertypes.contains(&format!("{SOSA}FeatureOfInterest")));
        let fire = v.kind(&format!("{KWG_ONT}Wildfire")).unwrap();
        assert!(fire.supertypes.contains(&format!("{DEO}Event")));
    }

    #[test]
    fn topic_cycles_rejected() {
        let mut v = Vocabulary::empty();
        v.add_topic("http://x/a", "a", None).unwrap();
        v.add_topic("http://x/b", "b", Some("http://x/a")).unwrap();
        assert!(v.add_topic("http://x/a", "a", Some("http://x/b")).is_err());
        assert!(matches!(v.add_topic("http://x/c", "c", Some("http://x/zzz")), Err(MaterializeError::UnknownTopic(_))));
        assert_eq!(v.topic_ancestors("http://x/b").len(), 2);
    }
}
