use super::StoreError;
use crate::vocab::{CORE_PREFIXES, EXTRA_PREFIXES};
use std::collections::BTreeMap;

/// Prefix ↔ namespace associations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTable {
    map: BTreeMap<String, String>,
}

impl Default for PrefixTable {
    fn default() -> Self {
        let mut t = PrefixTable { map: BTreeMap::new() };
        for (p, ns) in CORE_PREFIXES.iter().chain(EXTRA_PREFIXES.iter()) {
            t.map.insert(p.to_string(), ns.to_string());
        }
        t
    }
}

impl PrefixTable {
    /// Only the nine core namespaces.
    pub fn core() -> PrefixTable {
        PrefixTable { map: CORE_PREFIXES.iter().map(|(p, ns)| (p.to_string(), ns.to_string())).collect() }
    }

    /// Registers a prefix. Re-binding an existing prefix to a different
    /// namespace is an error.
    pub fn insert(&mut self, prefix: &str, namespace: &str) -> Result<(), StoreError> {
        if let Some(existing) = self.map.get(prefix) {
            if existing != namespace {
                return Err(StoreError::PrefixConflict(prefix.to_string()));
            }
        }
        super::Term::iri(namespace)?;
        self.map.insert(prefix.to_string(), namespace.to_string());
        Ok(())
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }

    pub fn expand(&self, compact: &str) -> Result<String, StoreError> {
        let (prefix, local) =
            compact.split_once(':').ok_or_else(|| StoreError::UnknownPrefix(compact.to_string()))?;
        let ns = self.map.get(prefix).ok_or_else(|| StoreError::UnknownPrefix(prefix.to_string()))?;
        Ok(format!("{ns}{local}"))
    }

    /// Reads `<iri>`, `prefix:local` with a known prefix, or an absolute
    /// IRI.
    pub fn resolve(&self, s: &str) -> Result<String, StoreError> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return super::Term::iri(inner).map(|_| inner.to_string());
        }
        if let Some((prefix, _)) = s.split_once(':') {
            if self.map.contains_key(prefix) {
                return self.expand(s);
            }
        }
        super::Term::iri(s).map(|_| s.to_string())
    }

    /// Shortest form using the longest matching namespace; IRIs outside
    /// every namespace come back in angle brackets.
    pub fn compact(&self, iri: &str) -> String {
        self.map
            .iter()
            .filter(|(_, ns)| iri.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| format!("{p}:{}", &iri[ns.len()..]))
            .unwrap_or_else(|| format!("<{iri}>"))
    }
}
