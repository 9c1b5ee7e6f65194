//! Deterministic resource IRIs.

use super::MaterializeError;
use crate::dgg::CellId;
use crate::store::Term;
use crate::vocab::KWGR;
use std::fmt::Write;

/// What an IRI is minted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MintKind {
    /// A resource named directly by its local id, e.g. `zip.93101`.
    Resource,
    Dataset,
    Subgraph,
    Agent,
    Person,
    Expert,
}

fn encode(s: &str, keep_dot: bool, out: &mut String) {
    for b in s.bytes() {
        let c = b as char;
        if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '~') || (keep_dot && c == '.') {
            out.push(c);
        } else {
            write!(out, "%{b:02X}").unwrap();
        }
    }
}

/// Percent-encodes everything outside the unreserved set.
pub fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    encode(s, true, &mut out);
    out
}

pub fn mint_iri(kind: MintKind, local: &str) -> Result<Term, MaterializeError> {
    if local.is_empty() {
        return Err(MaterializeError::EmptyLocalId);
    }
    let mut out = String::from(KWGR);
    out.push_str(match kind {
        MintKind::Resource => "",
        MintKind::Dataset => "dataset.",
        MintKind::Subgraph => "subgraph.",
        MintKind::Agent => "agent.",
        MintKind::Person => "person.",
        MintKind::Expert => "expert.",
    });
    encode(local, kind == MintKind::Resource, &mut out);
    Ok(Term::iri_unchecked(out))
}

/// `kwgr:<dataset>.<localId>`. Dots in the dataset id are encoded so the
/// first dot always separates the two parts.
pub fn entity_iri(dataset: &str, local: &str) -> Result<Term, MaterializeError> {
    if dataset.is_empty() || local.is_empty() {
        return Err(MaterializeError::EmptyLocalId);
    }
    let mut out = String::from(KWGR);
    encode(dataset, false, &mut out);
    out.push('.');
    encode(local, true, &mut out);
    Ok(Term::iri_unchecked(out))
}

pub fn cell_iri(cell: CellId) -> Term {
    Term::iri_unchecked(format!("{KWGR}s2.level{}.{}", cell.level(), cell.token()))
}

/// Inverse of [`cell_iri`].
pub fn cell_of_iri(iri: &str) -> Option<CellId> {
    let rest = iri.strip_prefix(KWGR)?.strip_prefix("s2.level")?;
    let (level, token) = rest.split_once('.')?;
    let cell = CellId::from_token(token).ok()?;
    (cell.level().to_string() == level).then_some(cell)
}

pub fn geometry_iri(entity: &Term) -> Term {
    Term::iri_unchecked(format!("{}.geometry", entity.value()))
}

/// Name of an observed property inside observation IRIs: the last path or
/// fragment segment.
fn property_segment(property: &str) -> &str {
    let cut = property.rfind(['/', '#']).map_or(0, |i| i + 1);
    let seg = &property[cut..];
    if seg.is_empty() { property } else { seg }
}

pub fn observation_iri(entity: &Term, property: &str, n: u32) -> Term {
    let mut out = format!("{}.obs.", entity.value());
    encode(property_segment(property), false, &mut out);
    write!(out, ".{n}").unwrap();
    Term::iri_unchecked(out)
}

/// A child node named after its parent, for time instants, results and
/// similar structure.
pub(crate) fn child_iri(parent: &Term, suffix: &str) -> Term {
    Term::iri_unchecked(format!("{}.{suffix}", parent.value()))
}

/// Local part of an IRI in the resource namespace, else the whole IRI
/// encoded.
pub(crate) fn resource_local(t: &Term) -> String {
    match t.value().strip_prefix(KWGR) {
        Some(local) => local.to_string(),
        None => percent_encode(t.value()),
    }
}
