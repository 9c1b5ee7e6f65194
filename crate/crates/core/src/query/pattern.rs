//! Basic graph patterns with temporal and type filters.

use super::QueryError;
use crate::materialize::{literal_of, temporal_extent};
use crate::store::{IdPattern, PrefixTable, Store, Term, TermId, Triple};
use crate::temporal::{TemporalLiteral, TemporalRelation, TimeInterval};
use crate::vocab::RDF;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot {
    Var(String),
    Term(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub s: Slot,
    pub p: Slot,
    pub o: Slot,
}

impl TriplePattern {
    fn slots(&self) -> [&Slot; 3] {
        [&self.s, &self.p, &self.o]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    /// The variable's value, read as a time interval, stands in `relation`
    /// to `interval`.
    Temporal { var: String, relation: TemporalRelation, interval: TimeInterval },
    /// The variable's value has rdf:type `class`.
    Type { var: String, class: Term },
}

impl Filter {
    fn var(&self) -> &str {
        match self {
            Filter::Temporal { var, .. } | Filter::Type { var, .. } => var,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Query {
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
    pub offset: usize,
    pub limit: Option<usize>,
}

pub type Binding = BTreeMap<String, Term>;

/// One page of results plus the unpaged count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub total: usize,
    pub bindings: Vec<Binding>,
}

fn malformed(m: impl Into<String>) -> QueryError {
    QueryError::Malformed(m.into())
}

fn is_var_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn unescape_literal(body: &str) -> Result<String, QueryError> {
    let mut out = String::new();
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some('r') => out.push('\r'),
                Some(c @ ('"' | '\\')) => out.push(c),
                other => return Err(malformed(format!("bad escape \\{}", other.unwrap_or(' ')))),
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Parses one slot: `?var`, `<iri>`, `prefix:local`, `_:label`, `a`, or a
/// literal `"lex"`, `"lex"@lang`, `"lex"^^dt`.
pub fn parse_slot(s: &str, prefixes: &PrefixTable) -> Result<Slot, QueryError> {
    let s = s.trim();
    if let Some(name) = s.strip_prefix('?') {
        return if is_var_name(name) { Ok(Slot::Var(name.to_string())) } else { Err(malformed(format!("bad variable {s:?}"))) };
    }
    parse_term(s, prefixes).map(Slot::Term)
}

pub fn parse_term(s: &str, prefixes: &PrefixTable) -> Result<Term, QueryError> {
    let s = s.trim();
    let iri = |v: &str| Term::iri(v).map_err(|e| malformed(e.to_string()));
    if s == "a" {
        return Ok(Term::iri_unchecked(format!("{RDF}type")));
    }
    if let Some(inner) = s.strip_prefix('<') {
        let v = inner.strip_suffix('>').ok_or_else(|| malformed(format!("unterminated IRI {s:?}")))?;
        return iri(v);
    }
    if let Some(label) = s.strip_prefix("_:") {
        return Term::blank(label).map_err(|e| malformed(e.to_string()));
    }
    if let Some(rest) = s.strip_prefix('"') {
        let bytes = rest.as_bytes();
        let mut k = 0;
        let end = loop {
            match bytes.get(k) {
                None => return Err(malformed(format!("unterminated literal {s:?}"))),
                Some(b'\\') => k += 2,
                Some(b'"') => break k,
                _ => k += 1,
            }
        };
        let lexical = unescape_literal(&rest[..end])?;
        let tail = &rest[end + 1..];
        return if tail.is_empty() {
            Ok(Term::string(lexical))
        } else if let Some(lang) = tail.strip_prefix('@') {
            Term::lang_string(lexical, lang).map_err(|e| malformed(e.to_string()))
        } else if let Some(dt) = tail.strip_prefix("^^") {
            let dt = parse_term(dt, prefixes)?;
            Term::literal(lexical, dt.value()).map_err(|e| malformed(e.to_string()))
        } else {
            Err(malformed(format!("unexpected text after literal in {s:?}")))
        };
    }
    if s.contains(':') {
        let expanded = prefixes.expand(s).map_err(|e| malformed(e.to_string()))?;
        return iri(&expanded);
    }
    Err(malformed(format!("cannot read term {s:?}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    var: String,
    #[serde(default)]
    relation: Option<TemporalRelation>,
    #[serde(default)]
    value: Option<String>,
    #[serde(default)]
    interval: Option<TimeInterval>,
    #[serde(default, rename = "type")]
    class: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuery {
    patterns: Vec<[String; 3]>,
    #[serde(default)]
    filters: Vec<RawFilter>,
    #[serde(default)]
    offset: usize,
    #[serde(default)]
    limit: Option<usize>,
}

fn var_name(v: &str) -> Result<String, QueryError> {
    let name = v.strip_prefix('?').unwrap_or(v);
    if is_var_name(name) { Ok(name.to_string()) } else { Err(malformed(format!("bad variable {v:?}"))) }
}

fn temporal_value(s: &str, prefixes: &PrefixTable) -> Result<TimeInterval, QueryError> {
    let lit = if s.trim_start().starts_with('"') {
        let t = parse_term(s, prefixes)?;
        literal_of(&t).ok_or_else(|| malformed(format!("{s:?} is not a temporal literal")))?
    } else {
        TemporalLiteral::infer(s.trim()).map_err(|e| malformed(e.to_string()))?
    };
    Ok(lit.to_interval())
}

impl Query {
    /// Reads the JSON form. Errors carry the parse position.
    pub fn from_json(text: &str, prefixes: &PrefixTable) -> Result<Query, QueryError> {
        let raw: RawQuery = serde_json::from_str(text).map_err(|e| QueryError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Query::from_raw(raw, prefixes)
    }

    pub fn from_value(v: serde_json::Value, prefixes: &PrefixTable) -> Result<Query, QueryError> {
        let raw: RawQuery = serde_json::from_value(v).map_err(|e| malformed(e.to_string()))?;
        Query::from_raw(raw, prefixes)
    }

    fn from_raw(raw: RawQuery, prefixes: &PrefixTable) -> Result<Query, QueryError> {
        let mut patterns = Vec::new();
        for [s, p, o] in &raw.patterns {
            let pattern = TriplePattern {
                s: parse_slot(s, prefixes)?,
                p: parse_slot(p, prefixes)?,
                o: parse_slot(o, prefixes)?,
            };
            if matches!(&pattern.s, Slot::Term(t) if t.is_literal()) {
                return Err(malformed(format!("literal subject {s:?}")));
            }
            if matches!(&pattern.p, Slot::Term(t) if !t.is_iri()) {
                return Err(malformed(format!("predicate {p:?} must be an IRI")));
            }
            patterns.push(pattern);
        }
        let mut filters = Vec::new();
        for f in raw.filters {
            let var = var_name(&f.var)?;
            let filter = match (f.class, f.relation) {
                (Some(class), None) if f.value.is_none() && f.interval.is_none() => {
                    Filter::Type { var, class: parse_term(&class, prefixes)? }
                }
                (None, Some(relation)) => {
                    let interval = match (f.value, f.interval) {
                        (Some(v), None) => temporal_value(&v, prefixes)?,
                        (None, Some(i)) => i,
                        _ => return Err(malformed("temporal filter needs exactly one of value or interval")),
                    };
                    Filter::Temporal { var, relation, interval }
                }
                _ => return Err(malformed("filter needs either type, or relation with value/interval")),
            };
            filters.push(filter);
        }
        Ok(Query { patterns, filters, offset: raw.offset, limit: raw.limit })
    }
}

struct Plan {
    vars: Vec<String>,
    /// Per pattern, per slot: constant id, variable index.
    slots: Vec<[Result<TermId, usize>; 3]>,
}

fn plan(store: &Store, q: &Query) -> Result<Option<Plan>, QueryError> {
    let mut vars: Vec<String> = Vec::new();
    let mut missing_constant = false;
    let mut slots = Vec::new();
    for p in &q.patterns {
        let mut row = [Ok(0), Ok(0), Ok(0)];
        for (k, slot) in p.slots().into_iter().enumerate() {
            row[k] = match slot {
                Slot::Var(v) => Err(match vars.iter().position(|x| x == v) {
                    Some(i) => i,
                    None => {
                        vars.push(v.clone());
                        vars.len() - 1
                    }
                }),
                Slot::Term(t) => match store.id_of(t) {
                    Some(id) => Ok(id),
                    None => {
                        missing_constant = true;
                        Ok(0)
                    }
                },
            };
        }
        slots.push(row);
    }
    for f in &q.filters {
        if !vars.iter().any(|v| v == f.var()) {
            return Err(QueryError::UnboundFilterVariable(f.var().to_string()));
        }
    }
    Ok((!missing_constant).then_some(Plan { vars, slots }))
}

fn passes(store: &Store, f: &Filter, value: &Term) -> bool {
    match f {
        Filter::Type { class, .. } => store.contains(&Triple {
            subject: value.clone(),
            predicate: Term::iri_unchecked(format!("{RDF}type")),
            object: class.clone(),
        }),
        Filter::Temporal { relation, interval, .. } => {
            let ext = literal_of(value).map(|l| l.to_interval()).or_else(|| temporal_extent(store, value));
            ext.is_some_and(|e| e.compare(interval) == *relation)
        }
    }
}

/// All bindings satisfying the patterns and filters, sorted.
///
/// Patterns are joined greedily: next comes the pattern sharing a bound
/// variable with the smallest match count over its constant slots, ties
/// going to the earlier pattern.
pub fn eval(store: &Store, q: &Query) -> Result<Vec<Binding>, QueryError> {
    let Some(plan) = plan(store, q)? else { return Ok(Vec::new()) };
    let n = plan.slots.len();
    let estimates: Vec<usize> = plan
        .slots
        .iter()
        .map(|row| store.count_ids([row[0].ok(), row[1].ok(), row[2].ok()]))
        .collect();
    let mut bound = vec![false; plan.vars.len()];
    let mut done = vec![false; n];
    let mut solutions: Vec<Vec<TermId>> = vec![vec![0; plan.vars.len()]];
    let filter_vars: Vec<usize> =
        q.filters.iter().map(|f| plan.vars.iter().position(|v| v == f.var()).unwrap()).collect();
    let mut filtered = vec![false; q.filters.len()];
    for _ in 0..n {
        let any_bound = bound.iter().any(|&b| b);
        let next = (0..n)
            .filter(|&i| !done[i])
            .min_by_key(|&i| {
                let connected = plan.slots[i].iter().any(|s| matches!(s, Err(v) if bound[*v]));
                (any_bound && !connected, estimates[i], i)
            })
            .unwrap();
        done[next] = true;
        let row = &plan.slots[next];
        let mut out = Vec::new();
        for sol in &solutions {
            let mut pat: IdPattern = [None; 3];
            for k in 0..3 {
                pat[k] = match row[k] {
                    Ok(id) => Some(id),
                    Err(v) if bound[v] => Some(sol[v]),
                    Err(_) => None,
                };
            }
            'm: for spo in store.match_ids(pat) {
                let mut ext = sol.clone();
                let mut seen = [usize::MAX; 3];
                for k in 0..3 {
                    if let Err(v) = row[k] {
                        if !bound[v] {
                            // a variable repeated inside one pattern must agree
                            if let Some(j) = (0..k).find(|&j| seen[j] == v) {
                                if spo[j] != spo[k] {
                                    continue 'm;
                                }
                            }
                            seen[k] = v;
                            ext[v] = spo[k];
                        }
                    }
                }
                out.push(ext);
            }
        }
        for s in row.iter() {
            if let Err(v) = s {
                bound[*v] = true;
            }
        }
        for (fi, f) in q.filters.iter().enumerate() {
            if !filtered[fi] && bound[filter_vars[fi]] {
                filtered[fi] = true;
                out.retain(|sol| passes(store, f, store.term(sol[filter_vars[fi]])));
            }
        }
        solutions = out;
        if solutions.is_empty() {
            break;
        }
    }
    let mut bindings: Vec<Binding> = solutions
        .into_iter()
        .map(|sol| plan.vars.iter().cloned().zip(sol.iter().map(|&id| store.term(id).clone())).collect())
        .collect();
    bindings.sort();
    bindings.dedup();
    Ok(bindings)
}

/// [`eval`] followed by the query's offset and limit.
pub fn execute(store: &Store, q: &Query) -> Result<QueryResult, QueryError> {
    let all = eval(store, q)?;
    let total = all.len();
    let page = all.into_iter().skip(q.offset).take(q.limit.unwrap_or(usize::MAX)).collect();
    Ok(QueryResult { total, bindings: page })
}
