//! In-memory quad store with set semantics.
//!
//! Terms are interned to integer ids. Quads are kept in three ordered
//! indexes (SPOG, POSG, OSPG) so any pattern with bound slots is a prefix
//! scan. Graph id 0 is the default graph.

mod nquads;
mod prefix;
mod term;

pub use prefix::PrefixTable;
pub use term::{format_double, Term, Triple};

use std::collections::{BTreeSet, HashMap};
use std::ops::Bound;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("prefix {0:?} is already bound to another namespace")]
    PrefixConflict(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::Io(e.to_string())
    }
}

pub type TermId = u32;
const DEFAULT_GRAPH: TermId = 0;

/// A triple pattern over term ids; `None` is a wildcard.
pub type IdPattern = [Option<TermId>; 3];

#[derive(Debug, Clone, Default)]
struct Dictionary {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
}

impl Dictionary {
    fn intern(&mut self, t: &Term) -> TermId {
        if let Some(&id) = self.ids.get(t) {
            return id;
        }
        self.terms.push(t.clone());
        // ids start at 1 so 0 can name the default graph
        let id = self.terms.len() as TermId;
        self.ids.insert(t.clone(), id);
        id
    }
}

#[derive(Debug, Clone, Default)]
pub struct Store {
    dict: Dictionary,
    spog: BTreeSet<[TermId; 4]>,
    posg: BTreeSet<[TermId; 4]>,
    ospg: BTreeSet<[TermId; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Index {
    Spog,
    Posg,
    Ospg,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    /// Number of stored quads.
    pub fn len(&self) -> usize {
        self.spog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spog.is_empty()
    }

    pub fn id_of(&self, t: &Term) -> Option<TermId> {
        self.dict.ids.get(t).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.dict.terms[id as usize - 1]
    }

    pub fn intern(&mut self, t: &Term) -> TermId {
        self.dict.intern(t)
    }

    /// Adds a triple to the default graph; true iff it was not there.
    pub fn insert(&mut self, t: &Triple) -> Result<bool, StoreError> {
        self.insert_in(t, None)
    }

    pub fn insert_in(&mut self, t: &Triple, graph: Option<&Term>) -> Result<bool, StoreError> {
        if t.subject.is_literal() || !t.predicate.is_iri() {
            return Err(StoreError::MalformedTerm(format!("ill-formed triple {}", t.to_ntriples())));
        }
        if graph.is_some_and(Term::is_literal) {
            return Err(StoreError::MalformedTerm("graph label must be an IRI or blank node".into()));
        }
        let s = self.dict.intern(&t.subject);
        let p = self.dict.intern(&t.predicate);
        let o = self.dict.intern(&t.object);
        let g = graph.map_or(DEFAULT_GRAPH, |g| self.dict.intern(g));
        Ok(self.insert_ids([s, p, o, g]))
    }

    fn insert_ids(&mut self, [s, p, o, g]: [TermId; 4]) -> bool {
        if !self.spog.insert([s, p, o, g]) {
            return false;
        }
        self.posg.insert([p, o, s, g]);
        self.ospg.insert([o, s, p, g]);
        true
    }

    /// Removes the triple from every graph; true iff something was removed.
    pub fn remove(&mut self, t: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (self.id_of(&t.subject), self.id_of(&t.predicate), self.id_of(&t.object))
        else {
            return false;
        };
        let graphs: Vec<TermId> = self.range(Index::Spog, &[s, p, o]).map(|q| q[3]).collect();
        for &g in &graphs {
            self.spog.remove(&[s, p, o, g]);
            self.posg.remove(&[p, o, s, g]);
            self.ospg.remove(&[o, s, p, g]);
        }
        !graphs.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        match (self.id_of(&t.subject), self.id_of(&t.predicate), self.id_of(&t.object)) {
            (Some(s), Some(p), Some(o)) => self.range(Index::Spog, &[s, p, o]).next().is_some(),
            _ => false,
        }
    }

    fn range<'a>(&'a self, index: Index, prefix: &[TermId]) -> impl Iterator<Item = [TermId; 4]> + 'a {
        let mut lo = [0; 4];
        let mut hi = [TermId::MAX; 4];
        lo[..prefix.len()].copy_from_slice(prefix);
        hi[..prefix.len()].copy_from_slice(prefix);
        let set = match index {
            Index::Spog => &self.spog,
            Index::Posg => &self.posg,
            Index::Ospg => &self.ospg,
        };
        set.range((Bound::Included(lo), Bound::Included(hi))).copied()
    }

    /// Index whose key order starts with every bound slot.
    fn choose(pattern: &IdPattern) -> (Index, Vec<TermId>) {
        match *pattern {
            [Some(s), Some(p), Some(o)] => (Index::Spog, vec![s, p, o]),
            [Some(s), Some(p), None] => (Index::Spog, vec![s, p]),
            [Some(s), None, Some(o)] => (Index::Ospg, vec![o, s]),
            [Some(s), None, None] => (Index::Spog, vec![s]),
            [None, Some(p), Some(o)] => (Index::Posg, vec![p, o]),
            [None, Some(p), None] => (Index::Posg, vec![p]),
            [None, None, Some(o)] => (Index::Ospg, vec![o]),
            [None, None, None] => (Index::Spog, vec![]),
        }
    }

    /// Distinct (s, p, o) id triples matching the pattern, whatever graph
    /// they are stored in.
    pub fn match_ids(&self, pattern: IdPattern) -> impl Iterator<Item = [TermId; 3]> + '_ {
        let (index, prefix) = Store::choose(&pattern);
        let mut last: Option<[TermId; 3]> = None;
        self.range(index, &prefix).filter_map(move |q| {
            let spo = match index {
                Index::Spog => [q[0], q[1], q[2]],
                Index::Posg => [q[2], q[0], q[1]],
                Index::Ospg => [q[1], q[2], q[0]],
            };
            // the graph is the last key, so copies in other graphs are adjacent
            if last == Some(spo) {
                return None;
            }
            last = Some(spo);
            Some(spo)
        })
    }

    /// Number of distinct triples matching; used as a selectivity estimate.
    pub fn count_ids(&self, pattern: IdPattern) -> usize {
        self.match_ids(pattern).count()
    }

    /// Triples matching the pattern. A slot naming a term never seen by the
    /// store matches nothing.
    pub fn match_pattern(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        let mut ids = [None; 3];
        for (slot, term) in ids.iter_mut().zip([s, p, o]) {
            if let Some(t) = term {
                match self.id_of(t) {
                    Some(id) => *slot = Some(id),
                    None => return Vec::new(),
                }
            }
        }
        self.match_ids(ids).map(|spo| self.triple(spo)).collect()
    }

    pub fn triple(&self, [s, p, o]: [TermId; 3]) -> Triple {
        Triple { subject: self.term(s).clone(), predicate: self.term(p).clone(), object: self.term(o).clone() }
    }

    /// Objects of (s, p, ·).
    pub fn objects(&self, s: &Term, p: &Term) -> Vec<Term> {
        self.match_pattern(Some(s), Some(p), None).into_iter().map(|t| t.object).collect()
    }

    /// Subjects of (·, p, o).
    pub fn subjects(&self, p: &Term, o: &Term) -> Vec<Term> {
        self.match_pattern(None, Some(p), Some(o)).into_iter().map(|t| t.subject).collect()
    }

    /// Triples in one named graph (`None` for the default graph).
    pub fn graph_triples(&self, graph: Option<&Term>) -> Vec<Triple> {
        let g = match graph {
            None => DEFAULT_GRAPH,
            Some(t) => match self.id_of(t) {
                Some(id) => id,
                None => return Vec::new(),
            },
        };
        self.spog.iter().filter(|q| q[3] == g).map(|q| self.triple([q[0], q[1], q[2]])).collect()
    }

    /// Distinct named-graph labels.
    pub fn graphs(&self) -> Vec<Term> {
        let ids: BTreeSet<TermId> = self.spog.iter().map(|q| q[3]).filter(|&g| g != DEFAULT_GRAPH).collect();
        let mut out: Vec<Term> = ids.into_iter().map(|g| self.term(g).clone()).collect();
        out.sort();
        out
    }

    /// Adds everything from `other`, keeping graph labels.
    pub fn extend_from(&mut self, other: &Store) {
        for q in &other.spog {
            let mut ids = [0; 4];
            for k in 0..3 {
                ids[k] = self.dict.intern(other.term(q[k]));
            }
            ids[3] = if q[3] == DEFAULT_GRAPH { DEFAULT_GRAPH } else { self.dict.intern(other.term(q[3])) };
            self.insert_ids(ids);
        }
    }

    /// Canonical N-Quads: one statement per line, lines sorted bytewise,
    /// each terminated by a newline.
    pub fn to_nquads(&self) -> String {
        let mut lines: Vec<String> = self
            .spog
            .iter()
            .map(|q| {
                let spo = format!("{} {} {}", self.term(q[0]), self.term(q[1]), self.term(q[2]));
                if q[3] == DEFAULT_GRAPH {
                    format!("{spo} .")
                } else {
                    format!("{spo} {} .", self.term(q[3]))
                }
            })
            .collect();
        lines.sort_unstable();
        let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    /// Parses a document and adds every statement, or nothing if any line
    /// is malformed. Returns the number of statements read.
    pub fn load_nquads_str(&mut self, text: &str) -> Result<usize, StoreError> {
        let quads = nquads::parse_document(text)?;
        let n = quads.len();
        for q in quads {
            self.insert_in(&q.triple, q.graph.as_ref())?;
        }
        Ok(n)
    }

    pub fn load_nquads(&mut self, path: impl AsRef<Path>) -> Result<usize, StoreError> {
        let text = std::fs::read_to_string(path)?;
        self.load_nquads_str(&text)
    }

    /// Writes the canonical form; returns the number of lines written.
    pub fn export_nquads(&self, path: impl AsRef<Path>) -> Result<usize, StoreError> {
        std::fs::write(path, self.to_nquads())?;
        Ok(self.len())
    }
}
