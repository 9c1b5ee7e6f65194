use super::StoreError;
use crate::vocab::{RDF, XSD};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An RDF term. Literals always carry a datatype; plain strings use
/// xsd:string and language-tagged strings rdf:langString.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Term {
    Iri { value: String },
    Literal { lexical: String, datatype: String, lang: Option<String> },
    Blank { label: String },
}

fn is_absolute_iri(s: &str) -> bool {
    let Some((scheme, _)) = s.split_once(':') else { return false };
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !s.chars().any(|c| c.is_control() || c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Term, StoreError> {
        let value = value.into();
        if !is_absolute_iri(&value) {
            return Err(StoreError::MalformedTerm(format!("not an absolute IRI: {value:?}")));
        }
        Ok(Term::Iri { value })
    }

    /// For IRIs built from known-good namespaces.
    pub(crate) fn iri_unchecked(value: impl Into<String>) -> Term {
        let value = value.into();
        debug_assert!(is_absolute_iri(&value), "{value}");
        Term::Iri { value }
    }

    pub fn literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Result<Term, StoreError> {
        let datatype = datatype.into();
        if !is_absolute_iri(&datatype) {
            return Err(StoreError::MalformedTerm(format!("datatype is not an absolute IRI: {datatype:?}")));
        }
        Ok(Term::Literal { lexical: lexical.into(), datatype, lang: None })
    }

    pub(crate) fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::Literal { lexical: lexical.into(), datatype: datatype.into(), lang: None }
    }

    pub fn string(lexical: impl Into<String>) -> Term {
        Term::typed(lexical, format!("{XSD}string"))
    }

    pub fn lang_string(lexical: impl Into<String>, lang: &str) -> Result<Term, StoreError> {
        let ok = !lang.is_empty()
            && lang.split('-').all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric()));
        if !ok {
            return Err(StoreError::MalformedTerm(format!("bad language tag {lang:?}")));
        }
        Ok(Term::Literal {
            lexical: lexical.into(),
            datatype: format!("{RDF}langString"),
            lang: Some(lang.to_ascii_lowercase()),
        })
    }

    pub fn blank(label: impl Into<String>) -> Result<Term, StoreError> {
        let label = label.into();
        let ok = !label.is_empty()
            && label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            && !label.ends_with('.');
        if !ok {
            return Err(StoreError::MalformedTerm(format!("bad blank node label {label:?}")));
        }
        Ok(Term::Blank { label })
    }

    pub fn double(v: f64) -> Term {
        Term::typed(format_double(v), format!("{XSD}double"))
    }

    pub fn integer(v: i64) -> Term {
        Term::typed(v.to_string(), format!("{XSD}integer"))
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri { .. })
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank { .. })
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri { value } => Some(value),
            _ => None,
        }
    }

    pub fn lexical(&self) -> Option<&str> {
        match self {
            Term::Literal { lexical, .. } => Some(lexical),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<&str> {
        match self {
            Term::Literal { datatype, .. } => Some(datatype),
            _ => None,
        }
    }

    /// Text used when sorting or labelling: the IRI, lexical form or label.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri { value } => value,
            Term::Literal { lexical, .. } => lexical,
            Term::Blank { label } => label,
        }
    }

    /// N-Triples serialization.
    pub fn to_ntriples(&self) -> String {
        match self {
            Term::Iri { value } => format!("<{value}>"),
            Term::Blank { label } => format!("_:{label}"),
            Term::Literal { lexical, datatype, lang } => {
                let mut out = String::with_capacity(lexical.len() + 2);
                out.push('"');
                for c in lexical.chars() {
                    match c {
                        '\\' => out.push_str("\\\\"),
                        '"' => out.push_str("\\\""),
                        '\n' => out.push_str("\\n"),
                        '\r' => out.push_str("\\r"),
                        '\t' => out.push_str("\\t"),
                        c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
                if let Some(lang) = lang {
                    out.push('@');
                    out.push_str(lang);
                } else if datatype != &format!("{XSD}string") {
                    out.push_str("^^<");
                    out.push_str(datatype);
                    out.push('>');
                }
                out
            }
        }
    }
}

/// Canonical-enough xsd:double lexical form: shortest round-trip digits.
pub fn format_double(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "INF".into() } else { "-INF".into() }
    } else {
        format!("{v:?}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

/// A statement. Subjects are IRIs or blank nodes and predicates IRIs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Triple, StoreError> {
        if subject.is_literal() {
            return Err(StoreError::MalformedTerm(format!("literal subject {subject}")));
        }
        if !predicate.is_iri() {
            return Err(StoreError::MalformedTerm(format!("predicate must be an IRI, got {predicate}")));
        }
        Ok(Triple { subject, predicate, object })
    }

    pub fn to_ntriples(&self) -> String {
        format!("{} {} {} .", self.subject, self.predicate, self.object)
    }
}
