//! Line-oriented N-Quads reader. Each statement must sit on one line.

use super::term::{Term, Triple};
use super::StoreError;
use crate::vocab::XSD;

pub(crate) struct Quad {
    pub triple: Triple,
    pub graph: Option<Term>,
}

struct Line<'a> {
    text: &'a str,
    pos: usize,
    number: usize,
}

impl<'a> Line<'a> {
    fn error(&self, message: impl Into<String>) -> StoreError {
        StoreError::Parse { line: self.number, message: format!("{} (column {})", message.into(), self.pos + 1) }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start_matches([' ', '\t']).len();
    }

    fn iri(&mut self) -> Result<String, StoreError> {
        self.pos += 1;
        let end = self.rest().find('>').ok_or_else(|| self.error("unterminated IRI"))?;
        let value = unescape(&self.rest()[..end]).map_err(|m| self.error(m))?;
        self.pos += end + 1;
        Ok(value)
    }

    fn term(&mut self) -> Result<Term, StoreError> {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with('<') {
            let iri = self.iri()?;
            Term::iri(iri).map_err(|e| self.error(e.to_string()))
        } else if let Some(after) = rest.strip_prefix("_:") {
            let len = after.find([' ', '\t']).unwrap_or(after.len());
            let mut label = &after[..len];
            // a label cannot end in '.', so "_:b." is a label followed by the terminator
            while label.ends_with('.') {
                label = &label[..label.len() - 1];
            }
            let term = Term::blank(label).map_err(|e| self.error(e.to_string()))?;
            self.pos += 2 + label.len();
            Ok(term)
        } else if rest.starts_with('"') {
            self.literal()
        } else {
            Err(self.error("expected a term"))
        }
    }

    fn literal(&mut self) -> Result<Term, StoreError> {
        self.pos += 1;
        let bytes = self.rest().as_bytes();
        let mut end = None;
        let mut k = 0;
        while k < bytes.len() {
            match bytes[k] {
                b'\\' => k += 2,
                b'"' => {
                    end = Some(k);
                    break;
                }
                _ => k += 1,
            }
        }
        let end = end.ok_or_else(|| self.error("unterminated literal"))?;
        let lexical = unescape(&self.rest()[..end]).map_err(|m| self.error(m))?;
        self.pos += end + 1;
        let rest = self.rest();
        if rest.starts_with("^^") {
            self.pos += 2;
            if !self.rest().starts_with('<') {
                return Err(self.error("expected datatype IRI"));
            }
            let dt = self.iri()?;
            Term::literal(lexical, dt).map_err(|e| self.error(e.to_string()))
        } else if let Some(after) = rest.strip_prefix('@') {
            let len = after.find(|c: char| !(c.is_ascii_alphanumeric() || c == '-')).unwrap_or(after.len());
            let lang = &after[..len];
            self.pos += 1 + len;
            Term::lang_string(lexical, lang).map_err(|e| self.error(e.to_string()))
        } else {
            Ok(Term::typed(lexical, format!("{XSD}string")))
        }
    }
}

fn unescape(s: &str) -> Result<String, String> {
    if !s.contains('\\') {
        return Ok(s.to_string());
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('b') => out.push('\u{8}'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('f') => out.push('\u{c}'),
            Some('"') => out.push('"'),
            Some('\'') => out.push('\''),
            Some('\\') => out.push('\\'),
            Some(u @ ('u' | 'U')) => {
                let n = if u == 'u' { 4 } else { 8 };
                let hex: String = chars.by_ref().take(n).collect();
                let code = u32::from_str_radix(&hex, 16).map_err(|_| format!("bad \\{u} escape"))?;
                out.push(char::from_u32(code).ok_or_else(|| format!("bad code point {code:#x}"))?);
            }
            other => return Err(format!("unknown escape \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

/// Parses a whole document; nothing is returned unless every line parses.
pub(crate) fn parse_document(text: &str) -> Result<Vec<Quad>, StoreError> {
    let mut quads = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let mut line = Line { text: raw, pos: 0, number: idx + 1 };
        line.skip_ws();
        if line.rest().is_empty() || line.rest().starts_with('#') {
            continue;
        }
        let s = line.term()?;
        let p = line.term()?;
        let o = line.term()?;
        line.skip_ws();
        let graph = if line.rest().starts_with('.') { None } else { Some(line.term()?) };
        line.skip_ws();
        if !line.rest().starts_with('.') {
            return Err(line.error("expected '.'"));
        }
        line.pos += 1;
        line.skip_ws();
        if !(line.rest().is_empty() || line.rest().starts_with('#')) {
            return Err(line.error("trailing characters"));
        }
        if graph.as_ref().is_some_and(Term::is_literal) {
            return Err(line.error("graph label must be an IRI or blank node"));
        }
        let triple = Triple::new(s, p, o).map_err(|e| line.error(e.to_string()))?;
        quads.push(Quad { triple, graph });
    }
    Ok(quads)
}
