//! Reader and writer for a subset of N-Triples.
//!
//! Supported: IRIs in angle brackets (no `\u` escapes inside IRIs), blank
//! nodes `_:name`, and quoted literals with the escapes `\"`, `\\`, `\n`,
//! `\t` and `\r`, optionally followed by `@lang` or `^^<datatype>`. Lines
//! starting with `#` and blank lines are skipped. Numeric and boolean
//! shorthands are not part of N-Triples and are rejected.

use std::fmt::Write as _;

use super::term::{BlankNode, Iri, Literal, Subject, Term, Triple};
use crate::error::{Error, Result};

pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        triples.push(parse_line(line, idx + 1)?);
    }
    Ok(triples)
}

pub fn serialize_ntriples(triples: &[Triple]) -> String {
    let mut out = String::new();
    for t in triples {
        let _ = writeln!(out, "{t}");
    }
    out
}

fn parse_line(line: &str, line_no: usize) -> Result<Triple> {
    let mut cur = Cursor {
        rest: line,
        line: line_no,
    };
    let subject = match cur.term("subject")? {
        Term::Iri(iri) => Subject::Iri(iri),
        Term::BlankNode(b) => Subject::BlankNode(b),
        Term::Literal(_) => return Err(cur.error("literal in subject position")),
    };
    cur.require_space("predicate")?;
    let predicate = match cur.term("predicate")? {
        Term::Iri(iri) => iri,
        _ => return Err(cur.error("predicate must be an IRI")),
    };
    cur.require_space("object")?;
    let object = cur.term("object")?;
    cur.skip_space();
    if !cur.rest.starts_with('.') {
        return Err(cur.error("expected ' .' terminator"));
    }
    cur.rest = cur.rest[1..].trim_start();
    if !(cur.rest.is_empty() || cur.rest.starts_with('#')) {
        return Err(cur.error("unexpected content after terminator"));
    }
    Ok(Triple {
        subject,
        predicate,
        object,
    })
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn error(&self, reason: impl Into<String>) -> Error {
        Error::parse(self.line, reason)
    }

    fn skip_space(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn require_space(&mut self, next: &str) -> Result<()> {
        if self.rest.is_empty() {
            return Err(self.error(format!("missing {next}")));
        }
        if !self.rest.starts_with([' ', '\t']) {
            return Err(self.error(format!("expected whitespace before {next}")));
        }
        self.skip_space();
        if self.rest.is_empty() {
            return Err(self.error(format!("missing {next}")));
        }
        Ok(())
    }

    fn term(&mut self, position: &str) -> Result<Term> {
        match self.rest.chars().next() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank_node().map(Term::BlankNode),
            Some('"') => self.literal().map(Term::Literal),
            Some(_) => Err(self.error(format!("unexpected token in {position}"))),
            None => Err(self.error(format!("missing {position}"))),
        }
    }

    fn iri(&mut self) -> Result<Iri> {
        let end = self.rest.find('>').ok_or_else(|| self.error("unterminated IRI"))?;
        let body = &self.rest[1..end];
        if body.contains(['<', '"', '\\']) {
            return Err(self.error(format!("illegal character in IRI <{body}>")));
        }
        let iri = Iri::new(body).map_err(|e| self.error(e.to_string()))?;
        self.rest = &self.rest[end + 1..];
        Ok(iri)
    }

    fn blank_node(&mut self) -> Result<BlankNode> {
        let body = self
            .rest
            .strip_prefix("_:")
            .ok_or_else(|| self.error("malformed blank node"))?;
        let end = body
            .find(|c: char| !(c.is_alphanumeric() || c == '_'))
            .unwrap_or(body.len());
        let node = BlankNode::new(&body[..end]).map_err(|e| self.error(e.to_string()))?;
        self.rest = &body[end..];
        Ok(node)
    }

    fn literal(&mut self) -> Result<Literal> {
        let mut lexical = String::new();
        let mut chars = self.rest.char_indices().skip(1);
        let mut close = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    close = Some(i);
                    break;
                }
                '\\' => match chars.next() {
                    Some((_, '"')) => lexical.push('"'),
                    Some((_, '\\')) => lexical.push('\\'),
                    Some((_, 'n')) => lexical.push('\n'),
                    Some((_, 't')) => lexical.push('\t'),
                    Some((_, 'r')) => lexical.push('\r'),
                    Some((_, other)) => {
                        return Err(self.error(format!("unsupported escape \\{other}")))
                    }
                    None => break,
                },
                c => lexical.push(c),
            }
        }
        let close = close.ok_or_else(|| self.error("unterminated literal"))?;
        self.rest = &self.rest[close + 1..];

        if let Some(tail) = self.rest.strip_prefix('@') {
            let end = tail
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(tail.len());
            let lang = &tail[..end];
            self.rest = &tail[end..];
            Literal::lang_tagged(lexical, lang).map_err(|e| self.error(e.to_string()))
        } else if let Some(tail) = self.rest.strip_prefix("^^") {
            if !tail.starts_with('<') {
                return Err(self.error("datatype must be an IRI"));
            }
            self.rest = tail;
            let dt = self.iri()?;
            Ok(Literal::typed(lexical, dt))
        } else {
            Ok(Literal::simple(lexical))
        }
    }
}
