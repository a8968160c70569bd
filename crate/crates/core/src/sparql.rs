//! SPARQL 1.1 protocol client for one-hop relation extraction.
//!
//! Two fixed SELECT templates fetch the outgoing and incoming edges of an
//! entity together with the `rdfs:label` of the predicate and the neighbor.
//! Results are read from the SPARQL 1.1 Query Results JSON format and turned
//! into the same [`CandidatePair`] list the in-memory graph produces.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::http::HttpClient;
use crate::rdf::{
    normalize_pairs, BlankNode, CandidatePair, Direction, Iri, Literal, Term, RDFS_LABEL,
};

pub const RESULTS_JSON: &str = "application/sparql-results+json";
pub const MAX_RETRIES: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointConfig {
    url: String,
    timeout: Duration,
    retries: u32,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>, timeout_ms: u64, retries: u32) -> Result<Self> {
        let url = url.into();
        reqwest::Url::parse(&url)
            .map_err(|e| Error::Config(format!("invalid endpoint URL {url:?}: {e}")))?;
        if timeout_ms == 0 {
            return Err(Error::Config("timeout must be at least 1 ms".into()));
        }
        if retries > MAX_RETRIES {
            return Err(Error::Config(format!("retries must be at most {MAX_RETRIES}")));
        }
        Ok(EndpointConfig {
            url,
            timeout: Duration::from_millis(timeout_ms),
            retries,
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    pub fn retries(&self) -> u32 {
        self.retries
    }
}

/// Variables and bindings of a SELECT result.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultTable {
    pub vars: Vec<String>,
    pub rows: Vec<BTreeMap<String, Term>>,
}

fn outgoing_parts() -> (String, String) {
    (
        "SELECT ?p ?o ?pl ?ol WHERE { <".to_owned(),
        format!(
            "> ?p ?o . OPTIONAL {{ ?p <{RDFS_LABEL}> ?pl }} OPTIONAL {{ ?o <{RDFS_LABEL}> ?ol }} }}"
        ),
    )
}

fn incoming_parts() -> (String, String) {
    (
        "SELECT ?s ?p ?sl ?pl WHERE { ?s ?p <".to_owned(),
        format!(
            "> . OPTIONAL {{ ?p <{RDFS_LABEL}> ?pl }} OPTIONAL {{ ?s <{RDFS_LABEL}> ?sl }} }}"
        ),
    )
}

fn guard_iri(entity: &Iri) -> Result<&str> {
    let s = entity.as_str();
    if let Some(c) = s
        .chars()
        .find(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err(Error::Request(format!(
            "invalid IRI {s:?}: character {c:?} not allowed in a SPARQL IRI"
        )));
    }
    Ok(s)
}

pub fn build_outgoing_query(entity: &Iri) -> Result<String> {
    let (head, tail) = outgoing_parts();
    Ok(format!("{head}{}{tail}", guard_iri(entity)?))
}

pub fn build_incoming_query(entity: &Iri) -> Result<String> {
    let (head, tail) = incoming_parts();
    Ok(format!("{head}{}{tail}", guard_iri(entity)?))
}

/// Recognizes a query produced by [`build_outgoing_query`] or
/// [`build_incoming_query`] and returns its direction and entity.
pub fn match_one_hop_query(query: &str) -> Option<(Direction, Iri)> {
    let query = query.trim();
    [
        (Direction::Outgoing, outgoing_parts()),
        (Direction::Incoming, incoming_parts()),
    ]
    .into_iter()
    .find_map(|(dir, (head, tail))| {
        let entity = query.strip_prefix(head.as_str())?.strip_suffix(tail.as_str())?;
        let iri = Iri::new(entity).ok()?;
        guard_iri(&iri).ok()?;
        Some((dir, iri))
    })
}

#[derive(Deserialize)]
struct ResultsDocument {
    head: Head,
    results: Results,
}

#[derive(Deserialize)]
struct Head {
    #[serde(default)]
    vars: Vec<String>,
}

#[derive(Deserialize)]
struct Results {
    bindings: Vec<BTreeMap<String, BindingValue>>,
}

#[derive(Deserialize)]
struct BindingValue {
    #[serde(rename = "type")]
    kind: String,
    value: String,
    #[serde(rename = "xml:lang")]
    lang: Option<String>,
    datatype: Option<String>,
}

impl BindingValue {
    fn into_term(self) -> Result<Term> {
        let bad = |e: Error| Error::Format(e.to_string());
        match self.kind.as_str() {
            "uri" => Iri::new(self.value).map(Term::Iri).map_err(bad),
            "bnode" => BlankNode::new(self.value).map(Term::BlankNode).map_err(bad),
            "literal" | "typed-literal" => match (self.lang, self.datatype) {
                (Some(_), Some(_)) => Err(Error::Format(
                    "literal carries both xml:lang and datatype".into(),
                )),
                (Some(lang), None) => Literal::lang_tagged(self.value, lang)
                    .map(Term::Literal)
                    .map_err(bad),
                (None, Some(dt)) => Ok(Term::Literal(Literal::typed(
                    self.value,
                    Iri::new(dt).map_err(bad)?,
                ))),
                (None, None) => Ok(Term::Literal(Literal::simple(self.value))),
            },
            other => Err(Error::Format(format!("unknown binding type {other:?}"))),
        }
    }
}

/// Parses a SPARQL 1.1 Query Results JSON document.
pub fn parse_results_json(text: &str) -> Result<ResultTable> {
    let doc: ResultsDocument = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("malformed SPARQL results document: {e}")))?;
    let vars = doc.head.vars;
    let mut rows = Vec::with_capacity(doc.results.bindings.len());
    for binding in doc.results.bindings {
        let mut row = BTreeMap::new();
        for (var, value) in binding {
            if !vars.contains(&var) {
                return Err(Error::Format(format!(
                    "binding for ?{var} which is not listed in head.vars"
                )));
            }
            row.insert(var, value.into_term()?);
        }
        rows.push(row);
    }
    Ok(ResultTable { vars, rows })
}

fn term_to_binding(term: &Term) -> serde_json::Value {
    use serde_json::json;
    match term {
        Term::Iri(iri) => json!({"type": "uri", "value": iri.as_str()}),
        Term::BlankNode(b) => json!({"type": "bnode", "value": b.label()}),
        Term::Literal(lit) => {
            let mut v = json!({"type": "literal", "value": lit.lexical()});
            if let Some(lang) = lit.lang() {
                v["xml:lang"] = json!(lang);
            } else if let Some(dt) = lit.datatype() {
                v["datatype"] = json!(dt.as_str());
            }
            v
        }
    }
}

/// Serializes a table in the SPARQL 1.1 Query Results JSON format.
pub fn write_results_json(table: &ResultTable) -> String {
    let bindings: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|(var, term)| (var.clone(), term_to_binding(term)))
                .collect::<serde_json::Map<_, _>>()
                .into()
        })
        .collect();
    serde_json::json!({
        "head": {"vars": table.vars},
        "results": {"bindings": bindings},
    })
    .to_string()
}

/// Thread-safe client bound to one endpoint.
#[derive(Debug, Clone)]
pub struct SparqlClient {
    config: EndpointConfig,
    http: HttpClient,
}

impl SparqlClient {
    pub fn new(config: EndpointConfig) -> Result<Self> {
        let http = HttpClient::new(config.timeout, config.retries)?;
        Ok(SparqlClient { config, http })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn execute(&self, query: &str) -> Result<ResultTable> {
        let body = self
            .http
            .post_form(&self.config.url, &[("query", query)], RESULTS_JSON)?;
        parse_results_json(&body)
    }

    pub fn one_hop(&self, entity: &Iri) -> Result<Vec<CandidatePair>> {
        let outgoing = self.execute(&build_outgoing_query(entity)?)?;
        let incoming = self.execute(&build_incoming_query(entity)?)?;

        let mut pairs = Vec::with_capacity(outgoing.rows.len() + incoming.rows.len());
        for row in &outgoing.rows {
            pairs.push(row_to_pair(row, Direction::Outgoing, "o", "ol")?);
        }
        for row in &incoming.rows {
            let pair = row_to_pair(row, Direction::Incoming, "s", "sl")?;
            if matches!(pair.neighbor, Term::Literal(_)) {
                return Err(Error::Format("literal bound in subject position".into()));
            }
            pairs.push(pair);
        }
        Ok(normalize_pairs(pairs))
    }
}

fn row_to_pair(
    row: &BTreeMap<String, Term>,
    direction: Direction,
    neighbor_var: &str,
    neighbor_label_var: &str,
) -> Result<CandidatePair> {
    let predicate = match row.get("p") {
        Some(Term::Iri(iri)) => iri.clone(),
        Some(other) => return Err(Error::Format(format!("?p bound to non-IRI {other}"))),
        None => return Err(Error::Format("row without ?p".into())),
    };
    let neighbor = row
        .get(neighbor_var)
        .cloned()
        .ok_or_else(|| Error::Format(format!("row without ?{neighbor_var}")))?;
    let label_of = |var: &str| match row.get(var) {
        Some(Term::Literal(lit)) => Some(lit.lexical().to_owned()),
        _ => None,
    };
    // Only IRIs carry labels, matching the in-memory label index.
    let neighbor_label = match neighbor {
        Term::Iri(_) => label_of(neighbor_label_var),
        _ => None,
    };
    Ok(CandidatePair {
        direction,
        predicate,
        predicate_label: label_of("pl"),
        neighbor,
        neighbor_label,
    })
}

pub fn execute(config: &EndpointConfig, query: &str) -> Result<ResultTable> {
    SparqlClient::new(config.clone())?.execute(query)
}

pub fn one_hop_remote(config: &EndpointConfig, entity: &Iri) -> Result<Vec<CandidatePair>> {
    SparqlClient::new(config.clone())?.one_hop(entity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn outgoing_template() {
        let q = build_outgoing_query(&iri("https://dblp.org/pid/x")).unwrap();
        assert_eq!(
            q,
            "SELECT ?p ?o ?pl ?ol WHERE { <https://dblp.org/pid/x> ?p ?o . \
             OPTIONAL { ?p <http://www.w3.org/2000/01/rdf-schema#label> ?pl } \
             OPTIONAL { ?o <http://www.w3.org/2000/01/rdf-schema#label> ?ol } }"
        );
    }

    #[test]
    fn incoming_template() {
        let q = build_incoming_query(&iri("https://dblp.org/pid/x")).unwrap();
        assert_eq!(
            q,
            "SELECT ?s ?p ?sl ?pl WHERE { ?s ?p <https://dblp.org/pid/x> . \
             OPTIONAL { ?p <http://www.w3.org/2000/01/rdf-schema#label> ?pl } \
             OPTIONAL { ?s <http://www.w3.org/2000/01/rdf-schema#label> ?sl } }"
        );
    }

    #[test]
    fn templates_differ_only_in_pattern_and_neighbor_vars() {
        let e = iri("http://e/x");
        let out = build_outgoing_query(&e).unwrap();
        let inc = build_incoming_query(&e).unwrap();
        // Rename the neighbor variable and rewrite the triple pattern.
        let normalized = inc
            .replace("?s ?p ?sl ?pl", "?p ?o ?pl ?ol")
            .replace("?s ?p <http://e/x> .", "<http://e/x> ?p ?o .")
            .replace("?s <", "?o <")
            .replace("?sl", "?ol");
        assert_eq!(normalized, out);
    }

    #[test]
    fn injection_guard() {
        for bad in ["http://e/x>", "http://e/<x", "http://e/\"x", "http://e/{x}"] {
            let e = iri(bad);
            assert!(matches!(build_outgoing_query(&e), Err(Error::Request(_))), "{bad}");
            assert!(matches!(build_incoming_query(&e), Err(Error::Request(_))), "{bad}");
        }
    }

    #[test]
    fn instantiation_is_injective_and_recognized() {
        let a = iri("http://e/a");
        let b = iri("http://e/ab");
        assert_ne!(build_outgoing_query(&a).unwrap(), build_outgoing_query(&b).unwrap());
        assert_eq!(
            match_one_hop_query(&build_incoming_query(&b).unwrap()),
            Some((Direction::Incoming, b.clone()))
        );
        assert_eq!(
            match_one_hop_query(&build_outgoing_query(&a).unwrap()),
            Some((Direction::Outgoing, a))
        );
        assert_eq!(match_one_hop_query("SELECT * WHERE { ?s ?p ?o }"), None);
    }

    #[test]
    fn parses_minimal_document() {
        let t = parse_results_json(
            r#"{"head":{"vars":["p"]},"results":{"bindings":[{"p":{"type":"uri","value":"http://e/p"}}]}}"#,
        )
        .unwrap();
        assert_eq!(t.vars, vec!["p"]);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0]["p"], Term::Iri(iri("http://e/p")));
    }

    #[test]
    fn parses_empty_document() {
        let t = parse_results_json(r#"{"head":{"vars":[]},"results":{"bindings":[]}}"#).unwrap();
        assert_eq!(t, ResultTable::default());
    }

    #[test]
    fn rejects_missing_results() {
        let err = parse_results_json(r#"{"head":{"vars":["p"]}}"#).unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn literal_kinds_and_unlisted_vars() {
        let t = parse_results_json(
            r#"{"head":{"vars":["a","b","c"]},"results":{"bindings":[{
                "a":{"type":"literal","value":"x","xml:lang":"en"},
                "b":{"type":"literal","value":"1","datatype":"http://www.w3.org/2001/XMLSchema#int"},
                "c":{"type":"bnode","value":"b0"}}]}}"#,
        )
        .unwrap();
        assert_eq!(t.rows[0]["a"], Term::Literal(Literal::lang_tagged("x", "en").unwrap()));
        assert!(matches!(t.rows[0]["c"], Term::BlankNode(_)));
        let err = parse_results_json(
            r#"{"head":{"vars":[]},"results":{"bindings":[{"p":{"type":"uri","value":"http://e/p"}}]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn writer_output_reparses() {
        let mut row = BTreeMap::new();
        row.insert("o".to_owned(), Term::Literal(Literal::lang_tagged("x \"y\"", "de").unwrap()));
        row.insert("p".to_owned(), Term::Iri(iri("http://e/p")));
        let mut row2 = BTreeMap::new();
        row2.insert("o".to_owned(), Term::BlankNode(BlankNode::new("b1").unwrap()));
        row2.insert("p".to_owned(), Term::Iri(iri("http://e/q")));
        let table = ResultTable {
            vars: vec!["p".into(), "o".into()],
            rows: vec![row, row2],
        };
        assert_eq!(parse_results_json(&write_results_json(&table)).unwrap(), table);
    }

    #[test]
    fn endpoint_config_bounds() {
        assert!(EndpointConfig::new("http://localhost:1/sparql", 1, 5).is_ok());
        assert!(EndpointConfig::new("http://localhost:1/sparql", 0, 0).is_err());
        assert!(EndpointConfig::new("http://localhost:1/sparql", 10, 6).is_err());
        assert!(EndpointConfig::new("not a url", 10, 0).is_err());
    }
}
