//! Entity linking: candidate entities for a question, and the choice of the
//! single focus entity.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::http::HttpClient;
use crate::ranker::tokenize;
use crate::rdf::{parse_ntriples, Iri, KnowledgeGraph, Subject, Term, OWL_SAME_AS};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkedEntity {
    pub iri: Iri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

impl LinkedEntity {
    pub fn new(iri: Iri, label: Option<String>, score: Option<f64>) -> Result<Self> {
        if let Some(s) = score {
            if !s.is_finite() || !(0.0..=1.0).contains(&s) {
                return Err(Error::Format(format!("entity score {s} outside [0, 1]")));
            }
        }
        Ok(LinkedEntity { iri, label, score })
    }

    /// An entity supplied directly (gold data), without label or score.
    pub fn bare(iri: Iri) -> Self {
        LinkedEntity {
            iri,
            label: None,
            score: None,
        }
    }
}

pub trait EntityLinker: Send + Sync {
    fn link(&self, question: &str) -> Result<Vec<LinkedEntity>>;
}

impl<L: EntityLinker + ?Sized> EntityLinker for Arc<L> {
    fn link(&self, question: &str) -> Result<Vec<LinkedEntity>> {
        (**self).link(question)
    }
}

fn token_set(text: &str) -> BTreeSet<String> {
    tokenize(text).into_iter().collect()
}

/// Scores every labelled IRI of the graph by the share of its label tokens
/// found in the question. Entities scoring zero are left out; the rest are
/// sorted by score (descending) then IRI.
pub fn link_offline(graph: &KnowledgeGraph, question: &str) -> Vec<LinkedEntity> {
    let q = token_set(question);
    let mut out: Vec<LinkedEntity> = graph
        .labels()
        .filter_map(|(iri, label)| {
            let tokens = token_set(label);
            let hits = tokens.intersection(&q).count();
            (hits > 0).then(|| LinkedEntity {
                iri: iri.clone(),
                label: Some(label.to_owned()),
                score: Some(hits as f64 / tokens.len() as f64),
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .unwrap_or_default()
            .total_cmp(&a.score.unwrap_or_default())
            .then_with(|| a.iri.cmp(&b.iri))
    });
    out
}

#[derive(Debug, Clone)]
pub struct OfflineLinker {
    graph: Arc<KnowledgeGraph>,
}

impl OfflineLinker {
    pub fn new(graph: Arc<KnowledgeGraph>) -> Self {
        OfflineLinker { graph }
    }
}

impl EntityLinker for OfflineLinker {
    fn link(&self, question: &str) -> Result<Vec<LinkedEntity>> {
        Ok(link_offline(&self.graph, question))
    }
}

#[derive(Serialize)]
pub struct LinkRequest<'a> {
    pub question: &'a str,
}

#[derive(Deserialize)]
struct LinkResponse {
    candidates: Vec<RawCandidate>,
}

#[derive(Deserialize)]
struct RawCandidate {
    iri: String,
    label: Option<String>,
    score: Option<f64>,
}

/// Client for a linking service speaking `POST {"question": ...}` →
/// `{"candidates":[{"iri","label"?,"score"?}]}`.
#[derive(Debug, Clone)]
pub struct RemoteLinker {
    url: String,
    http: HttpClient,
}

impl RemoteLinker {
    pub fn new(url: impl Into<String>, timeout_ms: u64) -> Result<Self> {
        let url = url.into();
        reqwest::Url::parse(&url)
            .map_err(|e| Error::Config(format!("invalid linker URL {url:?}: {e}")))?;
        if timeout_ms == 0 {
            return Err(Error::Config("linker timeout must be at least 1 ms".into()));
        }
        let http = HttpClient::new(Duration::from_millis(timeout_ms), 0)?;
        Ok(RemoteLinker { url, http })
    }
}

impl EntityLinker for RemoteLinker {
    fn link(&self, question: &str) -> Result<Vec<LinkedEntity>> {
        if question.trim().is_empty() {
            return Err(Error::Request("question must not be empty".into()));
        }
        let body = self.http.post_json(&self.url, &LinkRequest { question })?;
        parse_link_response(&body)
    }
}

pub fn parse_link_response(body: &str) -> Result<Vec<LinkedEntity>> {
    let resp: LinkResponse = serde_json::from_str(body)
        .map_err(|e| Error::Format(format!("malformed linking response: {e}")))?;
    resp.candidates
        .into_iter()
        .map(|c| {
            let iri = Iri::new(c.iri).map_err(|e| Error::Format(e.to_string()))?;
            LinkedEntity::new(iri, c.label, c.score)
        })
        .collect()
}

pub fn link_remote(api_url: &str, question: &str, timeout_ms: u64) -> Result<Vec<LinkedEntity>> {
    RemoteLinker::new(api_url, timeout_ms)?.link(question)
}

/// Picks the focus entity: highest score, then most label tokens shared with
/// the question, then smallest IRI. Candidates without a score rank below
/// scored ones.
pub fn select_relevant(entities: &[LinkedEntity], question: &str) -> Result<LinkedEntity> {
    let q = token_set(question);
    let overlap = |e: &LinkedEntity| {
        e.label
            .as_deref()
            .map_or(0, |l| token_set(l).intersection(&q).count())
    };
    let better = |a: &LinkedEntity, b: &LinkedEntity| -> Ordering {
        let sa = a.score.unwrap_or(-1.0);
        let sb = b.score.unwrap_or(-1.0);
        sa.total_cmp(&sb)
            .then_with(|| overlap(a).cmp(&overlap(b)))
            .then_with(|| b.iri.cmp(&a.iri))
            .then_with(|| b.label.cmp(&a.label))
    };
    entities
        .iter()
        .max_by(|a, b| better(a, b))
        .cloned()
        .ok_or(Error::NoEntity)
}

/// `owl:sameAs` equivalence classes; each IRI maps to the smallest IRI of its
/// class. Empty unless an alias file is configured.
#[derive(Debug, Clone, Default)]
pub struct AliasMap {
    canonical: BTreeMap<Iri, Iri>,
}

impl AliasMap {
    pub fn from_ntriples(text: &str) -> Result<Self> {
        let mut parent: BTreeMap<Iri, Iri> = BTreeMap::new();
        fn find(parent: &mut BTreeMap<Iri, Iri>, x: &Iri) -> Iri {
            let mut root = x.clone();
            while let Some(p) = parent.get(&root).filter(|p| **p != root) {
                root = p.clone();
            }
            parent.insert(x.clone(), root.clone());
            root
        }
        for t in parse_ntriples(text)? {
            if t.predicate.as_str() != OWL_SAME_AS {
                continue;
            }
            let (Subject::Iri(a), Term::Iri(b)) = (t.subject, t.object) else {
                continue;
            };
            let (ra, rb) = (find(&mut parent, &a), find(&mut parent, &b));
            let (small, large) = if ra <= rb { (ra, rb) } else { (rb, ra) };
            parent.insert(large, small);
        }
        let keys: Vec<Iri> = parent.keys().cloned().collect();
        let canonical = keys
            .into_iter()
            .map(|k| {
                let root = find(&mut parent, &k);
                (k, root)
            })
            .filter(|(k, root)| k != root)
            .collect();
        Ok(AliasMap { canonical })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_ntriples(&std::fs::read_to_string(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn canonicalize(&self, term: &Term) -> Term {
        match term {
            Term::Iri(iri) => self
                .canonical
                .get(iri)
                .map_or_else(|| term.clone(), |c| Term::Iri(c.clone())),
            other => other.clone(),
        }
    }
}
