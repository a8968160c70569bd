use std::collections::HashMap;

use serde::Serialize;

use super::term::{Iri, Subject, Term, Triple};

/// Immutable, indexed triple collection.
///
/// Duplicate triples are kept as they were read; [`KnowledgeGraph::one_hop`]
/// removes them.
#[derive(Debug, Default, Clone)]
pub struct KnowledgeGraph {
    triples: Vec<Triple>,
    by_subject: HashMap<Subject, Vec<usize>>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
    labels: HashMap<Iri, String>,
}

/// Which end of the triple the focus entity sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Entity is the subject; the neighbor is the object.
    Outgoing,
    /// Entity is the object; the neighbor is the subject.
    Incoming,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Outgoing => "outgoing",
            Direction::Incoming => "incoming",
        })
    }
}

/// A labelled one-hop relation of a focus entity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidatePair {
    pub direction: Direction,
    pub predicate: Iri,
    pub predicate_label: Option<String>,
    pub neighbor: Term,
    pub neighbor_label: Option<String>,
}

impl CandidatePair {
    /// N-Triples rendering of the neighbor, the secondary ordering key.
    pub fn neighbor_rendering(&self) -> String {
        self.neighbor.to_string()
    }

    fn sort_key(&self) -> (Direction, &str, String) {
        (
            self.direction,
            self.predicate.as_str(),
            self.neighbor_rendering(),
        )
    }
}

/// Drops `rdfs:label` edges, orders pairs (outgoing first, then predicate IRI,
/// then neighbor rendering) and merges duplicates of the same
/// (direction, predicate, neighbor). Merged pairs keep the smallest of the
/// labels seen, so the result does not depend on input order.
///
/// Shared by the in-memory and the SPARQL-backed extraction so both produce
/// identical lists.
pub fn normalize_pairs(mut pairs: Vec<CandidatePair>) -> Vec<CandidatePair> {
    pairs.retain(|p| !p.predicate.is_rdfs_label());
    pairs.sort_by_cached_key(|p| {
        let (d, pred, n) = p.sort_key();
        (d, pred.to_owned(), n)
    });
    pairs.dedup_by(|b, a| {
        let same =
            a.direction == b.direction && a.predicate == b.predicate && a.neighbor == b.neighbor;
        if same {
            merge_label(&mut a.predicate_label, b.predicate_label.take());
            merge_label(&mut a.neighbor_label, b.neighbor_label.take());
        }
        same
    });
    pairs
}

fn merge_label(kept: &mut Option<String>, other: Option<String>) {
    if let Some(other) = other {
        if kept.as_ref().is_none_or(|k| other < *k) {
            *kept = Some(other);
        }
    }
}

impl KnowledgeGraph {
    pub fn new(triples: Vec<Triple>) -> Self {
        index_triples(triples)
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn label(&self, iri: &Iri) -> Option<&str> {
        self.labels.get(iri).map(String::as_str)
    }

    pub fn labels(&self) -> impl Iterator<Item = (&Iri, &str)> {
        self.labels.iter().map(|(k, v)| (k, v.as_str()))
    }

    fn positions<'a>(&'a self, idx: Option<&'a Vec<usize>>) -> impl Iterator<Item = &'a Triple> {
        idx.into_iter().flatten().map(move |&i| &self.triples[i])
    }

    pub fn with_subject<'a>(&'a self, s: &'a Subject) -> impl Iterator<Item = &'a Triple> {
        self.positions(self.by_subject.get(s))
    }

    pub fn with_predicate<'a>(&'a self, p: &'a Iri) -> impl Iterator<Item = &'a Triple> {
        self.positions(self.by_predicate.get(p))
    }

    pub fn with_object<'a>(&'a self, o: &'a Term) -> impl Iterator<Item = &'a Triple> {
        self.positions(self.by_object.get(o))
    }

    fn term_label(&self, term: &Term) -> Option<String> {
        term.as_iri().and_then(|iri| self.label(iri)).map(str::to_owned)
    }

    /// One-hop relations of `entity` in both directions.
    pub fn one_hop(&self, entity: &Iri) -> Vec<CandidatePair> {
        let as_subject = Subject::Iri(entity.clone());
        let as_object = Term::Iri(entity.clone());

        let outgoing = self.with_subject(&as_subject).map(|t| CandidatePair {
            direction: Direction::Outgoing,
            predicate: t.predicate.clone(),
            predicate_label: self.label(&t.predicate).map(str::to_owned),
            neighbor: t.object.clone(),
            neighbor_label: self.term_label(&t.object),
        });
        let incoming = self.with_object(&as_object).map(|t| {
            let neighbor = Term::from(t.subject.clone());
            CandidatePair {
                direction: Direction::Incoming,
                predicate: t.predicate.clone(),
                predicate_label: self.label(&t.predicate).map(str::to_owned),
                neighbor_label: self.term_label(&neighbor),
                neighbor,
            }
        });
        normalize_pairs(outgoing.chain(incoming).collect())
    }
}

/// Builds the subject, predicate and object indexes plus the label index.
/// When an IRI has several `rdfs:label` literals the smallest lexical form
/// wins, independent of triple order.
pub fn index_triples(triples: Vec<Triple>) -> KnowledgeGraph {
    let mut graph = KnowledgeGraph::default();
    for (pos, t) in triples.iter().enumerate() {
        graph.by_subject.entry(t.subject.clone()).or_default().push(pos);
        graph.by_predicate.entry(t.predicate.clone()).or_default().push(pos);
        graph.by_object.entry(t.object.clone()).or_default().push(pos);
        if let (true, Subject::Iri(s), Term::Literal(lit)) =
            (t.predicate.is_rdfs_label(), &t.subject, &t.object)
        {
            let mut label = graph.labels.remove(s);
            merge_label(&mut label, Some(lit.lexical().to_owned()));
            graph.labels.insert(s.clone(), label.expect("just merged"));
        }
    }
    graph.triples = triples;
    graph
}
