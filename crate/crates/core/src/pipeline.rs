//! End-to-end question answering: link → extract → validate → rank → select.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heuristics::{filter_candidates, HeuristicsConfig};
use crate::linker::{select_relevant, AliasMap, EntityLinker, LinkedEntity};
use crate::ranker::{rank, select_winner, EmbeddingProvider, RankedCandidate, SimilarityKind};
use crate::rdf::{CandidatePair, Iri, KnowledgeGraph, Term};
use crate::sparql::SparqlClient;

/// Where one-hop relations come from.
#[derive(Debug, Clone)]
pub enum GraphSource {
    Offline(Arc<KnowledgeGraph>),
    Remote(SparqlClient),
}

impl GraphSource {
    pub fn one_hop(&self, entity: &Iri) -> Result<Vec<CandidatePair>> {
        match self {
            GraphSource::Offline(graph) => Ok(graph.one_hop(entity)),
            GraphSource::Remote(client) => client.one_hop(entity),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GraphSource::Offline(_) => "offline",
            GraphSource::Remote(_) => "remote",
        }
    }
}

#[derive(Clone)]
pub struct PipelineDeps {
    pub linker: Arc<dyn EntityLinker>,
    /// Free-form name of the linker, echoed in evaluation reports.
    pub linker_kind: String,
    pub graph_source: GraphSource,
    pub heuristics: HeuristicsConfig,
    pub provider: Arc<dyn EmbeddingProvider>,
    pub similarity: SimilarityKind,
    pub gold_entity_override: Option<Iri>,
    pub aliases: AliasMap,
}

impl PipelineDeps {
    pub fn new(
        linker: Arc<dyn EntityLinker>,
        linker_kind: impl Into<String>,
        graph_source: GraphSource,
        provider: Arc<dyn EmbeddingProvider>,
    ) -> Self {
        PipelineDeps {
            linker,
            linker_kind: linker_kind.into(),
            graph_source,
            heuristics: HeuristicsConfig::default(),
            provider,
            similarity: SimilarityKind::default(),
            gold_entity_override: None,
            aliases: AliasMap::default(),
        }
    }

    pub fn with_heuristics(mut self, heuristics: HeuristicsConfig) -> Self {
        self.heuristics = heuristics;
        self
    }

    pub fn with_similarity(mut self, similarity: SimilarityKind) -> Self {
        self.similarity = similarity;
        self
    }

    pub fn with_gold_entity(mut self, entity: Option<Iri>) -> Self {
        self.gold_entity_override = entity;
        self
    }

    pub fn with_aliases(mut self, aliases: AliasMap) -> Self {
        self.aliases = aliases;
        self
    }

    /// Step 1: the focus entity, taken from the override when set (no
    /// linking call is made in that case).
    pub fn resolve_entity(&self, question: &str) -> Result<LinkedEntity> {
        if let Some(iri) = &self.gold_entity_override {
            return Ok(LinkedEntity::bare(iri.clone()));
        }
        let entities = self.linker.link(question)?;
        select_relevant(&entities, question)
    }

    /// Steps 2 to 5 for an already chosen entity.
    pub fn answer_for_entity(&self, question: &str, entity: LinkedEntity) -> Result<AnswerSet> {
        let pairs = self.graph_source.one_hop(&entity.iri)?;
        let valid = filter_candidates(&pairs, question, &self.heuristics);
        let ranked = rank(self.provider.as_ref(), self.similarity, question, &valid)?;
        let (winner, expanded) = match select_winner(&ranked) {
            Ok(selection) => selection,
            Err(_) => return Err(Error::EmptyCandidates(entity.iri.to_string())),
        };
        let mut answers = assemble_answers(&expanded);
        if !self.aliases.is_empty() {
            let canonical = answers.iter().map(|t| self.aliases.canonicalize(t)).collect::<Vec<_>>();
            answers = dedup_in_order(canonical);
        }
        Ok(AnswerSet {
            question: question.to_owned(),
            entity,
            winning_predicate: winner.pair.predicate,
            answers,
            ranked_trace: ranked,
        })
    }

    pub fn answer(&self, question: &str) -> Result<AnswerSet> {
        answer(question, self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnswerSet {
    pub question: String,
    pub entity: LinkedEntity,
    pub winning_predicate: Iri,
    pub answers: Vec<Term>,
    /// Every scored candidate in ranked order.
    pub ranked_trace: Vec<RankedCandidate>,
}

impl AnswerSet {
    /// Answer values as compared during evaluation: IRI strings and literal
    /// lexical forms.
    pub fn answer_values(&self) -> Vec<String> {
        self.answers.iter().map(Term::value).collect()
    }
}

/// Compact JSON view: `{"entity","predicate","answers"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnswerSummary {
    pub entity: String,
    pub predicate: String,
    pub answers: Vec<String>,
}

impl From<&AnswerSet> for AnswerSummary {
    fn from(a: &AnswerSet) -> Self {
        AnswerSummary {
            entity: a.entity.iri.to_string(),
            predicate: a.winning_predicate.to_string(),
            answers: a.answer_values(),
        }
    }
}

fn dedup_in_order(terms: Vec<Term>) -> Vec<Term> {
    let mut seen = std::collections::HashSet::new();
    terms.into_iter().filter(|t| seen.insert(t.clone())).collect()
}

/// Neighbors of the expanded candidates, deduplicated in first-occurrence
/// order.
pub fn assemble_answers(expanded: &[RankedCandidate]) -> Vec<Term> {
    dedup_in_order(expanded.iter().map(|c| c.pair.neighbor.clone()).collect())
}

pub fn answer(question: &str, deps: &PipelineDeps) -> Result<AnswerSet> {
    if question.trim().is_empty() {
        return Err(Error::Request("question must not be empty".into()));
    }
    let entity = deps.resolve_entity(question)?;
    deps.answer_for_entity(question, entity)
}
