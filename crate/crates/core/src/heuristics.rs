//! Keyword heuristics that prune candidate pairs before ranking.
//!
//! Two rules run in sequence:
//!
//! * **Identifier rule** (per pair). Let `K` be the identifier keywords
//!   (`orcid`, `wikidata`, `bibtex`, `doi` by default) that occur in the
//!   lowercased question. If `K` is non-empty only pairs whose predicate
//!   mentions one of them survive; otherwise every identifier pair is dropped.
//! * **Keyword overlap** (per set). Survivors whose predicate label (or IRI
//!   local name) shares a non-stopword token with the question are kept. If
//!   none overlaps, all survivors of the identifier rule are kept.
//!
//! Built-in stopwords: a, about, all, an, and, any, are, as, at, be, been, by,
//! did, do, does, for, from, give, had, has, have, her, his, how, in, into,
//! is, it, its, list, me, of, on, or, show, that, the, their, there, these,
//! this, those, to, was, were, what, when, where, which, who, whom, whose,
//! with.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ranker::tokenize;
use crate::rdf::CandidatePair;

pub const DEFAULT_IDENTIFIER_KEYWORDS: [&str; 4] = ["orcid", "wikidata", "bibtex", "doi"];

pub const STOPWORDS: [&str; 53] = [
    "a", "about", "all", "an", "and", "any", "are", "as", "at", "be", "been", "by", "did", "do",
    "does", "for", "from", "give", "had", "has", "have", "her", "his", "how", "in", "into", "is",
    "it", "its", "list", "me", "of", "on", "or", "show", "that", "the", "their", "there", "these",
    "this", "those", "to", "was", "were", "what", "when", "where", "which", "who", "whom",
    "whose", "with",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeuristicsConfig {
    pub enabled: bool,
    identifier_keywords: Vec<String>,
    #[serde(skip)]
    stopwords: BTreeSet<String>,
}

impl Default for HeuristicsConfig {
    fn default() -> Self {
        HeuristicsConfig {
            enabled: true,
            identifier_keywords: DEFAULT_IDENTIFIER_KEYWORDS.map(str::to_owned).to_vec(),
            stopwords: STOPWORDS.map(str::to_owned).into_iter().collect(),
        }
    }
}

impl HeuristicsConfig {
    pub fn disabled() -> Self {
        HeuristicsConfig {
            enabled: false,
            ..Self::default()
        }
    }

    /// Replaces the identifier keyword list. Keywords must be non-empty and
    /// lowercase; duplicates are dropped keeping the first occurrence.
    pub fn with_identifier_keywords<I, S>(mut self, keywords: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list: Vec<String> = Vec::new();
        for k in keywords {
            let k = k.into();
            if k.is_empty() || k != k.to_lowercase() {
                return Err(Error::Config(format!(
                    "identifier keyword {k:?} must be non-empty and lowercase"
                )));
            }
            if !list.contains(&k) {
                list.push(k);
            }
        }
        self.identifier_keywords = list;
        Ok(self)
    }

    pub fn identifier_keywords(&self) -> &[String] {
        &self.identifier_keywords
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

/// True when `keyword` occurs in the lowercased predicate IRI or label.
pub fn is_identifier_pair(pair: &CandidatePair, keyword: &str) -> bool {
    pair.predicate.as_str().to_lowercase().contains(keyword)
        || pair
            .predicate_label
            .as_deref()
            .is_some_and(|l| l.to_lowercase().contains(keyword))
}

fn keywords_in<'a>(question: &str, cfg: &'a HeuristicsConfig) -> Vec<&'a str> {
    let q = question.to_lowercase();
    cfg.identifier_keywords
        .iter()
        .map(String::as_str)
        .filter(|k| q.contains(k))
        .collect()
}

/// The identifier rule for a single pair.
pub fn validate_pair(pair: &CandidatePair, question: &str, cfg: &HeuristicsConfig) -> bool {
    let asked = keywords_in(question, cfg);
    if asked.is_empty() {
        !cfg.identifier_keywords
            .iter()
            .any(|k| is_identifier_pair(pair, k))
    } else {
        asked.iter().any(|k| is_identifier_pair(pair, k))
    }
}

fn predicate_tokens(pair: &CandidatePair) -> Vec<String> {
    tokenize(
        pair.predicate_label
            .as_deref()
            .unwrap_or_else(|| pair.predicate.local_name()),
    )
}

/// Applies both rules; a no-op when `cfg.enabled` is false. Input order is
/// preserved.
pub fn filter_candidates(
    pairs: &[CandidatePair],
    question: &str,
    cfg: &HeuristicsConfig,
) -> Vec<CandidatePair> {
    if !cfg.enabled {
        return pairs.to_vec();
    }
    let survivors: Vec<&CandidatePair> = pairs
        .iter()
        .filter(|p| validate_pair(p, question, cfg))
        .collect();

    let question_tokens: BTreeSet<String> = tokenize(question)
        .into_iter()
        .filter(|t| !cfg.is_stopword(t))
        .collect();
    let overlapping: Vec<&CandidatePair> = survivors
        .iter()
        .copied()
        .filter(|p| predicate_tokens(p).iter().any(|t| question_tokens.contains(t)))
        .collect();

    let kept = if overlapping.is_empty() {
        survivors
    } else {
        overlapping
    };
    kept.into_iter().cloned().collect()
}
