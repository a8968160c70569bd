//! Relation selection: score each candidate pair against the question with
//! an embedding provider and pick the winner.

mod embed;
mod similarity;
mod tokenize;

use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use embed::{
    fnv1a_64, hash_embed, remote_embed, EmbedRequest, EmbedResponse, EmbeddingProvider,
    EmbeddingVector, HashEmbedder, RemoteEmbedder, HASH_DIMENSION,
};
pub use similarity::{cosine, dot};
pub use tokenize::tokenize;

use crate::error::{Error, Result};
use crate::rdf::{CandidatePair, Direction, Term};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    #[default]
    Cosine,
    Dot,
}

impl SimilarityKind {
    pub fn score(self, u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
        match self {
            SimilarityKind::Cosine => cosine(u, v),
            SimilarityKind::Dot => dot(u, v),
        }
    }
}

impl FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(SimilarityKind::Cosine),
            "dot" => Ok(SimilarityKind::Dot),
            other => Err(Error::Config(format!("unknown similarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub pair: CandidatePair,
    pub text: String,
    pub score: f64,
}

/// The text scored for a pair: predicate label (or IRI local name) followed
/// by the neighbor label, literal lexical form or IRI local name. Incoming
/// pairs are prefixed with "of".
pub fn textualize(pair: &CandidatePair) -> String {
    let predicate = pair
        .predicate_label
        .as_deref()
        .unwrap_or_else(|| pair.predicate.local_name());
    let neighbor = match (&pair.neighbor_label, &pair.neighbor) {
        (Some(label), _) => label.as_str(),
        (None, Term::Literal(lit)) => lit.lexical(),
        (None, Term::Iri(iri)) => iri.local_name(),
        (None, Term::BlankNode(b)) => b.label(),
    };
    match pair.direction {
        Direction::Outgoing => format!("{predicate} {neighbor}"),
        Direction::Incoming => format!("of {predicate} {neighbor}"),
    }
}

/// Significant decimal digits kept when ordering by score.
const SCORE_DIGITS: i32 = 10;

/// `score` rounded to [`SCORE_DIGITS`] significant digits. Candidates whose
/// scores differ only by floating-point noise then fall through to the
/// tie-break keys.
pub fn score_key(score: f64) -> f64 {
    if score == 0.0 || !score.is_finite() {
        return score;
    }
    let exponent = SCORE_DIGITS - 1 - score.abs().log10().floor() as i32;
    let scale = 10f64.powi(exponent);
    (score * scale).round() / scale
}

fn rank_order(a: &RankedCandidate, b: &RankedCandidate) -> Ordering {
    score_key(b.score)
        .total_cmp(&score_key(a.score))
        .then_with(|| a.pair.predicate.cmp(&b.pair.predicate))
        .then_with(|| a.pair.neighbor_rendering().cmp(&b.pair.neighbor_rendering()))
        .then_with(|| a.pair.direction.cmp(&b.pair.direction))
        .then_with(|| a.text.cmp(&b.text))
}

/// Scores every pair against the question and sorts by score (descending,
/// compared via [`score_key`]), then predicate IRI, then neighbor rendering.
pub fn rank(
    provider: &dyn EmbeddingProvider,
    kind: SimilarityKind,
    question: &str,
    pairs: &[CandidatePair],
) -> Result<Vec<RankedCandidate>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let q = provider.embed(question)?;
    let mut ranked = pairs
        .iter()
        .map(|pair| {
            let text = textualize(pair);
            let score = kind.score(&q, &provider.embed(&text)?)?;
            Ok(RankedCandidate {
                pair: pair.clone(),
                text,
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(rank_order);
    Ok(ranked)
}

/// The top candidate plus every candidate sharing its predicate, in ranked
/// order (the winner included).
pub fn select_winner(
    ranked: &[RankedCandidate],
) -> Result<(RankedCandidate, Vec<RankedCandidate>)> {
    let winner = ranked
        .first()
        .ok_or_else(|| Error::EmptyCandidates("no ranked candidates".into()))?;
    let expanded = ranked
        .iter()
        .filter(|c| c.pair.predicate == winner.pair.predicate)
        .cloned()
        .collect();
    Ok((winner.clone(), expanded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Iri, Literal};

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn pair(dir: Direction, pred: &str, plabel: Option<&str>, n: Term, nlabel: Option<&str>) -> CandidatePair {
        CandidatePair {
            direction: dir,
            predicate: iri(pred),
            predicate_label: plabel.map(str::to_owned),
            neighbor: n,
            neighbor_label: nlabel.map(str::to_owned),
        }
    }

    fn ranked(pred: &str, n: &str, score: f64) -> RankedCandidate {
        RankedCandidate {
            pair: pair(Direction::Outgoing, pred, None, Term::Iri(iri(n)), None),
            text: String::new(),
            score,
        }
    }

    #[test]
    fn textualize_rules() {
        let p = pair(
            Direction::Outgoing,
            "https://dblp.org/rdf/schema#primaryAffiliation",
            Some("primary affiliation"),
            Term::Literal(Literal::simple("ignored")),
            Some("University X"),
        );
        assert_eq!(textualize(&p), "primary affiliation University X");

        let p = pair(
            Direction::Incoming,
            "https://dblp.org/rdf/schema#authoredBy",
            Some("authored by"),
            Term::Iri(iri("http://example.org/kg/paperA")),
            Some("Neural Parsing at Scale"),
        );
        assert_eq!(textualize(&p), "of authored by Neural Parsing at Scale");

        let p = pair(
            Direction::Outgoing,
            "http://e/ns#orcid",
            None,
            Term::Literal(Literal::simple("0000-0001")),
            None,
        );
        assert_eq!(textualize(&p), "orcid 0000-0001");

        let p = pair(Direction::Outgoing, "http://e/ns#p", None, Term::Iri(iri("http://e/x/Thing")), None);
        assert_eq!(textualize(&p), "p Thing");
    }

    #[test]
    fn score_key_absorbs_rounding_noise() {
        let x = 0.1 + 0.2;
        assert_eq!(score_key(x), score_key(0.3));
        assert_ne!(score_key(0.3), score_key(0.3 + 1e-8));
        assert_eq!(score_key(49.0 * 0.3), score_key(14.7));
        assert_eq!(score_key(-0.25), -0.25);
        assert_eq!(score_key(0.0), 0.0);
    }

    #[test]
    fn rank_of_nothing_is_empty() {
        assert!(rank(&HashEmbedder, SimilarityKind::Cosine, "q", &[]).unwrap().is_empty());
    }

    #[test]
    fn identical_texts_fall_back_to_tie_break_keys() {
        let mk = |pred: &str, n: &str| {
            pair(Direction::Outgoing, pred, Some("same"), Term::Iri(iri(n)), Some("text"))
        };
        let pairs = vec![mk("http://e/q", "http://e/a"), mk("http://e/p", "http://e/b"), mk("http://e/p", "http://e/a")];
        let out = rank(&HashEmbedder, SimilarityKind::Cosine, "same text", &pairs).unwrap();
        let order: Vec<_> = out.iter().map(|c| (c.pair.predicate.as_str(), c.pair.neighbor.value())).collect();
        assert_eq!(
            order,
            [("http://e/p", "http://e/a".to_owned()), ("http://e/p", "http://e/b".to_owned()), ("http://e/q", "http://e/a".to_owned())]
        );
        assert!(out.windows(2).all(|w| w[0].score == w[1].score));
    }

    #[test]
    fn winner_and_same_predicate_expansion() {
        let list = vec![
            ranked("http://e/P", "http://e/x", 0.9),
            ranked("http://e/Q", "http://e/z", 0.5),
            ranked("http://e/P", "http://e/y", 0.2),
        ];
        let (winner, expanded) = select_winner(&list).unwrap();
        assert_eq!(winner, list[0]);
        assert_eq!(expanded, vec![list[0].clone(), list[2].clone()]);
    }

    #[test]
    fn single_candidate_wins_alone() {
        let list = vec![ranked("http://e/P", "http://e/x", 0.1)];
        let (winner, expanded) = select_winner(&list).unwrap();
        assert_eq!(winner, list[0]);
        assert_eq!(expanded, list);
    }

    #[test]
    fn tied_scores_prefer_smaller_predicate() {
        let mut list = vec![
            ranked("http://e/Q", "http://e/x", 0.5),
            ranked("http://e/P", "http://e/x", 0.5),
        ];
        list.sort_by(rank_order);
        let (winner, _) = select_winner(&list).unwrap();
        assert_eq!(winner.pair.predicate.as_str(), "http://e/P");
    }

    #[test]
    fn empty_ranking_has_no_winner() {
        assert!(matches!(select_winner(&[]), Err(Error::EmptyCandidates(_))));
    }

    #[test]
    fn similarity_kind_parsing() {
        assert_eq!("cosine".parse::<SimilarityKind>().unwrap(), SimilarityKind::Cosine);
        assert_eq!("dot".parse::<SimilarityKind>().unwrap(), SimilarityKind::Dot);
        assert!("manhattan".parse::<SimilarityKind>().is_err());
    }
}
