//! Plain-text output of the subcommands.

use std::fmt::Write as _;

use kgnav::linker::LinkedEntity;
use kgnav::pipeline::AnswerSet;
use kgnav::rdf::CandidatePair;

fn labelled(iri: &str, label: Option<&str>) -> String {
    match label {
        Some(l) => format!("{iri} ({l})"),
        None => iri.to_owned(),
    }
}

/// `entity:`, `predicate:` and `answers:` headers, one answer value per line,
/// then the scored candidates when `trace` is set.
pub fn answer(set: &AnswerSet, trace: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "entity: {}",
        labelled(set.entity.iri.as_str(), set.entity.label.as_deref())
    );
    let _ = writeln!(out, "predicate: {}", set.winning_predicate);
    let _ = writeln!(out, "answers:");
    for value in set.answer_values() {
        let _ = writeln!(out, "{value}");
    }
    if trace {
        let _ = writeln!(out, "ranked candidates:");
        for c in &set.ranked_trace {
            let _ = writeln!(
                out,
                "{:>9.6}  {:<8} <{}>  {}  | {}",
                c.score,
                c.pair.direction,
                c.pair.predicate,
                c.pair.neighbor_rendering(),
                c.text
            );
        }
    }
    out
}

/// One line per pair: direction, predicate and neighbor, with labels.
pub fn relations(pairs: &[CandidatePair]) -> String {
    let mut out = String::new();
    for p in pairs {
        let pred = labelled(&format!("<{}>", p.predicate), p.predicate_label.as_deref());
        let neighbor = labelled(&p.neighbor_rendering(), p.neighbor_label.as_deref());
        let _ = writeln!(out, "{}\t{pred}\t{neighbor}", p.direction);
    }
    out
}

/// Linker candidates in service order; the selected one is starred.
pub fn links(candidates: &[LinkedEntity], selected: Option<&LinkedEntity>) -> String {
    let mut out = String::new();
    for c in candidates {
        let mark = if selected.is_some_and(|s| s == c) { '*' } else { ' ' };
        let score = c.score.map_or_else(|| "-".to_owned(), |s| format!("{s:.4}"));
        let _ = writeln!(
            out,
            "{mark} {score:>6}  {}",
            labelled(c.iri.as_str(), c.label.as_deref())
        );
    }
    out
}
