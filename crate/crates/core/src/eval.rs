//! Benchmark evaluation: per-question precision/recall/F1 for question
//! answering and entity linking, macro averages, and an error taxonomy that
//! separates linking failures from answer-selection failures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::PipelineDeps;
use crate::rdf::Iri;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionRecord {
    pub id: String,
    pub question: String,
    pub paraphrase: Option<String>,
    pub gold_entities: Option<Vec<Iri>>,
    pub gold_answers: BTreeSet<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    questions: Vec<RawRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    question: String,
    paraphrase: Option<String>,
    entities: Option<Vec<String>>,
    answers: Vec<String>,
}

pub fn parse_dataset(text: &str) -> Result<Vec<QuestionRecord>> {
    let file: DatasetFile = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("malformed dataset: {e}")))?;
    let mut seen = BTreeSet::new();
    let mut records = Vec::with_capacity(file.questions.len());
    for raw in file.questions {
        if !seen.insert(raw.id.clone()) {
            return Err(Error::DuplicateId(raw.id));
        }
        if raw.question.trim().is_empty() {
            return Err(Error::Format(format!("question {:?} has empty text", raw.id)));
        }
        let gold_entities = match raw.entities {
            Some(list) if !list.is_empty() => {
                let mut iris: Vec<Iri> = Vec::with_capacity(list.len());
                for s in list {
                    let iri = Iri::new(s).map_err(|e| Error::Format(e.to_string()))?;
                    if !iris.contains(&iri) {
                        iris.push(iri);
                    }
                }
                Some(iris)
            }
            _ => None,
        };
        records.push(QuestionRecord {
            id: raw.id,
            question: raw.question,
            paraphrase: raw.paraphrase,
            gold_entities,
            gold_answers: raw.answers.into_iter().collect(),
        });
    }
    Ok(records)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<QuestionRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read dataset {}: {e}", path.display())))?;
    parse_dataset(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

/// Set-based precision, recall and F1. Two empty sets score (1, 1, 1); an
/// empty side against a non-empty one scores 0 for the affected ratio.
pub fn set_f1(predicted: &BTreeSet<String>, gold: &BTreeSet<String>) -> Prf {
    if predicted.is_empty() && gold.is_empty() {
        return Prf::new(1.0, 1.0);
    }
    let hits = predicted.intersection(gold).count() as f64;
    let ratio = |n: usize| if n == 0 { 0.0 } else { hits / n as f64 };
    Prf::new(ratio(predicted.len()), ratio(gold.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ErrorClass {
    Correct,
    WrongEntityRightAnswer,
    RightEntityWrongAnswer,
    BothWrong,
}

impl ErrorClass {
    pub const ALL: [ErrorClass; 4] = [
        ErrorClass::Correct,
        ErrorClass::WrongEntityRightAnswer,
        ErrorClass::RightEntityWrongAnswer,
        ErrorClass::BothWrong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Correct => "Correct",
            ErrorClass::WrongEntityRightAnswer => "WrongEntityRightAnswer",
            ErrorClass::RightEntityWrongAnswer => "RightEntityWrongAnswer",
            ErrorClass::BothWrong => "BothWrong",
        }
    }
}

pub fn classify_error(el_correct: bool, qa_f1: f64) -> ErrorClass {
    match (el_correct, qa_f1 >= 1.0) {
        (true, true) => ErrorClass::Correct,
        (true, false) => ErrorClass::RightEntityWrongAnswer,
        (false, true) => ErrorClass::WrongEntityRightAnswer,
        (false, false) => ErrorClass::BothWrong,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionResult {
    pub entity: Option<String>,
    pub answers: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub qa: Prf,
    /// Absent when the record has no gold entities.
    pub el: Option<Prf>,
    pub el_correct: bool,
    pub class: ErrorClass,
}

/// Settings that shaped a run, echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub linker: String,
    pub graph_source: String,
    pub heuristics: bool,
    pub identifier_keywords: Vec<String>,
    pub embedder: String,
    pub embedder_dimension: usize,
    pub similarity: String,
    pub gold_entities: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub question_count: usize,
    pub macro_f1_qa: f64,
    pub macro_f1_el: f64,
    pub class_counts: BTreeMap<ErrorClass, usize>,
    pub per_question: BTreeMap<String, QuestionResult>,
    pub config: ConfigEcho,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Outcome of one record, before aggregation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: String,
    pub predicted_entity: Option<Iri>,
    pub predicted_answers: Vec<String>,
    pub error: Option<String>,
}

/// Scores one record's outcome against its gold data.
pub fn score_outcome(record: &QuestionRecord, outcome: &Outcome) -> QuestionResult {
    let predicted: BTreeSet<String> = outcome.predicted_answers.iter().cloned().collect();
    let qa = set_f1(&predicted, &record.gold_answers);
    let (el, el_correct) = match &record.gold_entities {
        Some(gold) => {
            let gold_set: BTreeSet<String> = gold.iter().map(|i| i.to_string()).collect();
            let pred_set: BTreeSet<String> =
                outcome.predicted_entity.iter().map(|i| i.to_string()).collect();
            let correct = outcome
                .predicted_entity
                .as_ref()
                .is_some_and(|e| gold.contains(e));
            (Some(set_f1(&pred_set, &gold_set)), correct)
        }
        None => (None, outcome.predicted_entity.is_some()),
    };
    QuestionResult {
        entity: outcome.predicted_entity.as_ref().map(|i| i.to_string()),
        answers: outcome.predicted_answers.clone(),
        error: outcome.error.clone(),
        qa,
        el,
        el_correct,
        class: classify_error(el_correct, qa.f1),
    }
}

/// Aggregates scored records. `records` and `outcomes` are matched by id.
pub fn build_report(
    records: &[QuestionRecord],
    outcomes: &[Outcome],
    config: ConfigEcho,
) -> EvalReport {
    let by_id: BTreeMap<&str, &Outcome> = outcomes.iter().map(|o| (o.id.as_str(), o)).collect();
    let mut per_question = BTreeMap::new();
    let mut class_counts: BTreeMap<ErrorClass, usize> =
        ErrorClass::ALL.iter().map(|c| (*c, 0)).collect();
    let mut qa_f1 = Vec::with_capacity(records.len());
    let mut el_f1 = Vec::new();
    for record in records {
        let missing = Outcome {
            id: record.id.clone(),
            predicted_entity: None,
            predicted_answers: Vec::new(),
            error: Some("MissingOutcome".into()),
        };
        let outcome = by_id.get(record.id.as_str()).copied().unwrap_or(&missing);
        let result = score_outcome(record, outcome);
        qa_f1.push(result.qa.f1);
        if let Some(el) = result.el {
            el_f1.push(el.f1);
        }
        *class_counts.entry(result.class).or_default() += 1;
        per_question.insert(record.id.clone(), result);
    }
    EvalReport {
        question_count: records.len(),
        macro_f1_qa: mean(&qa_f1),
        macro_f1_el: mean(&el_f1),
        class_counts,
        per_question,
        config,
    }
}

pub fn config_echo(deps: &PipelineDeps, gold_entities: bool) -> ConfigEcho {
    ConfigEcho {
        linker: deps.linker_kind.clone(),
        graph_source: deps.graph_source.kind().to_owned(),
        heuristics: deps.heuristics.enabled,
        identifier_keywords: deps.heuristics.identifier_keywords().to_vec(),
        embedder: deps.provider.name().to_owned(),
        embedder_dimension: deps.provider.dimension(),
        similarity: serde_json::to_value(deps.similarity)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        gold_entities,
    }
}

/// Runs the pipeline on one record. With `gold_entities` set the record's
/// first gold entity replaces the linker.
pub fn run_record(record: &QuestionRecord, deps: &PipelineDeps, gold_entities: bool) -> Outcome {
    let mut outcome = Outcome {
        id: record.id.clone(),
        predicted_entity: None,
        predicted_answers: Vec::new(),
        error: None,
    };
    let override_iri = if gold_entities {
        record.gold_entities.as_ref().and_then(|g| g.first().cloned())
    } else {
        None
    };
    let deps = deps.clone().with_gold_entity(override_iri);
    let entity = match deps.resolve_entity(&record.question) {
        Ok(entity) => entity,
        Err(e) => {
            outcome.error = Some(e.name().to_owned());
            return outcome;
        }
    };
    outcome.predicted_entity = Some(entity.iri.clone());
    match deps.answer_for_entity(&record.question, entity) {
        Ok(set) => outcome.predicted_answers = set.answer_values(),
        Err(e) => outcome.error = Some(e.name().to_owned()),
    }
    outcome
}

/// Evaluates every record; pipeline failures count as empty predictions.
pub fn evaluate(dataset: &[QuestionRecord], deps: &PipelineDeps, gold_entities: bool) -> EvalReport {
    let outcomes: Vec<Outcome> = dataset
        .iter()
        .map(|r| run_record(r, deps, gold_entities))
        .collect();
    build_report(dataset, &outcomes, config_echo(deps, gold_entities))
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned-column summary for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let id_width = self
            .per_question
            .keys()
            .map(String::len)
            .chain(Some(2))
            .max()
            .unwrap_or(2);
        let _ = writeln!(
            out,
            "{:<id_width$}  {:>6}  {:>6}  {:>6}  {:>6}  {:<22}  {}",
            "id", "P", "R", "F1", "EL-F1", "class", "entity"
        );
        for (id, r) in &self.per_question {
            let el = r.el.map_or_else(|| "-".to_owned(), |p| format!("{:.4}", p.f1));
            let _ = writeln!(
                out,
                "{:<id_width$}  {:>6.4}  {:>6.4}  {:>6.4}  {:>6}  {:<22}  {}",
                id,
                r.qa.precision,
                r.qa.recall,
                r.qa.f1,
                el,
                r.class.name(),
                r.entity.as_deref().unwrap_or("-"),
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "questions: {}", self.question_count);
        let _ = writeln!(out, "macro F1 (QA): {:.4}", self.macro_f1_qa);
        let _ = writeln!(out, "macro F1 (EL): {:.4}", self.macro_f1_el);
        for (class, n) in &self.class_counts {
            let _ = writeln!(out, "{:<22}  {n}", class.name());
        }
        out
    }
}
