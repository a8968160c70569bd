//! Test assets for kgnav: a small scholarly knowledge graph, a 20-question
//! benchmark over it, and HTTP stubs for the three remote services.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use kgnav::eval::{load_dataset, QuestionRecord};
use kgnav::rdf::{load_graph, KnowledgeGraph};

pub mod stubs;

pub use stubs::{build_stub_embedder, build_stub_linker, build_stub_sparql, StubServer};

/// Namespace of the fixture's people, papers, venues and organisations.
pub const EX: &str = "http://example.org/kg/";
/// Namespace of the fixture's predicates.
pub const SCHEMA: &str = "https://dblp.org/rdf/schema#";

/// Directory holding `kg.nt`, `dataset.json` and friends.
pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

#[derive(Debug, Clone, Deserialize)]
pub struct Counts {
    pub triples: usize,
    pub questions: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FixtureManifest {
    pub kg_path: PathBuf,
    pub dataset_path: PathBuf,
    pub expected_report_path: PathBuf,
    /// Pipeline config (JSON) that evaluates the fixture offline.
    pub config_path: PathBuf,
    pub counts: Counts,
    /// Ids of the questions answered correctly only with heuristics on.
    pub heuristic_sensitive: Vec<String>,
}

impl FixtureManifest {
    /// Reads `manifest.json`, resolving every path against the data directory.
    pub fn load() -> kgnav::Result<Self> {
        let dir = data_dir();
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        let mut m: FixtureManifest = serde_json::from_str(&text)
            .map_err(|e| kgnav::Error::Format(format!("malformed manifest: {e}")))?;
        for p in [
            &mut m.kg_path,
            &mut m.dataset_path,
            &mut m.expected_report_path,
            &mut m.config_path,
        ] {
            *p = dir.join(&*p);
        }
        Ok(m)
    }
}

fn manifest() -> FixtureManifest {
    FixtureManifest::load().expect("fixture manifest")
}

pub fn kg_path() -> PathBuf {
    manifest().kg_path
}

pub fn dataset_path() -> PathBuf {
    manifest().dataset_path
}

pub fn config_path() -> PathBuf {
    manifest().config_path
}

pub fn expected_report_path() -> PathBuf {
    manifest().expected_report_path
}

/// The fixture graph. Panics if the shipped file does not parse.
pub fn graph() -> Arc<KnowledgeGraph> {
    Arc::new(load_graph(kg_path()).expect("fixture graph"))
}

pub fn dataset() -> Vec<QuestionRecord> {
    load_dataset(dataset_path()).expect("fixture dataset")
}

/// `EX` + `local`.
pub fn ex(local: &str) -> String {
    format!("{EX}{local}")
}

/// `SCHEMA` + `local`.
pub fn schema(local: &str) -> String {
    format!("{SCHEMA}{local}")
}
