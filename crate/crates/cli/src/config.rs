//! JSON run configuration and construction of the pipeline from it.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use kgnav::heuristics::HeuristicsConfig;
use kgnav::linker::{AliasMap, EntityLinker, OfflineLinker, RemoteLinker};
use kgnav::pipeline::{GraphSource, PipelineDeps};
use kgnav::ranker::{EmbeddingProvider, HashEmbedder, RemoteEmbedder, SimilarityKind, HASH_DIMENSION};
use kgnav::rdf::{load_graph, KnowledgeGraph};
use kgnav::sparql::{EndpointConfig, SparqlClient};
use kgnav::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkerKind {
    #[default]
    Offline,
    Remote,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    #[default]
    Hash,
    Remote,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    #[default]
    On,
    Off,
}

fn default_timeout_ms() -> u64 {
    10_000
}

fn default_retries() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    /// Local N-Triples file. Exclusive with `sparql_endpoint`.
    pub kg_file: Option<PathBuf>,
    pub sparql_endpoint: Option<String>,
    #[serde(default)]
    pub linker: LinkerKind,
    pub linker_url: Option<String>,
    /// Defaults to `timeout_ms`.
    pub linker_timeout_ms: Option<u64>,
    #[serde(default)]
    pub embedder: EmbedderKind,
    pub embedder_url: Option<String>,
    pub embedder_dim: Option<usize>,
    #[serde(default)]
    pub similarity: SimilarityKind,
    #[serde(default)]
    pub heuristics: Switch,
    pub identifier_keywords: Option<Vec<String>>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Retries for SPARQL requests after transport failures.
    #[serde(default = "default_retries")]
    pub retries: u32,
    pub sameas_file: Option<PathBuf>,
}

impl AppConfig {
    /// Parses a config document; relative paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: AppConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        for path in [&mut cfg.kg_file, &mut cfg.sameas_file].into_iter().flatten() {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.kg_file, &self.sparql_endpoint) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("set only one of kg_file and sparql_endpoint".into()))
            }
            (None, None) => {
                return Err(Error::Config("one of kg_file or sparql_endpoint is required".into()))
            }
            _ => {}
        }
        if self.linker == LinkerKind::Remote && self.linker_url.is_none() {
            return Err(Error::Config("linker \"remote\" requires linker_url".into()));
        }
        if self.linker == LinkerKind::Offline && self.kg_file.is_none() {
            return Err(Error::Config("linker \"offline\" needs a local kg_file".into()));
        }
        if self.embedder == EmbedderKind::Remote && self.embedder_url.is_none() {
            return Err(Error::Config("embedder \"remote\" requires embedder_url".into()));
        }
        if self.embedder_dim == Some(0) {
            return Err(Error::Config("embedder_dim must be positive".into()));
        }
        if self.embedder == EmbedderKind::Hash
            && self.embedder_dim.is_some_and(|d| d != HASH_DIMENSION)
        {
            return Err(Error::Config(format!(
                "the hash embedder has dimension {HASH_DIMENSION}"
            )));
        }
        if self.timeout_ms == 0 || self.linker_timeout_ms == Some(0) {
            return Err(Error::Config("timeout_ms must be at least 1".into()));
        }
        Ok(())
    }

    pub fn heuristics_config(&self) -> Result<HeuristicsConfig> {
        let mut h = HeuristicsConfig::default();
        if let Some(kws) = &self.identifier_keywords {
            h = h.with_identifier_keywords(kws)?;
        }
        h.enabled = self.heuristics == Switch::On;
        Ok(h)
    }

    /// Builds every component. Must not be called from inside an async
    /// runtime, since the HTTP clients are blocking.
    pub fn build_deps(&self) -> Result<PipelineDeps> {
        self.validate()?;
        let graph: Option<Arc<KnowledgeGraph>> = match &self.kg_file {
            Some(path) => Some(Arc::new(load_graph(path).map_err(|e| {
                Error::Config(format!("cannot load {}: {e}", path.display()))
            })?)),
            None => None,
        };
        let source = match (&graph, &self.sparql_endpoint) {
            (Some(g), _) => GraphSource::Offline(g.clone()),
            (None, Some(url)) => GraphSource::Remote(SparqlClient::new(EndpointConfig::new(
                url.clone(),
                self.timeout_ms,
                self.retries,
            )?)?),
            (None, None) => unreachable!("validated"),
        };
        let linker: Arc<dyn EntityLinker> = match self.linker {
            LinkerKind::Offline => Arc::new(OfflineLinker::new(graph.clone().expect("validated"))),
            LinkerKind::Remote => Arc::new(RemoteLinker::new(
                self.linker_url.clone().expect("validated"),
                self.linker_timeout_ms.unwrap_or(self.timeout_ms),
            )?),
        };
        let provider: Arc<dyn EmbeddingProvider> = match self.embedder {
            EmbedderKind::Hash => Arc::new(HashEmbedder),
            EmbedderKind::Remote => Arc::new(RemoteEmbedder::new(
                self.embedder_url.clone().expect("validated"),
                self.embedder_dim.unwrap_or(HASH_DIMENSION),
                self.timeout_ms,
            )?),
        };
        let linker_kind = match self.linker {
            LinkerKind::Offline => "offline",
            LinkerKind::Remote => "remote",
        };
        let mut deps = PipelineDeps::new(linker, linker_kind, source, provider)
            .with_heuristics(self.heuristics_config()?)
            .with_similarity(self.similarity);
        if let Some(path) = &self.sameas_file {
            deps = deps.with_aliases(AliasMap::load(path).map_err(|e| {
                Error::Config(format!("cannot load {}: {e}", path.display()))
            })?);
        }
        Ok(deps)
    }
}
