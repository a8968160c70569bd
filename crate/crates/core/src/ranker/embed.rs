//! Embedding providers.
//!
//! [`HashEmbedder`] is a deterministic bag-of-words embedder built on FNV-1a
//! feature hashing. It has no semantic knowledge but makes the whole pipeline
//! reproducible bit for bit. [`RemoteEmbedder`] calls an embedding service
//! (for example one that returns the CLS vector of a BERT encoder) over HTTP.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use crate::error::{Error, Result};
use crate::http::HttpClient;

/// A dense vector whose entries are all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(pos) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::Format(format!("non-finite embedding entry at index {pos}")));
        }
        Ok(EmbeddingVector(entries))
    }

    pub fn zeros(dimension: usize) -> Self {
        EmbeddingVector(vec![0.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        EmbeddingVector::new(self.0.iter().map(|x| x * factor).collect())
    }
}

/// Maps text to a fixed-dimension vector.
///
/// Implementations must be deterministic for a given instance and input, and
/// must tolerate concurrent calls.
pub trait EmbeddingProvider: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn embed(&self, text: &str) -> Result<EmbeddingVector>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for std::sync::Arc<P> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        (**self).embed(text)
    }
}

pub const HASH_DIMENSION: usize = 256;
const FNV_OFFSET_BASIS: u64 = 14_695_981_039_346_656_037;
const FNV_PRIME: u64 = 1_099_511_628_211;

pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET_BASIS, |hash, &b| {
        (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

/// Token-count vector over 256 FNV-1a buckets, L2-normalized. Text without
/// tokens maps to the zero vector.
pub fn hash_embed(text: &str) -> EmbeddingVector {
    let mut counts = vec![0.0f64; HASH_DIMENSION];
    for token in tokenize(text) {
        let bucket = (fnv1a_64(token.as_bytes()) % HASH_DIMENSION as u64) as usize;
        counts[bucket] += 1.0;
    }
    let norm = counts.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        counts.iter_mut().for_each(|x| *x /= norm);
    }
    EmbeddingVector(counts)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HashEmbedder;

impl EmbeddingProvider for HashEmbedder {
    fn name(&self) -> &str {
        "hash-fnv1a-256"
    }

    fn dimension(&self) -> usize {
        HASH_DIMENSION
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        Ok(hash_embed(text))
    }
}

#[derive(Serialize)]
pub struct EmbedRequest<'a> {
    pub texts: Vec<&'a str>,
}

#[derive(Serialize, Deserialize)]
pub struct EmbedResponse {
    pub vectors: Vec<Vec<f64>>,
}

/// Client for an embedding service speaking
/// `POST {"texts":[...]}` → `{"vectors":[[...]]}`.
#[derive(Debug, Clone)]
pub struct RemoteEmbedder {
    url: String,
    dimension: usize,
    http: HttpClient,
}

impl RemoteEmbedder {
    pub fn new(url: impl Into<String>, dimension: usize, timeout_ms: u64) -> Result<Self> {
        let url = url.into();
        reqwest::Url::parse(&url)
            .map_err(|e| Error::Config(format!("invalid embedder URL {url:?}: {e}")))?;
        if dimension == 0 {
            return Err(Error::Config("embedder dimension must be positive".into()));
        }
        if timeout_ms == 0 {
            return Err(Error::Config("timeout must be at least 1 ms".into()));
        }
        let http = HttpClient::new(Duration::from_millis(timeout_ms), 0)?;
        Ok(RemoteEmbedder {
            url,
            dimension,
            http,
        })
    }
}

impl EmbeddingProvider for RemoteEmbedder {
    fn name(&self) -> &str {
        "remote"
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        if text.is_empty() {
            return Err(Error::Request("cannot embed empty text".into()));
        }
        let body = self.http.post_json(&self.url, &EmbedRequest { texts: vec![text] })?;
        let resp: EmbedResponse = serde_json::from_str(&body)
            .map_err(|e| Error::Format(format!("malformed embedding response: {e}")))?;
        let [vector]: [Vec<f64>; 1] = resp.vectors.try_into().map_err(|v: Vec<_>| {
            Error::Format(format!("expected exactly one vector, got {}", v.len()))
        })?;
        if vector.len() != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                actual: vector.len(),
            });
        }
        EmbeddingVector::new(vector)
    }
}

pub fn remote_embed(
    service_url: &str,
    text: &str,
    dimension: usize,
    timeout_ms: u64,
) -> Result<EmbeddingVector> {
    RemoteEmbedder::new(service_url, dimension, timeout_ms)?.embed(text)
}
