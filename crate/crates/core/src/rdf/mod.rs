//! RDF terms, an N-Triples reader/writer and the in-memory triple index
//! used for offline one-hop relation extraction.

mod graph;
mod ntriples;
mod term;

use std::path::Path;

pub use graph::{index_triples, normalize_pairs, CandidatePair, Direction, KnowledgeGraph};
pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use term::{BlankNode, Iri, Literal, Subject, Term, Triple, OWL_SAME_AS, RDFS_LABEL};

use crate::error::Result;

/// Reads and indexes an N-Triples file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<KnowledgeGraph> {
    let text = std::fs::read_to_string(path)?;
    Ok(index_triples(parse_ntriples(&text)?))
}
