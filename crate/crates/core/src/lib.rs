//! One-hop question answering over RDF knowledge graphs.
//!
//! A question is answered in five steps: link an entity, fetch its one-hop
//! relations (from an in-memory graph or a SPARQL endpoint), filter the
//! labelled candidate pairs with keyword heuristics, rank the survivors by
//! embedding similarity to the question, and expand the winning predicate
//! into an answer set. The [`eval`] module scores the pipeline against a
//! benchmark file.

pub mod error;
pub mod eval;
pub mod heuristics;
mod http;
pub mod linker;
pub mod pipeline;
pub mod ranker;
pub mod rdf;
pub mod sparql;

pub use error::{Error, Result};
