//! In-process HTTP stubs for the SPARQL endpoint, the linking API and the
//! embedding API, each backed by fixture data.

use std::io;
use std::net::{SocketAddr, TcpListener};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::body::Bytes;
use axum::extract::rejection::FormRejection;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Form, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::oneshot;

use kgnav::linker::link_offline;
use kgnav::ranker::EmbeddingProvider;
use kgnav::rdf::{Direction, KnowledgeGraph, Subject, Term};
use kgnav::sparql::{match_one_hop_query, write_results_json, ResultTable, RESULTS_JSON};

pub const SPARQL_PATH: &str = "/sparql";
pub const LINK_PATH: &str = "/link";
pub const EMBED_PATH: &str = "/embed";

/// A server running on its own Tokio runtime thread. Dropping it shuts the
/// server down.
pub struct StubServer {
    addr: SocketAddr,
    path: &'static str,
    hits: Arc<AtomicUsize>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Serves `router` on 127.0.0.1:`port` (0 picks a free port).
    pub fn spawn(router: Router, port: u16, path: &'static str, hits: Arc<AtomicUsize>) -> io::Result<Self> {
        let listener = TcpListener::bind(("127.0.0.1", port))?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let (tx, rx) = oneshot::channel::<()>();
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()?;
        let thread = std::thread::spawn(move || {
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
                axum::serve(listener, router)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
                    .expect("stub server");
            });
        });
        Ok(StubServer {
            addr,
            path,
            hits,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Full URL of the stubbed endpoint.
    pub fn url(&self) -> String {
        format!("http://{}{}", self.addr, self.path)
    }

    /// Number of requests the endpoint has received.
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

fn bad_request(msg: impl Into<String>) -> Response {
    (StatusCode::BAD_REQUEST, msg.into()).into_response()
}

#[derive(Clone)]
struct SparqlState {
    graph: Arc<KnowledgeGraph>,
    hits: Arc<AtomicUsize>,
}

#[derive(Deserialize)]
struct QueryForm {
    query: String,
}

/// Rows for the two one-hop templates. `rdfs:label` edges of the entity
/// itself are not returned as relation rows.
pub fn one_hop_rows(graph: &KnowledgeGraph, direction: Direction, entity: &kgnav::rdf::Iri) -> ResultTable {
    let label = |t: &Term| {
        t.as_iri()
            .and_then(|i| graph.label(i))
            .map(|l| Term::Literal(kgnav::rdf::Literal::simple(l)))
    };
    let mut table = ResultTable::default();
    match direction {
        Direction::Outgoing => {
            table.vars = ["p", "o", "pl", "ol"].map(String::from).to_vec();
            let s = Subject::Iri(entity.clone());
            for t in graph.with_subject(&s).filter(|t| !t.predicate.is_rdfs_label()) {
                let p = Term::Iri(t.predicate.clone());
                let mut row = std::collections::BTreeMap::new();
                if let Some(l) = label(&p) {
                    row.insert("pl".into(), l);
                }
                if let Some(l) = label(&t.object) {
                    row.insert("ol".into(), l);
                }
                row.insert("p".into(), p);
                row.insert("o".into(), t.object.clone());
                table.rows.push(row);
            }
        }
        Direction::Incoming => {
            table.vars = ["s", "p", "sl", "pl"].map(String::from).to_vec();
            let o = Term::Iri(entity.clone());
            for t in graph.with_object(&o).filter(|t| !t.predicate.is_rdfs_label()) {
                let p = Term::Iri(t.predicate.clone());
                let s = Term::from(t.subject.clone());
                let mut row = std::collections::BTreeMap::new();
                if let Some(l) = label(&p) {
                    row.insert("pl".into(), l);
                }
                if let Some(l) = label(&s) {
                    row.insert("sl".into(), l);
                }
                row.insert("p".into(), p);
                row.insert("s".into(), s);
                table.rows.push(row);
            }
        }
    }
    table
}

async fn sparql_handler(State(state): State<SparqlState>, form: Result<Form<QueryForm>, FormRejection>) -> Response {
    state.hits.fetch_add(1, Ordering::SeqCst);
    let Ok(Form(form)) = form else {
        return bad_request("UnsupportedQuery: missing form field `query`");
    };
    let Some((direction, entity)) = match_one_hop_query(&form.query) else {
        return bad_request("UnsupportedQuery: only the one-hop templates are served");
    };
    let body = write_results_json(&one_hop_rows(&state.graph, direction, &entity));
    ([(header::CONTENT_TYPE, RESULTS_JSON)], body).into_response()
}

/// SPARQL endpoint answering the outgoing and incoming one-hop templates
/// from `graph`; any other query gets 400.
pub fn build_stub_sparql(graph: Arc<KnowledgeGraph>, port: u16) -> io::Result<StubServer> {
    let hits = Arc::new(AtomicUsize::new(0));
    let state = SparqlState {
        graph,
        hits: hits.clone(),
    };
    let router = Router::new()
        .route(SPARQL_PATH, post(sparql_handler))
        .with_state(state);
    StubServer::spawn(router, port, SPARQL_PATH, hits)
}

#[derive(Clone)]
struct LinkerState {
    graph: Arc<KnowledgeGraph>,
    hits: Arc<AtomicUsize>,
}

#[derive(Deserialize)]
struct LinkBody {
    question: String,
}

async fn link_handler(State(state): State<LinkerState>, body: Bytes) -> Response {
    state.hits.fetch_add(1, Ordering::SeqCst);
    let body: LinkBody = match serde_json::from_slice(&body) {
        Ok(b) => b,
        Err(e) => return bad_request(format!("malformed body: {e}")),
    };
    if body.question.trim().is_empty() {
        return bad_request("empty question");
    }
    let candidates = link_offline(&state.graph, &body.question);
    axum::Json(json!({ "candidates": candidates })).into_response()
}

/// Linking API backed by the offline label matcher.
pub fn build_stub_linker(graph: Arc<KnowledgeGraph>, port: u16) -> io::Result<StubServer> {
    let hits = Arc::new(AtomicUsize::new(0));
    let router = Router::new().route(LINK_PATH, post(link_handler)).with_state(LinkerState {
        graph,
        hits: hits.clone(),
    });
    StubServer::spawn(router, port, LINK_PATH, hits)
}

#[derive(Clone)]
struct EmbedState {
    provider: Arc<dyn EmbeddingProvider>,
    hits: Arc<AtomicUsize>,
}

#[derive(Deserialize)]
struct EmbedBody {
    texts: Vec<String>,
}

async fn embed_handler(State(state): State<EmbedState>, body: Bytes) -> Response {
    state.hits.fetch_add(1, Ordering::SeqCst);
    let body: EmbedBody = match serde_json::from_slice(&body) {
        Ok(b) => b,
        Err(e) => return bad_request(format!("malformed body: {e}")),
    };
    let mut vectors = Vec::with_capacity(body.texts.len());
    for text in &body.texts {
        match state.provider.embed(text) {
            Ok(v) => vectors.push(v.into_vec()),
            Err(e) => return bad_request(e.to_string()),
        }
    }
    axum::Json(json!({ "vectors": vectors })).into_response()
}

/// Embedding API delegating to `provider` (the hash embedder in tests).
pub fn build_stub_embedder(port: u16, provider: Arc<dyn EmbeddingProvider>) -> io::Result<StubServer> {
    let hits = Arc::new(AtomicUsize::new(0));
    let router = Router::new().route(EMBED_PATH, post(embed_handler)).with_state(EmbedState {
        provider,
        hits: hits.clone(),
    });
    StubServer::spawn(router, port, EMBED_PATH, hits)
}
