mod common;

use common::*;
use serde_json::json;

#[test]
fn ask_prints_the_orcid() {
    let out = kgnav(&["ask", "--config", &fixture_config(), "What is the ORCID of Alice Müller?"]);
    assert!(out.status.success());
    let (entity, predicate, answers) = parse_ask(&stdout(&out));
    assert_eq!(entity, "http://example.org/kg/alice");
    assert_eq!(predicate, "https://dblp.org/rdf/schema#orcid");
    assert_eq!(answers, ["0000-0001-2345-6789"]);
}

#[test]
fn ask_trace_lists_candidates() {
    let out = kgnav(&[
        "ask",
        "--config",
        &fixture_config(),
        "--trace",
        "Which papers are authored by Alice Müller?",
    ]);
    let text = stdout(&out);
    assert!(text.contains("ranked candidates:"));
    assert_eq!(parse_ask(&text).2.len(), 2);
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(kgnav(&["ask", "--config", &fixture_config()]).status.code(), Some(2));
    assert_eq!(kgnav(&["ask", "question"]).status.code(), Some(2));
    assert_eq!(kgnav(&["ask", "--config", "/nonexistent.json", "q"]).status.code(), Some(2));
    assert_eq!(
        kgnav(&["relations", "--config", &fixture_config(), "not an iri"]).status.code(),
        Some(2)
    );
}

#[test]
fn relations_of_alice() {
    let out = kgnav(&["relations", "--config", &fixture_config(), "http://example.org/kg/alice"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5);
    assert_eq!(text.lines().filter(|l| l.starts_with("incoming")).count(), 2);

    let out = kgnav(&["relations", "--config", &fixture_config(), "http://example.org/kg/nobody"]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
}

#[test]
fn link_stars_the_selected_entity() {
    let out = kgnav(&["link", "--config", &fixture_config(), "What is the ORCID of Alice Müller?"]);
    let text = stdout(&out);
    let starred: Vec<&str> = text.lines().filter(|l| l.starts_with('*')).collect();
    assert_eq!(starred.len(), 1);
    assert!(starred[0].contains("http://example.org/kg/alice"));
}

#[test]
fn eval_writes_json_and_text_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = kgnav(&[
        "eval",
        "--config",
        &fixture_config(),
        &dataset(),
        "--gold-entities",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("macro F1 (QA): 1.0000"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["macro_f1_qa"], 1.0);
    assert!(std::fs::read_to_string(dir.path().join("report.txt"))
        .unwrap()
        .contains("macro F1 (EL): 1.0000"));
}

#[test]
fn eval_with_bad_dataset_exits_1() {
    let out = kgnav(&["eval", "--config", &fixture_config(), "/nonexistent/dataset.json"]);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("d.json");
    std::fs::write(&bad, r#"{"questions":[{"id":"a","question":"","answers":[]}]}"#).unwrap();
    let out = kgnav(&["eval", "--config", &fixture_config(), bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreachable_endpoint_is_a_transport_failure() {
    let dir = tempfile::tempdir().unwrap();
    // Bind and release a port so nothing listens on it.
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let dead = format!("http://127.0.0.1:{port}/x");
    let cfg = remote_config(dir.path(), &dead, &dead, &dead);
    let out = kgnav(&["ask", "--config", cfg.to_str().unwrap(), "What is the ORCID of Alice Müller?"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TransportError"));
}

#[test]
fn no_heuristics_flag_overrides_config() {
    let out = kgnav(&[
        "eval",
        "--config",
        &fixture_config(),
        &dataset(),
        "--gold-entities",
        "--no-heuristics",
    ]);
    assert!(stdout(&out).contains("macro F1 (QA): 0.6000"));
}

#[test]
fn service_endpoints() {
    let served = Served::start(&fixture_config());
    assert_eq!(served.health(), (200, json!({"status": "ok"})));

    let (status, body) = served.post_ask(r#"{"question":"What is the ORCID of Alice Müller?"}"#);
    assert_eq!(status, 200);
    assert_eq!(
        body,
        json!({
            "entity": "http://example.org/kg/alice",
            "predicate": "https://dblp.org/rdf/schema#orcid",
            "answers": ["0000-0001-2345-6789"]
        })
    );

    assert_eq!(served.post_ask("").0, 400);
    assert_eq!(served.post_ask("{").0, 400);
    assert_eq!(served.post_ask(r#"{"question":"  "}"#).0, 400);

    let (status, body) = served.post_ask(r#"{"question":"zzz qqq"}"#);
    assert_eq!(status, 422);
    assert_eq!(body["error"], "NoEntityError");

    let (status, body) = served.post_ask(r#"{"question":"What is the ORCID of Carol Davis?"}"#);
    assert_eq!(status, 422);
    assert_eq!(body["error"], "EmptyCandidatesError");
}

#[test]
fn service_handles_concurrent_requests() {
    let served = Served::start(&fixture_config());
    let questions = [
        "What is the ORCID of Alice Müller?",
        "Which papers are authored by Bob Chen?",
        "What is the DOI of Neural Parsing at Scale?",
        "What is the primary affiliation of Carol Davis?",
    ];
    let sequential: Vec<_> = questions
        .iter()
        .map(|q| served.post_ask(&json!({"question": q}).to_string()))
        .collect();
    let parallel: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = questions
            .iter()
            .map(|q| {
                let served = &served;
                s.spawn(move || served.post_ask(&json!({"question": q}).to_string()))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, parallel);
}

#[test]
fn remote_service_answers_like_offline() {
    let graph = kgnav_fixtures::graph();
    let sparql = kgnav_fixtures::build_stub_sparql(graph.clone(), 0).unwrap();
    let linker = kgnav_fixtures::build_stub_linker(graph, 0).unwrap();
    let embedder =
        kgnav_fixtures::build_stub_embedder(0, std::sync::Arc::new(kgnav::ranker::HashEmbedder)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = remote_config(dir.path(), &sparql.url(), &linker.url(), &embedder.url());
    let remote = Served::start(cfg.to_str().unwrap());
    let offline = Served::start(&fixture_config());
    let body = r#"{"question":"Who authored Neural Parsing at Scale?"}"#;
    assert_eq!(remote.post_ask(body), offline.post_ask(body));
    drop(sparql);
    // With the SPARQL stub gone the service reports the upstream failure.
    let (status, body) = remote.post_ask(body);
    assert_eq!(status, 502);
    assert_eq!(body["error"], "TransportError");
}
