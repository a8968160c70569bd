#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_kgnav")
}

pub fn kgnav(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("run kgnav")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn fixture_config() -> String {
    kgnav_fixtures::config_path().display().to_string()
}

pub fn dataset() -> String {
    kgnav_fixtures::dataset_path().display().to_string()
}

/// Entity, predicate and answer values from `kgnav ask` output.
pub fn parse_ask(text: &str) -> (String, String, Vec<String>) {
    let mut lines = text.lines();
    let entity = lines.next().unwrap().strip_prefix("entity: ").unwrap();
    let entity = entity.split(' ').next().unwrap().to_owned();
    let predicate = lines.next().unwrap().strip_prefix("predicate: ").unwrap().to_owned();
    assert_eq!(lines.next(), Some("answers:"));
    let answers = lines
        .take_while(|l| *l != "ranked candidates:")
        .map(str::to_owned)
        .collect();
    (entity, predicate, answers)
}

/// Writes a config pointing every component at the given stub URLs.
pub fn remote_config(dir: &Path, sparql: &str, linker: &str, embedder: &str) -> PathBuf {
    let path = dir.join("remote.json");
    let cfg = serde_json::json!({
        "sparql_endpoint": sparql,
        "linker": "remote",
        "linker_url": linker,
        "embedder": "remote",
        "embedder_url": embedder,
        "embedder_dim": 256,
        "similarity": "cosine",
        "heuristics": "on",
        "timeout_ms": 5000,
        "retries": 0
    });
    std::fs::write(&path, cfg.to_string()).unwrap();
    path
}

/// `kgnav serve` on a free port; killed on drop.
pub struct Served {
    child: Child,
    pub base: String,
}

impl Served {
    pub fn start(config: &str) -> Served {
        let mut child = Command::new(bin())
            .args(["serve", "--config", config, "--port", "0"])
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn server");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let base = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_owned();
        Served { child, base }
    }

    pub fn post_ask(&self, body: &str) -> (u16, serde_json::Value) {
        let resp = reqwest::blocking::Client::new()
            .post(format!("{}/ask", self.base))
            .header("content-type", "application/json")
            .body(body.to_owned())
            .send()
            .unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().unwrap_or(serde_json::Value::Null))
    }

    pub fn health(&self) -> (u16, serde_json::Value) {
        let resp = reqwest::blocking::get(format!("{}/health", self.base)).unwrap();
        (resp.status().as_u16(), resp.json().unwrap())
    }
}

impl Drop for Served {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
