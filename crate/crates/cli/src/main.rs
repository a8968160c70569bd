use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use kgnav::eval::{evaluate, load_dataset};
use kgnav::linker::select_relevant;
use kgnav::pipeline::PipelineDeps;
use kgnav::rdf::Iri;
use kgnav_cli::config::Switch;
use kgnav_cli::{render, service, AppConfig};

#[derive(Parser)]
#[command(name = "kgnav", version, about = "Question answering over a scholarly knowledge graph")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Disable candidate validation (overrides the config).
    #[arg(long, global = true)]
    no_heuristics: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer one question.
    Ask {
        question: String,
        /// Also print every ranked candidate with its score.
        #[arg(long)]
        trace: bool,
    },
    /// List the one-hop relations of an entity.
    Relations { entity: String },
    /// Show the linker's candidates for a question.
    Link { question: String },
    /// Evaluate a question dataset.
    Eval {
        dataset: PathBuf,
        /// Use each record's gold entity instead of the linker.
        #[arg(long)]
        gold_entities: bool,
        /// Write the JSON report here and a text summary next to it.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Serve the pipeline over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    fn run(e: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn pipeline_failure(e: kgnav::Error) -> Failure {
    Failure::run(format!("{}: {e}", e.name()))
}

fn load_config(cli: &Cli) -> Result<AppConfig, Failure> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::config("--config PATH is required"))?;
    let mut cfg = AppConfig::load(path).map_err(Failure::config)?;
    if cli.no_heuristics {
        cfg.heuristics = Switch::Off;
    }
    Ok(cfg)
}

fn write_report(path: &Path, json: &str, text: &str) -> Result<(), Failure> {
    let txt = path.with_extension("txt");
    std::fs::write(path, format!("{json}\n"))
        .and_then(|_| std::fs::write(&txt, text))
        .map_err(|e| Failure::run(format!("cannot write report: {e}")))
}

fn serve(deps: PipelineDeps, host: &str, port: u16) -> Result<(), Failure> {
    let deps = Arc::new(deps);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(Failure::run)?;
    let served = runtime.block_on({
        let deps = deps.clone();
        async move {
            let listener = tokio::net::TcpListener::bind((host, port)).await?;
            println!("listening on http://{}", listener.local_addr()?);
            let _ = std::io::stdout().flush();
            let shutdown = async {
                let _ = tokio::signal::ctrl_c().await;
            };
            service::serve(listener, deps, shutdown).await
        }
    });
    drop(runtime);
    // Blocking HTTP clients inside `deps` are dropped here, outside the runtime.
    drop(deps);
    served.map_err(Failure::run)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    let deps = cfg.build_deps().map_err(Failure::config)?;
    let mut stdout = std::io::stdout().lock();
    let mut emit = |s: &str| {
        let _ = stdout.write_all(s.as_bytes());
    };
    match cli.command {
        Command::Ask { question, trace } => {
            let set = deps.answer(&question).map_err(pipeline_failure)?;
            emit(&render::answer(&set, trace));
        }
        Command::Relations { entity } => {
            let iri = Iri::new(entity).map_err(Failure::config)?;
            let pairs = deps.graph_source.one_hop(&iri).map_err(pipeline_failure)?;
            emit(&render::relations(&pairs));
        }
        Command::Link { question } => {
            let candidates = deps.linker.link(&question).map_err(pipeline_failure)?;
            let selected = select_relevant(&candidates, &question).ok();
            emit(&render::links(&candidates, selected.as_ref()));
        }
        Command::Eval {
            dataset,
            gold_entities,
            report,
        } => {
            let records = load_dataset(&dataset).map_err(pipeline_failure)?;
            let result = evaluate(&records, &deps, gold_entities);
            let text = result.to_text();
            if let Some(path) = report {
                write_report(&path, &result.to_json(), &text)?;
            }
            emit(&text);
        }
        Command::Serve { port, host } => {
            drop(stdout);
            return serve(deps, &host, port);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("KGNAV_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
