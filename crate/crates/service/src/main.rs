use clap::{Parser, Subcommand};
use geokg_core::ingest::{ingest, Manifest};
use geokg_core::query::{introspect, IntrospectKind};
use geokg_core::validate::{builtin_shapes, validate};
use geokg_service::api::{briefing_json, load_store, persist_store, query_json};
use geokg_service::views::canonical_json;
use geokg_service::{serve, AppState, ServiceConfig};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "geokg", version, about = "Geospatial knowledge graph")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a dataset manifest into the stored graph.
    Ingest { manifest: PathBuf },
    /// Evaluate a JSON query file ("-" for stdin), or a metadata question.
    Query {
        #[arg(required_unless_present = "introspect")]
        file: Option<PathBuf>,
        /// dataset-origin, subgraph-maintainer or graph-currency
        #[arg(long, conflicts_with = "file")]
        introspect: Option<IntrospectKind>,
    },
    /// Run an area briefing from a JSON request file ("-" for stdin).
    Briefing { file: PathBuf },
    /// Check the stored graph against the built-in shapes.
    Validate,
    /// Write the stored graph as N-Quads.
    Export {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Start the HTTP server.
    Serve,
}

fn read_input(path: &Path) -> Result<String, String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn api_error(e: geokg_service::api::ApiError) -> String {
    canonical_json(&e.body)
}

async fn shutdown_signal() {
    if let Err(e) = tokio::signal::ctrl_c().await {
        log::error!("cannot listen for shutdown signal: {e}");
        std::future::pending::<()>().await;
    }
    log::info!("shutting down");
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let config = ServiceConfig::load(cli.config.as_deref()).map_err(|e| e.to_string())?;
    let store_path = config.store_path();
    let store = || load_store(&store_path).map_err(|e| e.to_string());
    match cli.command {
        Command::Ingest { manifest } => {
            let (m, dir) = Manifest::load(&manifest).map_err(|e| e.to_string())?;
            let mut s = store()?;
            let vocab = geokg_core::materialize::Vocabulary::default();
            let report = ingest(&mut s, &vocab, &m, &dir, &config.ingest_options()).map_err(|e| e.to_string())?;
            persist_store(&s, &store_path).map_err(|e| e.to_string())?;
            println!("{}", canonical_json(&report));
        }
        Command::Query { file, introspect: kind } => {
            let s = store()?;
            let prefixes = geokg_core::store::PrefixTable::default();
            let out = match (kind, file) {
                (Some(k), _) => canonical_json(&introspect(&s, k).map_err(|e| e.to_string())?),
                (None, Some(f)) => query_json(&s, &read_input(&f)?, &prefixes).map_err(api_error)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            println!("{out}");
        }
        Command::Briefing { file } => {
            let s = store()?;
            let prefixes = geokg_core::store::PrefixTable::default();
            println!("{}", briefing_json(&s, &read_input(&file)?, &prefixes, config.covering_cap).map_err(api_error)?);
        }
        Command::Validate => {
            let report = validate(&store()?, &builtin_shapes());
            println!("{}", canonical_json(&report));
            if !report.conforms {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Export { output } => {
            let s = store()?;
            match output {
                Some(p) => {
                    s.export_nquads(&p).map_err(|e| e.to_string())?;
                }
                None => print!("{}", s.to_nquads()),
            }
        }
        Command::Serve => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            rt.block_on(async {
                let state = AppState::open(config.clone()).map_err(|e| e.to_string())?;
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await.map_err(|e| e.to_string())?;
                log::info!("listening on port {}", config.port);
                serve(state, listener, shutdown_signal()).await.map_err(|e| e.to_string())
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
