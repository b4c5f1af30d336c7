use std::fs;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use gausseer_core::ingest::{ingest_corpus, IngestOptions, DEFAULT_EXTENSIONS};
use gausseer_core::{IndexSnapshot, Taxonomy};
use gausseer_service::{api, AppState, SearchParams};

/// Faceted search over Gaussian output logs.
#[derive(Parser)]
#[command(name = "gausseer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a directory of logs into an index snapshot.
    Ingest {
        dir: PathBuf,
        #[arg(long)]
        index: PathBuf,
        /// Taxonomy config file; the bundled table is used otherwise.
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        /// Directory for per-document XML records (default `<index>.xml`).
        #[arg(long)]
        xml_out: Option<PathBuf>,
        /// Comma-separated file extensions to ingest.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EXTENSIONS.map(String::from))]
        ext: Vec<String>,
    },
    /// Query a snapshot and print the JSON response.
    Search {
        #[arg(long)]
        index: PathBuf,
        /// Comma-separated element symbols.
        #[arg(long, required_unless_present = "doc")]
        elements: Option<String>,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        jobtype: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        op: Option<String>,
        /// `field:value`, repeatable.
        #[arg(long)]
        refine: Vec<String>,
        #[arg(long)]
        page: Option<String>,
        /// Print one document in full instead of searching.
        #[arg(long, conflicts_with = "elements")]
        doc: Option<u64>,
    },
    /// Serve the HTTP API (and optionally a static web UI).
    Serve {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("gausseer: {msg}");
    ExitCode::from(code)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("response serializes"));
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Ingest {
            dir,
            index,
            taxonomy,
            xml_out,
            ext,
        } => {
            let taxonomy = match taxonomy {
                None => Taxonomy::default_config(),
                Some(path) => match fs::read_to_string(&path) {
                    Err(e) => return fail(1, format!("{}: {e}", path.display())),
                    Ok(text) => match Taxonomy::load(&text) {
                        Ok(t) => t,
                        Err(e) => return fail(2, format!("{}: {e}", path.display())),
                    },
                },
            };
            let options = IngestOptions {
                extensions: ext
                    .iter()
                    .map(|e| e.trim().trim_start_matches('.').to_lowercase())
                    .collect(),
                xml_out,
            };
            match ingest_corpus(&dir, &taxonomy, &index, &options) {
                Ok((report, _)) => {
                    print_json(&report);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(1, e),
            }
        }
        Command::Search {
            index,
            elements,
            mode,
            method,
            jobtype,
            basis,
            op,
            refine,
            page,
            doc,
        } => {
            let snapshot = match IndexSnapshot::load(&index) {
                Ok(s) => s,
                Err(e) => return fail(1, format!("{}: {e}", index.display())),
            };
            if let Some(id) = doc {
                return match api::doc_detail(&snapshot, id) {
                    Ok(d) => {
                        print_json(&d);
                        ExitCode::SUCCESS
                    }
                    Err(e) => fail(1, e.message),
                };
            }
            let params = SearchParams {
                elements: elements
                    .unwrap_or_default()
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
                mode,
                method,
                jobtype,
                basis,
                op,
                refine,
                page,
            };
            match params.to_query() {
                Ok((query, page)) => {
                    print_json(&api::search_response(&snapshot, &query, page));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(2, format!("{}: {}", e.code, e.message)),
            }
        }
        Command::Serve {
            index,
            port,
            host,
            static_dir,
        } => {
            let snapshot = match IndexSnapshot::load(&index) {
                Ok(s) => s,
                Err(e) => return fail(1, format!("{}: {e}", index.display())),
            };
            let addr: SocketAddr = match format!("{host}:{port}").parse() {
                Ok(a) => a,
                Err(e) => return fail(2, format!("bad address {host}:{port}: {e}")),
            };
            let state = Arc::new(AppState::new(snapshot));
            let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
            eprintln!(
                "gausseer: serving {} documents on http://{addr}",
                state.current().snapshot.doc_count()
            );
            match runtime.block_on(gausseer_service::serve(addr, state, static_dir)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(1, e),
            }
        }
    }
}
