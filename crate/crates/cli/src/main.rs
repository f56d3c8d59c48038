use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use matchwork_cli::{router, AppState};
use matchwork_core::workbench::{DrillKind, LabelAction, Project, ProjectConfig, SampleKind};
use matchwork_core::{Error, Result};
use serde::Serialize;

/// Weakly supervised entity matching over two tables.
#[derive(Parser)]
#[command(name = "matchwork", version)]
struct Cli {
    /// Project directory.
    #[arg(short = 'C', long, default_value = ".", global = true)]
    project: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create a project: ingest, block, generate LFs and fit once.
    Init {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value = "id")]
        id_column: String,
        /// `left_id,right_id` file of known matches, used for evaluation.
        #[arg(long)]
        matches: Option<PathBuf>,
        /// Project configuration (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the EM stats panel.
    Stats,
    /// Manage labeling functions.
    #[command(subcommand)]
    Lf(LfCommand),
    /// Apply LFs incrementally and refit the model.
    Apply,
    /// Show a smart or precision sample.
    Sample {
        #[arg(value_enum)]
        kind: SampleArg,
        #[arg(short, default_value_t = 10)]
        n: usize,
    },
    /// Label a candidate pair.
    Label {
        left_id: String,
        right_id: String,
        #[arg(value_enum)]
        value: LabelArg,
    },
    /// Pairs where an LF disagrees with the model.
    Drill {
        lf: String,
        #[arg(value_enum)]
        kind: DrillArg,
    },
    /// Write predicted matches as CSV.
    Export {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

#[derive(Subcommand)]
enum LfCommand {
    /// Add or replace an LF from a TOML file (`-` reads stdin).
    Add { file: PathBuf },
    /// Delete an LF.
    Rm { name: String },
    /// List LFs with their per-LF stats.
    Ls,
    /// Print an LF spec.
    Show { name: String },
    /// Dry-run an LF on one pair.
    Trace { name: String, left_id: String, right_id: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleArg {
    Smart,
    Precision,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelArg {
    Match,
    NonMatch,
    Clear,
}

#[derive(Clone, Copy, ValueEnum)]
enum DrillArg {
    Fp,
    Fn,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("response serializes");
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    Ok(())
}

fn read_spec(file: &Path) -> Result<String> {
    let mut text = String::new();
    if file == Path::new("-") {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse { line: None, message: format!("stdin: {e}") })?;
    } else {
        text = std::fs::read_to_string(file).map_err(|_| Error::FileNotFound(file.to_path_buf()))?;
    }
    Ok(text)
}

#[derive(Serialize)]
struct LfRow {
    name: String,
    origin: matchwork_core::lf::Origin,
    version: String,
    stats: Option<matchwork_core::workbench::LfStats>,
}

fn run(cli: Cli) -> Result<()> {
    let root = cli.project;
    match cli.command {
        Command::Init { left, right, id_column, matches, config } => {
            let config = match config {
                Some(path) => ProjectConfig::from_path(&path)?,
                None => ProjectConfig::default(),
            };
            let (_, report) = Project::create(&root, &left, &right, &id_column, config, matches.as_deref())?;
            print_json(&report)
        }
        Command::Stats => print_json(&Project::open(&root)?.stats()),
        Command::Lf(cmd) => {
            let mut project = Project::open(&root)?;
            match cmd {
                LfCommand::Add { file } => print_json(&project.upsert_lf_toml(&read_spec(&file)?)?),
                LfCommand::Rm { name } => project.delete_lf(&name),
                LfCommand::Ls => {
                    let stats = project.lf_stats();
                    let rows: Vec<LfRow> = project
                        .list_lfs()
                        .into_iter()
                        .map(|e| LfRow {
                            stats: stats.iter().find(|s| s.name == e.name).cloned(),
                            name: e.name,
                            origin: e.origin,
                            version: e.version,
                        })
                        .collect();
                    print_json(&rows)
                }
                LfCommand::Show { name } => {
                    let _ = write!(std::io::stdout().lock(), "{}", project.get_lf(&name)?.to_toml());
                    Ok(())
                }
                LfCommand::Trace { name, left_id, right_id } => print_json(&project.trace(&name, &left_id, &right_id)?),
            }
        }
        Command::Apply => print_json(&Project::open(&root)?.apply_and_fit()?),
        Command::Sample { kind, n } => {
            let kind = match kind {
                SampleArg::Smart => SampleKind::Smart,
                SampleArg::Precision => SampleKind::Precision,
            };
            print_json(&Project::open(&root)?.get_sample(kind, n)?)
        }
        Command::Label { left_id, right_id, value } => {
            let action = match value {
                LabelArg::Match => LabelAction::Match,
                LabelArg::NonMatch => LabelAction::NonMatch,
                LabelArg::Clear => LabelAction::Clear,
            };
            print_json(&Project::open(&root)?.label_pair(&left_id, &right_id, action)?)
        }
        Command::Drill { lf, kind } => {
            let kind = match kind {
                DrillArg::Fp => DrillKind::Fp,
                DrillArg::Fn => DrillKind::Fn,
            };
            print_json(&Project::open(&root)?.drilldown(&lf, kind)?)
        }
        Command::Export { output } => {
            let project = Project::open(&root)?;
            match output {
                Some(path) => {
                    let mut buf = Vec::new();
                    let n = project.export_matches(&mut buf)?;
                    matchwork_core::workbench::write_atomic(&path, &buf)?;
                    eprintln!("wrote {n} matches to {}", path.display());
                }
                None => {
                    let mut out = std::io::stdout().lock();
                    project.export_matches(&mut out)?;
                    let _ = out.flush();
                }
            }
            Ok(())
        }
        Command::Serve { addr } => serve(root, addr),
    }
}

fn serve(root: PathBuf, addr: SocketAddr) -> Result<()> {
    let state = AppState::new(root)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::Io { path: PathBuf::new(), source: e })?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Error::Io { path: PathBuf::from(addr.to_string()), source: e })?;
        eprintln!("listening on http://{addr}");
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Error::Io { path: PathBuf::from(addr.to_string()), source: e })
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
