mod config;
mod run;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use spde_lab::parallel::with_threads;
use spde_lab::{Error, VERSION};

use config::{Command, Format, RunConfig};
use run::Artifact;

#[derive(Debug, Parser)]
#[command(name = "spde-lab", version, about = "Simulation and verification toolkit for SDEs and SPDEs")]
struct Cli {
    /// Master seed; every replica stream derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Refuse to run without an explicit seed (default when CI is set).
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads (fallback: SPDE_LAB_THREADS). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run from a resolved config JSON instead of a subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Artifact path; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Option<Command>,
}

/// Failure with the exit status it maps to.
struct Failure {
    kind: &'static str,
    message: String,
    status: u8,
    verdict: Option<Value>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { kind: "usage", message: message.into(), status: 2, verdict: None }
    }

    fn report(&self) {
        let mut body = json!({ "kind": self.kind, "message": self.message, "status": self.status });
        if let Some(v) = &self.verdict {
            body["verdict"] = v.clone();
        }
        eprintln!("{}", json!({ "error": body }));
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (kind, status) = match &e {
            Error::Domain(_) => ("domain", 2),
            Error::Capability(_) => ("capability", 2),
            Error::Input(_) => ("input", 2),
            Error::Shape { .. } => ("shape", 2),
            Error::Divergent(_) => ("divergent", 2),
            Error::Format(_) => ("format", 2),
            Error::Numerical(_) => ("numerical", 3),
            Error::Io(_) => ("io", 1),
        };
        let verdict = match &e {
            Error::Divergent(v) => serde_json::to_value(v.as_ref()).ok(),
            _ => None,
        };
        Self { kind, message, status, verdict }
    }
}

fn env_flag(name: &str) -> bool {
    std::env::var(name).is_ok_and(|v| !v.is_empty() && v != "0" && !v.eq_ignore_ascii_case("false"))
}

fn resolve(cli: Cli) -> Result<(RunConfig, Option<usize>), Failure> {
    let strict = cli.strict || env_flag("CI");
    let threads = match cli.threads {
        Some(n) => Some(n),
        None => match std::env::var("SPDE_LAB_THREADS") {
            Ok(s) if !s.is_empty() => Some(
                s.parse()
                    .map_err(|_| Failure::usage(format!("SPDE_LAB_THREADS must be a positive integer, got {s:?}")))?,
            ),
            _ => None,
        },
    };
    if threads == Some(0) {
        return Err(Failure::usage("thread count must be at least 1"));
    }

    let mut cfg = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(Failure::usage("--config and a subcommand are mutually exclusive")),
        (None, None) => return Err(Failure::usage("a subcommand or --config is required")),
        (Some(path), None) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
            let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure {
                kind: "config",
                message: format!("invalid config {}: {e}", path.display()),
                status: 2,
                verdict: None,
            })?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            cfg
        }
        (None, Some(command)) => {
            let seed = match cli.seed {
                Some(s) => s,
                None if strict => return Err(Failure::usage("--seed is required in strict mode")),
                None => 0,
            };
            let format = command.default_format();
            RunConfig { seed, format, output: None, command }
        }
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if cli.output.is_some() {
        cfg.output = cli.output;
    }
    run::resolve(&mut cfg.command);
    cfg.validate()?;
    Ok((cfg, threads))
}

fn write_artifact(cfg: &RunConfig, artifact: Artifact) -> Result<(), Failure> {
    let config = serde_json::to_value(cfg).expect("config always serializes");
    let bytes = match artifact {
        Artifact::Csv(body) => format!("# spde-lab {VERSION}\n# config {config}\n{body}").into_bytes(),
        Artifact::Json(result) => {
            let mut s = serde_json::to_string_pretty(&json!({ "version": VERSION, "config": config, "result": result }))
                .expect("values always serialize");
            s.push('\n');
            s.into_bytes()
        }
        Artifact::Binary(field) => {
            let path = cfg.output.as_ref().expect("validated: binary needs an output path");
            let mut buf = Vec::new();
            field.write_binary(&mut buf)?;
            fs::write(path, buf).map_err(Error::from)?;
            let meta = json!({ "version": VERSION, "config": config });
            fs::write(sidecar(path), format!("{meta}\n")).map_err(Error::from)?;
            return Ok(());
        }
    };
    match &cfg.output {
        Some(path) => fs::write(path, bytes).map_err(Error::from)?,
        None => std::io::stdout().write_all(&bytes).map_err(Error::from)?,
    }
    Ok(())
}

/// Metadata file written next to a binary field.
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            Failure::usage(first.strip_prefix("error: ").unwrap_or(first)).report();
            return ExitCode::from(2);
        }
    };
    let outcome = resolve(cli).and_then(|(cfg, threads)| {
        let artifact = with_threads(threads, || run::execute(&cfg))??;
        write_artifact(&cfg, artifact)
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.status)
        }
    }
}
