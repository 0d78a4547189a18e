use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ordest::Error;
use ordest_cli::commands::execute;
use ordest_cli::config::{Command, RawConfig};
use serde_json::json;

/// Order-restricted location estimation for two exponential populations.
#[derive(Parser)]
#[command(name = "ordest", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Print the equivariant multipliers for a design and loss.
    Constants(Overrides),
    /// Estimate a location from a data file or given statistics.
    Estimate(Overrides),
    /// Risks and PRIs of candidate estimators for one parameter cell.
    Simulate(Overrides),
    /// Pitman nearness of the first estimator relative to the second.
    Gpn(Overrides),
    /// PRI table over the config's `[block]` grid.
    Table(Overrides),
    /// Run the command named by the config's `command` key.
    Run(Overrides),
}

/// Command-line values replace config values. `ORDEST_SEED` sits between
/// the config and `--seed`.
#[derive(Args)]
struct Overrides {
    /// Config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    /// `squared`, `linex:<a>`.
    #[arg(long)]
    loss: Option<String>,
    /// `mu1` or `mu2`.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    baseline: Option<String>,
    /// Comma-separated estimator names.
    #[arg(long)]
    estimators: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(short, long)]
    output: Option<String>,
    /// `csv` or `markdown`.
    #[arg(long)]
    format: Option<String>,
    /// Observations CSV for `estimate`.
    #[arg(long)]
    data: Option<String>,
    /// Any global config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn error_record(err: &Error) -> serde_json::Value {
    let mut record = json!({ "error": err.kind(), "message": err.to_string() });
    if let Error::Config { line, field, .. } = err {
        record["line"] = json!(line);
        record["field"] = json!(field);
    }
    record
}

fn load(args: &Overrides) -> Result<ordest_cli::config::Config, Error> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?,
        None => String::new(),
    };
    let mut raw = RawConfig::parse(&text)?;
    if let Ok(seed) = std::env::var("ORDEST_SEED") {
        raw.set("seed", seed)?;
    }
    let flags = [
        ("seed", &args.seed),
        ("reps", &args.reps),
        ("loss", &args.loss),
        ("target", &args.target),
        ("baseline", &args.baseline),
        ("estimators", &args.estimators),
        ("threads", &args.threads),
        ("output", &args.output),
        ("format", &args.format),
        ("data", &args.data),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, v.as_str())?;
        }
    }
    for pair in &args.set {
        let (key, value) = pair.split_once('=').ok_or_else(|| Error::Config {
            line: 0,
            field: pair.clone(),
            message: "expected --set key=value".into(),
        })?;
        raw.set(key, value.trim())?;
    }
    raw.build()
}

fn run(sub: Sub) -> Result<bool, Error> {
    let (requested, args) = match sub {
        Sub::Constants(a) => (Some(Command::Constants), a),
        Sub::Estimate(a) => (Some(Command::Estimate), a),
        Sub::Simulate(a) => (Some(Command::Simulate), a),
        Sub::Gpn(a) => (Some(Command::Gpn), a),
        Sub::Table(a) => (Some(Command::Table), a),
        Sub::Run(a) => (None, a),
    };
    let config = load(&args)?;
    let command = match (requested, config.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config {
                line: 0,
                field: "command".into(),
                message: format!("config names `{b}` but `{a}` was requested"),
            })
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(Error::Config { line: 0, field: "command".into(), message: "no command given".into() })
        }
    };
    let outcome = execute(&config, command)?;
    match &config.output {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| Error::Config {
            line: 0,
            field: "output".into(),
            message: format!("cannot write {}: {e}", path.display()),
        })?,
        None => print!("{}", outcome.text),
    }
    for (cell, err) in &outcome.failures {
        let mut record = error_record(err);
        record["cell"] = json!(cell);
        eprintln!("{record}");
    }
    Ok(outcome.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        // Table written, some cells failed.
        Ok(false) => ExitCode::from(3),
        Err(err) => {
            eprintln!("{}", error_record(&err));
            ExitCode::from(if matches!(err, Error::Config { .. }) { 2 } else { 1 })
        }
    }
}
