//! Command-line experiment runner.
//!
//! ```text
//! wg-schwarz run <config>        run one experiment, write results
//! wg-schwarz validate <config>   report configuration problems
//! wg-schwarz list-experiments
//! ```
//!
//! Exit status: 0 on success, 1 for configuration errors, 2 when an
//! experiment fails.

mod config;
mod experiments;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use config::{parse_text, validate, Experiment, ExperimentConfig, OUTPUT_DIR_ENV};
use output::OutputDir;

#[derive(Parser)]
#[command(name = "wg-schwarz", version, about = "Schwarz iteration spectra and convergence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// Print the available experiments and their keys.
    ListExperiments,
}

const EXIT_INVALID: u8 = 1;
const EXIT_FAILED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListExperiments => {
            list();
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(_) => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            Err(errors) => {
                report(&config, &errors);
                ExitCode::from(EXIT_INVALID)
            }
        },
        Command::Run { config } => match load(&config) {
            Ok(cfg) => run(&cfg),
            Err(errors) => {
                report(&config, &errors);
                ExitCode::from(EXIT_INVALID)
            }
        },
    }
}

fn list() {
    for e in Experiment::ALL {
        println!("{:<14} {}", e.name(), e.summary());
        for k in e.keys() {
            let note = match (k.required, k.default) {
                (true, _) => "required".to_string(),
                (false, "") => "optional".to_string(),
                (false, d) => format!("default {d}"),
            };
            println!("    {:<16} {note}", k.name);
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| vec![format!("cannot read config: {e}")])?;
    let env = std::env::var(OUTPUT_DIR_ENV).ok();
    validate(&parse_text(&text), env.as_deref())
}

fn report(path: &Path, errors: &[String]) {
    for e in errors {
        eprintln!("{}: {e}", path.display());
    }
}

fn run(cfg: &ExperimentConfig) -> ExitCode {
    let mut out = match OutputDir::create(&cfg.output_dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cannot create {}: {e}", cfg.output_dir.display());
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let result = experiments::run(cfg, &mut out);
    let mut manifest = Map::new();
    manifest.insert("artifact".into(), json!(env!("CARGO_PKG_NAME")));
    manifest.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    manifest.insert("experiment".into(), json!(cfg.experiment.name()));
    let parameters: Map<String, Value> = cfg.raw.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    manifest.insert("parameters".into(), Value::Object(parameters));
    let resolved: Map<String, Value> = cfg.values.iter().map(|(k, v)| (k.to_string(), json!(format!("{v:?}")))).collect();
    manifest.insert("resolved".into(), Value::Object(resolved));
    let code = match result {
        Ok(o) => {
            manifest.insert("status".into(), json!("ok"));
            manifest.insert("seeds".into(), Value::Object(o.seeds));
            manifest.insert("tolerances".into(), Value::Object(o.tolerances));
            manifest.insert("summary".into(), Value::Object(o.summary));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", cfg.experiment);
            manifest.insert("status".into(), json!("failed"));
            manifest.insert("error".into(), json!(e));
            ExitCode::from(EXIT_FAILED)
        }
    };
    let mut files = out.files.clone();
    files.push("manifest.json".into());
    manifest.insert("files".into(), json!(files));
    let text = serde_json::to_string_pretty(&Value::Object(manifest)).expect("manifest serializes");
    if let Err(e) = out.write("manifest.json", &(text + "\n")) {
        eprintln!("cannot write manifest in {}: {e}", out.path().display());
        return ExitCode::from(EXIT_FAILED);
    }
    code
}
