//! `bhk`: verification suites and one-off computations.

mod compute;
mod scenario;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergman_hankel::io::csv_field;
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use scenario::{Overrides, ScenarioConfig};
use suites::{SuiteReport, SUITES};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Run(String),
    Core(bergman_hankel::Error),
}

impl From<bergman_hankel::Error> for CliError {
    fn from(e: bergman_hankel::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Run(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "bhk", version, about = "Hankel forms on weighted Bergman spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run a verification suite and write CSV/JSON artifacts
    Verify {
        #[arg(value_parser = PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Single truncation replacing the configured ladder
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Evaluate a single quantity
    Compute {
        #[command(subcommand)]
        op: compute::Op,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Verify {
            suite,
            config,
            out,
            seed,
            trunc,
            p,
            q,
        } => {
            let ov = Overrides { seed, out, trunc, p, q };
            verify(&suite, config.as_deref(), &ov)
        }
        Cmd::Compute { op } => compute::run(&op).map(|c| {
            println!("{}", c.value);
            println!("# {}", c.provenance);
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bhk: {e}");
            ExitCode::from(2)
        }
    }
}

fn verify(suite: &str, config: Option<&Path>, ov: &Overrides) -> Result<bool, CliError> {
    let cfg = ScenarioConfig::load(config, ov)?;
    let report = suites::run(suite, &cfg)?;
    let hash = cfg.config_hash();
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Run(format!("{}: {e}", cfg.out.display())))?;
    let csv_path = cfg.out.join(format!("{suite}.csv"));
    let json_path = cfg.out.join(format!("{suite}.json"));
    write(&csv_path, &csv(&report, &hash))?;
    let doc = json!({
        "suite": suite,
        "tool-version": VERSION,
        "config-hash": hash,
        "seed": cfg.seed,
        "pass": report.pass,
        "verdicts": report.verdicts.iter().cloned().map(Value::Object).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n";
    write(&json_path, &text)?;
    for v in &report.verdicts {
        println!("{}", Value::Object(v.clone()));
    }
    println!(
        "{suite}: {} ({} rows -> {}, verdicts -> {})",
        if report.pass { "PASS" } else { "FAIL" },
        report.rows.len(),
        csv_path.display(),
        json_path.display()
    );
    Ok(report.pass)
}

fn csv(report: &SuiteReport, hash: &str) -> String {
    let mut out: Vec<String> = report.header.iter().map(|h| h.to_string()).collect();
    out.extend(["config_hash".to_string(), "tool_version".to_string()]);
    let mut text = out.join(",") + "\n";
    for row in &report.rows {
        let mut fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        fields.push(hash.to_string());
        fields.push(VERSION.to_string());
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    text
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Run(format!("{}: {e}", path.display())))
}
