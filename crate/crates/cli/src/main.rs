//! `rumin`: spectra, identity suites and κ partial sums on S³ and lens spaces.

mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rumin_core::spectral::{self, VerificationReport};
use rumin_core::suite::run_suite;
use rumin_core::torsion::torsion_estimate;

use config::{Format, Overrides, RunConfig, UsageError};

#[derive(Parser, Debug)]
#[command(name = "rumin", version, about = "Rumin complex spectra and identity checks on homogeneous Sasakian 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of a Laplacian, block by block.
    Spectrum(Overrides),
    /// Run a verification suite and write its JSON report.
    Verify(Overrides),
    /// κ partial sums and the Reeb-frequency comparison.
    Torsion(Overrides),
}

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, overrides) = match cli.command {
        Command::Spectrum(o) => ("spectrum", o),
        Command::Verify(o) => ("verify", o),
        Command::Torsion(o) => ("torsion", o),
    };
    let cfg = match RunConfig::resolve(overrides) {
        Ok(c) => c,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE);
        }
    };
    if let Some(n) = cfg.threads {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match kind {
        "spectrum" => cmd_spectrum(&cfg),
        "verify" => cmd_verify(&cfg),
        _ => cmd_torsion(&cfg),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FAIL)
        }
    }
}

fn emit(cfg: &RunConfig, body: &str) -> std::io::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn document(cfg: &RunConfig, key: &str, value: serde_json::Value) -> String {
    let doc = serde_json::json!({ "schema": 1, "config": cfg.echo(), key: value });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<u8, Box<dyn std::error::Error>> {
    let model = cfg.model()?;
    let table = spectral::spectrum(&model, cfg.max_weight, cfg.laplacian(), &cfg.degrees)?;
    let body = match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => document(cfg, "spectrum", serde_json::to_value(&table)?),
    };
    emit(cfg, &body)?;
    Ok(PASS)
}

fn list_failures(report: &VerificationReport) {
    for c in report.failures() {
        let block = c.block.as_deref().unwrap_or("-");
        let degree = c.degree.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        eprintln!("FAIL {} block={block} degree={degree} residual={:e} tolerance={:e}", c.name, c.residual, c.tolerance);
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<u8, Box<dyn std::error::Error>> {
    let model = cfg.model()?;
    let report = run_suite(&model, cfg.suite, &cfg.suite_config())?;
    let body = document(cfg, "report", serde_json::to_value(&report)?);
    emit(cfg, &body)?;
    if report.passed() {
        Ok(PASS)
    } else {
        list_failures(&report);
        Ok(FAIL)
    }
}

fn cmd_torsion(cfg: &RunConfig) -> Result<u8, Box<dyn std::error::Error>> {
    let model = cfg.model()?;
    let report = torsion_estimate(&model, cfg.max_weight, &cfg.s_grid, &cfg.tolerances())?;
    let body = match cfg.format {
        Format::Csv => report.pairs_csv(),
        Format::Json => document(cfg, "torsion", serde_json::to_value(&report)?),
    };
    emit(cfg, &body)?;
    if report.passed {
        Ok(PASS)
    } else {
        list_failures(&report.as_verification(cfg.tolerances()));
        Ok(FAIL)
    }
}
