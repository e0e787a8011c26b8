//! Command-line front end: reads a JSON run config, applies flag and
//! environment overrides, executes, and writes the report.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
//! Environment overrides use the `RHMAP_` prefix (`RHMAP_SEED`,
//! `RHMAP_MODE`, `RHMAP_REL_TOL`, `RHMAP_OUT`, `RHMAP_SVG`) and sit between
//! config values and explicit flags in precedence: flags win, then the
//! environment, then the config file.

use clap::Parser;
use rhmap_core::config::RunConfig;
use rhmap_core::run::{run, RunError};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "rhmap",
    about = "Monodromy of sl2-systems on hyperelliptic curves and the derivative of the Riemann-Hilbert map",
    version
)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Write the JSON report here instead of the config's output.json path
    /// (stdout when neither is set).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write the loop diagram SVG here (overrides the config's output.svg).
    #[arg(long)]
    svg: Option<PathBuf>,

    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Override the rank mode: exact | float.
    #[arg(long)]
    mode: Option<String>,

    /// Override the integrator relative tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok()?.parse().ok()
}

fn env_f64(name: &str) -> Option<f64> {
    std::env::var(name).ok()?.parse().ok()
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: config is not valid JSON: {e}");
            return ExitCode::from(2);
        }
    };

    // precedence: flag, then environment, then config file
    let seed = cli.seed.or_else(|| env_u64("RHMAP_SEED"));
    let mode = cli.mode.or_else(|| std::env::var("RHMAP_MODE").ok());
    let rel_tol = cli.rel_tol.or_else(|| env_f64("RHMAP_REL_TOL"));
    if let Some(s) = seed {
        value["seed"] = Value::from(s);
    }
    if let Some(m) = mode {
        value["mode"] = Value::from(m);
    }
    if let Some(r) = rel_tol {
        if !value.get("tolerances").is_some_and(Value::is_object) {
            value["tolerances"] = serde_json::json!({});
        }
        value["tolerances"]["rel_tol"] = Value::from(r);
    }

    let cfg = match RunConfig::from_json_value(value) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let out_path = cli
        .out
        .or_else(|| std::env::var("RHMAP_OUT").ok().map(PathBuf::from))
        .or_else(|| cfg.output.json.clone().map(PathBuf::from));
    let svg_path = cli
        .svg
        .or_else(|| std::env::var("RHMAP_SVG").ok().map(PathBuf::from))
        .or_else(|| cfg.output.svg.clone().map(PathBuf::from));

    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(RunError::Numerical(e)) => {
            eprintln!("error: numerical failure: {e}");
            return ExitCode::from(3);
        }
    };

    let pretty = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    match &out_path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, pretty.as_bytes()) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
            println!("report written to {}", p.display());
        }
        None => println!("{pretty}"),
    }

    if let Some(p) = &svg_path {
        match &outcome.svg {
            Some(svg) => {
                if let Err(e) = std::fs::write(p, svg.as_bytes()) {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return ExitCode::from(2);
                }
                println!("svg written to {}", p.display());
            }
            None => eprintln!("note: this command produces no svg; {} not written", p.display()),
        }
    }

    // selftest prints its table and fails the process on a red row
    if cfg.command == rhmap_core::config::Command::Selftest {
        let rows = &outcome.report["results"]["invariants"];
        let mut all_pass = true;
        println!("{:<4} {:>12} {:>12}  {}", "name", "defect", "threshold", "status");
        for r in rows.as_array().into_iter().flatten() {
            let pass = r["pass"].as_bool().unwrap_or(false);
            all_pass &= pass;
            println!(
                "{:<4} {:>12.3e} {:>12.3e}  {}",
                r["name"].as_str().unwrap_or("?"),
                r["defect"].as_f64().unwrap_or(f64::NAN),
                r["threshold"].as_f64().unwrap_or(f64::NAN),
                if pass { "pass" } else { "FAIL" }
            );
        }
        if !all_pass {
            return ExitCode::from(1);
        }
    }

    ExitCode::SUCCESS
}
