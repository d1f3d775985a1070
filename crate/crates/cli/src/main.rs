//! `fenchel`: run accelerated methods as games, audit their certificates and
//! fit convergence rates.
//!
//! Exit status: 0 when every certificate holds, 1 when one fails, 2 on bad
//! input.

mod config;
mod experiment;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use fenchel_core::rates::fit_rate_slope;

use config::ExperimentConfig;

/// Output root when `FENCHEL_OUT` is unset.
const DEFAULT_OUT: &str = "fenchel-out";

#[derive(Debug, Parser)]
#[command(name = "fenchel", version, about = "Accelerated optimization as a two-player game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a TOML file.
    Run {
        config: PathBuf,
        /// Output root; overrides `FENCHEL_OUT`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a trace CSV: gap against bound, bound against regrets.
    Certify { trace: PathBuf },
    /// Fit log-log slopes per method from a summary CSV.
    Slope { summary: PathBuf },
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Certify { trace } => certify(&trace),
        Command::Slope { summary } => slope(&summary),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn output_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("FENCHEL_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn run(path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let cfg = ExperimentConfig::load(path)?;
    let name = match &cfg.output {
        Some(name) => name.clone(),
        None => path
            .file_stem()
            .and_then(|s| s.to_str())
            .context("config path has no usable file stem")?
            .to_string(),
    };
    let exp = experiment::prepare(&cfg, &name)?;
    let results = experiment::execute(&exp)?;

    // Everything is rendered before the directory is touched, so a failed
    // run leaves nothing behind.
    let longest = results.last().expect("at least one horizon");
    let files = [
        ("trace.csv", report::trace_csv(longest)?),
        ("certificates.json", report::certificates_json(&exp, &results)?),
        ("summary.csv", report::summary_csv(&exp, &results)?),
    ];
    let dir = output_root(out).join(&name);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for (file, bytes) in &files {
        let p = dir.join(file);
        fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?;
    }

    let mut failed = 0;
    for r in &results {
        let bad: Vec<_> = r.certificates.iter().filter(|c| !c.pass).collect();
        failed += bad.len();
        println!(
            "T={:<6} gap={:.6e} certificates={} failed={}",
            r.rounds,
            r.gap,
            r.certificates.len(),
            bad.len()
        );
        for c in bad {
            println!("  FAIL {}: measured {:.6e} > bound {:.6e}", c.name, c.measured, c.bound);
        }
    }
    if let Some(fit) = experiment::slope_of(&results) {
        println!("slope {:.4} (r^2 {:.4})", fit.slope, fit.r_squared);
    }
    println!("wrote {}", dir.display());
    Ok(if failed == 0 { Outcome::Pass } else { Outcome::Fail })
}

fn certify(path: &Path) -> Result<Outcome> {
    let rows = report::read_trace(path)?;
    if rows.is_empty() {
        bail!("{}: no rounds", path.display());
    }
    let audit = report::audit_trace(&rows);
    for f in &audit.failures {
        println!("FAIL {f}");
    }
    println!("{} rounds checked, {} violations", audit.rows, audit.failures.len());
    Ok(if audit.failures.is_empty() { Outcome::Pass } else { Outcome::Fail })
}

fn slope(path: &Path) -> Result<Outcome> {
    let rows = report::read_summary(path)?;
    let mut methods: Vec<&str> = vec![];
    for r in &rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    if methods.is_empty() {
        bail!("{}: no rows", path.display());
    }
    let mut ok = true;
    for m in methods {
        let pts: Vec<(f64, f64)> =
            rows.iter().filter(|r| r.method == m).map(|r| (r.rounds as f64, r.gap)).collect();
        match fit_rate_slope(&pts) {
            Ok(fit) => println!(
                "{m}: slope {:.4} intercept {:.4} r^2 {:.4} over {} horizons",
                fit.slope,
                fit.intercept,
                fit.r_squared,
                pts.len()
            ),
            Err(e) => {
                ok = false;
                println!("{m}: no fit ({e})");
            }
        }
    }
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}
