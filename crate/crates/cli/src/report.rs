//! On-disk artifacts: per-round trace CSV, certificate JSON, summary CSV.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fenchel_core::audit::CERTIFICATE_TOL;

use crate::experiment::{prefix_rows, slope_of, Experiment, RunResult};

pub const TRACE_HEADER: [&str; 8] = ["t", "alpha_t", "A_t", "f_xbar", "gap", "regret_x", "regret_y", "eps_bound"];
pub const SUMMARY_HEADER: [&str; 4] = ["method", "T", "gap", "slope"];

/// 17 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_csv(result: &RunResult) -> Result<Vec<u8>> {
    let comparator = result.trace.comparator.as_ref().context("trace has no comparator")?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(TRACE_HEADER)?;
    for (r, p) in result.trace.rounds.iter().zip(prefix_rows(result)?) {
        w.write_record([
            r.t.to_string(),
            float(r.alpha),
            float(r.total),
            float(r.objective_at_average),
            float(r.objective_at_average - comparator.value),
            float(p.regret_x),
            float(p.regret_y),
            float(p.eps_bound),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn summary_csv(exp: &Experiment, results: &[RunResult]) -> Result<Vec<u8>> {
    let slope = slope_of(results).map(|f| float(f.slope)).unwrap_or_default();
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(SUMMARY_HEADER)?;
    for r in results {
        w.write_record([exp.method.clone(), r.rounds.to_string(), float(r.gap), slope.clone()])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Serialize)]
struct CertificateJson<'a> {
    name: &'a str,
    statement: &'a str,
    measured: f64,
    bound: f64,
    slack: f64,
    pass: bool,
    exact_comparator: bool,
}

#[derive(Debug, Serialize)]
struct RunJson<'a> {
    rounds: usize,
    gap: f64,
    certificates: Vec<CertificateJson<'a>>,
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    experiment: &'a str,
    method: &'a str,
    problem: &'a str,
    tolerance: f64,
    all_pass: bool,
    runs: Vec<RunJson<'a>>,
}

pub fn certificates_json(exp: &Experiment, results: &[RunResult]) -> Result<Vec<u8>> {
    let report = ReportJson {
        experiment: &exp.name,
        method: &exp.method,
        problem: &exp.problem.name,
        tolerance: CERTIFICATE_TOL,
        all_pass: results.iter().all(RunResult::all_pass),
        runs: results
            .iter()
            .map(|r| RunJson {
                rounds: r.rounds,
                gap: r.gap,
                certificates: r
                    .certificates
                    .iter()
                    .map(|c| CertificateJson {
                        name: c.name,
                        statement: c.statement,
                        measured: c.measured,
                        bound: c.bound,
                        slack: c.slack,
                        pass: c.pass,
                        exact_comparator: c.exact_comparator,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&report)?;
    out.push(b'\n');
    Ok(out)
}

/// One row of a trace CSV.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub alpha_t: f64,
    #[serde(rename = "A_t")]
    pub total: f64,
    pub f_xbar: f64,
    pub gap: f64,
    pub regret_x: f64,
    pub regret_y: f64,
    pub eps_bound: f64,
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != TRACE_HEADER {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.with_context(|| format!("{}: row {}", path.display(), i + 2)))
        .collect()
}

/// Result of re-checking a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceAudit {
    pub rows: usize,
    pub failures: Vec<String>,
}

/// Checks per row that `gap <= eps_bound`, that `eps_bound` equals
/// `(regret_x + regret_y) / A_t`, and that totals accumulate the weights.
pub fn audit_trace(rows: &[TraceRow]) -> TraceAudit {
    let mut failures = vec![];
    let mut prev_total = 0.0;
    for (i, r) in rows.iter().enumerate() {
        if r.t != i + 1 {
            failures.push(format!("row {}: round {} out of sequence", i + 1, r.t));
        }
        let total = prev_total + r.alpha_t;
        if (total - r.total).abs() > 1e-12 * r.total.abs().max(1.0) {
            failures.push(format!("t={}: A_t {} differs from accumulated weights {}", r.t, r.total, total));
        }
        prev_total = r.total;
        let eps = (r.regret_x + r.regret_y) / r.total;
        if (eps - r.eps_bound).abs() > 1e-9 * (1.0 + eps.abs()) {
            failures.push(format!("t={}: eps_bound {} inconsistent with regrets ({})", r.t, r.eps_bound, eps));
        }
        if r.eps_bound - r.gap < -CERTIFICATE_TOL * (1.0 + r.eps_bound.abs()) {
            failures.push(format!("t={}: gap {} exceeds bound {}", r.t, r.gap, r.eps_bound));
        }
    }
    TraceAudit { rows: rows.len(), failures }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub gap: f64,
    pub slope: Option<f64>,
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.with_context(|| format!("{}: row {}", path.display(), i + 2)))
        .collect()
}
