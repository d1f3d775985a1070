//! Experiment configuration files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use fenchel_core::problems::{ProblemParams, PROBLEM_NAMES};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Output subdirectory under the output root; defaults to the file stem.
    pub output: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemConfig,
    pub method: MethodConfig,
    pub run: RunConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: String,
    pub dim: Option<usize>,
    pub kappa: Option<f64>,
    pub anchors: Option<usize>,
    pub temperature: Option<f64>,
    pub lambda: Option<f64>,
    pub radius: Option<f64>,
    pub unconstrained_norm: Option<f64>,
    pub center: Option<f64>,
}

/// The derived algorithms, plus a free pairing of strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    /// Optimistic FTL against gradient descent, constant steps.
    OptimisticGd,
    /// Optimistic FTL against gradient descent with `(t+1)/(8Lt)` steps.
    Nesterov83,
    /// FTL against gradient descent.
    HeavyBall,
    /// Optimistic FTL against mirror descent.
    OneMemory,
    /// Optimistic FTL against be-the-regularized-leader.
    InfiniteMemory,
    /// Optimistic FTL against proximal mirror descent.
    AcceleratedProx,
    /// Optimistic FTL against the gauge-regularized leader.
    AcceleratedFw,
    /// Optimistic FTL on the shifted objective against the strongly convex
    /// leader, with exponential weights.
    LinearRate,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YChoice {
    Oftl,
    Ftl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XChoice {
    MirrorDescent,
    Ogd,
    Btrl,
    ProxMd,
    StronglyConvexBtl,
    FwGauge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryChoice {
    Euclidean,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightChoice {
    Linear,
    Constant,
    Exponential,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: MethodName,
    /// Strategies for `custom`.
    pub y: Option<YChoice>,
    pub x: Option<XChoice>,
    pub geometry: Option<GeometryChoice>,
    /// Constant per-unit step; defaults to `1/(4L)`.
    pub gamma: Option<f64>,
    /// Leader parameter; defaults to `1/(4L)`.
    pub eta: Option<f64>,
    pub weights: Option<WeightChoice>,
    /// Weight for `constant` schedules.
    pub alpha: Option<f64>,
    /// Warmup weight for exponential schedules.
    pub warmup: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub rounds: Vec<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Field-level checks that the schema cannot express.
    pub fn check(&self) -> Result<()> {
        if !PROBLEM_NAMES.contains(&self.problem.name.as_str()) {
            bail!(
                "problem.name: unknown problem `{}` (known: {})",
                self.problem.name,
                PROBLEM_NAMES.join(", ")
            );
        }
        if self.run.rounds.is_empty() {
            bail!("run.rounds: at least one horizon is required");
        }
        if self.run.rounds.contains(&0) {
            bail!("run.rounds: horizons must be positive");
        }
        let custom = self.method.name == MethodName::Custom;
        if custom != (self.method.y.is_some() && self.method.x.is_some()) {
            bail!("method: `y` and `x` are required for `custom` and only allowed there");
        }
        if let Some(out) = &self.output {
            if out.is_empty() || out.contains(['/', '\\']) || out == "." || out == ".." {
                bail!("output: must be a plain directory name, got `{out}`");
            }
        }
        Ok(())
    }

    pub fn problem_params(&self) -> ProblemParams {
        let d = ProblemParams::default();
        let p = &self.problem;
        ProblemParams {
            dim: p.dim.unwrap_or(d.dim),
            kappa: p.kappa.unwrap_or(d.kappa),
            seed: self.seed,
            anchors: p.anchors.unwrap_or(d.anchors),
            temperature: p.temperature.unwrap_or(d.temperature),
            lambda: p.lambda.unwrap_or(d.lambda),
            radius: p.radius.unwrap_or(d.radius),
            unconstrained_norm: p.unconstrained_norm.unwrap_or(d.unconstrained_norm),
            center: p.center.unwrap_or(d.center),
        }
    }

    /// Sorted, deduplicated horizons.
    pub fn horizons(&self) -> Vec<usize> {
        let mut r = self.run.rounds.clone();
        r.sort_unstable();
        r.dedup();
        r
    }
}
