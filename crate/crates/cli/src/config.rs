//! Job configuration shared by command-line flags and JSON job files.
//!
//! Every parameter is optional at this level so that a job file can supply
//! what the command line leaves out. Defaults are applied when the job runs.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "DSTRIPS_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "dstrips", version, about = "Dirichlet series, zero-free strips and scans")]
pub struct Cli {
    /// JSON job file. Flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Sum exactly N terms instead of choosing N from an error target.
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// Worker threads (default: $DSTRIPS_WORKERS, else all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the main output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for commands that draw random data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the merged job as JSON and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Three-term combination on sigma in [7, 22].
    Figure1,
    /// Two-term combination on sigma in [1.01, 16.01].
    Figure2,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Character table with conductors, parities and root numbers.
    Chars(CharsArgs),
    /// Evaluate a series at one point.
    Eval(EvalArgs),
    /// Minimum of |L(sigma + it)| over t for each sigma.
    Scan(ScanArgs),
    /// Count, refine or bracket zeros.
    Zeros(ZerosArgs),
    /// Build a combination with prescribed real zeros and zero-free strips.
    Holes(HolesArgs),
    /// Construction for characters sharing a functional equation.
    Funceq(FuncEqArgs),
    /// Radii of convexity R1, R2(K), R3(K).
    Radii(RadiiArgs),
    /// Torus averages and local-factor integrals.
    Torus(TorusArgs),
    /// Recompute the published constants and figures, PASS/FAIL per item.
    VerifyPaper(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chars(_) => "chars",
            Command::Eval(_) => "eval",
            Command::Scan(_) => "scan",
            Command::Zeros(_) => "zeros",
            Command::Holes(_) => "holes",
            Command::Funceq(_) => "funceq",
            Command::Radii(_) => "radii",
            Command::Torus(_) => "torus",
            Command::VerifyPaper(_) => "verify-paper",
        }
    }
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharsArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub primitive_only: bool,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Absolute error target.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    /// Fill series and ranges from a published figure.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    /// lo:hi:step
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    /// lo:hi:step
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Strip detection level (default 10x the largest tail bound).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Also scan negative t.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub symmetric: bool,
    /// Two-column `sigma min_modulus` file for plotting.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    /// Rectangle s1,s2,t1,t2 for an argument-principle count.
    #[arg(long = "box", allow_hyphen_values = true)]
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub rect: Option<String>,
    /// Newton refinement from this complex seed.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<String>,
    /// Estimate the supremum of real parts of zeros over --sigma x --t.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub sigma_star: bool,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolesArgs {
    /// Comma separated series specs.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    /// Place the zeros here instead of searching.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_t: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_step: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_sigma: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip_width: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_step: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_cap: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuncEqArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    /// Canonical character indices, comma separated.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chars: Option<String>,
    /// Real parameters, N - 2 of them.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_t: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_step: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiiArgs {
    /// Comma separated K values (default: 50 log-spaced in [1e-4, 1e4]).
    #[arg(long = "K")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusArgs {
    #[command(subcommand)]
    #[serde(flatten)]
    pub mode: TorusMode,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum TorusMode {
    /// Time average of a trigonometric polynomial against its torus integral.
    Kw(KwArgs),
    /// Local-factor integrals k0, k1, k2 and their bounds.
    Kappa(KappaArgs),
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KwArgs {
    /// Frequencies lambda_j, comma separated.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freqs: Option<String>,
    /// Use lambda_j = log p_j for these primes.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<String>,
    /// Terms `k1,k2,...=coef` separated by `;` (default: random from --seed).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[arg(long = "T")]
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaArgs {
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Complex point y, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Full-resolution scans (slow) instead of the coarse grids.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub full: bool,
    /// Comma separated subset of item names.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub only: Option<String>,
}

/// A complete job: what to run and how to emit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub job: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: u64,
}

impl JobConfig {
    pub fn new(job: Command) -> Self {
        Self { job, terms: None, workers: None, out: None, format: None, seed: 0 }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn from_json(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::validation("Config", e.to_string()))
    }

    /// The part of the job that determines the numbers: worker count and
    /// output locations are dropped.
    pub fn canonical(&self) -> JobConfig {
        let mut c = self.clone();
        c.workers = None;
        c.out = None;
        if let Command::Scan(s) = &mut c.job {
            s.plot = None;
        }
        c
    }

    pub fn workers(&self) -> Option<usize> {
        self.workers.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
    }
}

fn overlay(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                if v.is_null() {
                    continue;
                }
                match b.get_mut(&k) {
                    Some(slot @ Value::Object(_)) if v.is_object() => overlay(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

impl Cli {
    /// Merge the job file (if any) with the flags; flags win.
    pub fn job(&self) -> Result<JobConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let src = std::fs::read_to_string(path)
                    .map_err(|e| CliError::validation("Config", format!("{}: {e}", path.display())))?;
                Some(JobConfig::from_json(&src)?)
            }
            None => None,
        };
        let job = match (&self.command, &file) {
            (Some(c), Some(f)) if c.name() != f.job.name() => {
                return Err(CliError::validation(
                    "Config",
                    format!("command line runs `{}` but the job file runs `{}`", c.name(), f.job.name()),
                ))
            }
            (Some(c), _) => c.clone(),
            (None, Some(f)) => f.job.clone(),
            (None, None) => return Err(CliError::validation("Config", "no command given".into())),
        };
        let flags = JobConfig {
            job,
            terms: self.terms,
            workers: self.workers,
            out: self.out.clone(),
            format: self.format,
            seed: self.seed.unwrap_or_default(),
        };
        let Some(file) = file else { return Ok(flags) };
        let mut merged = serde_json::to_value(&file).expect("config serialises");
        let mut top = serde_json::to_value(&flags).expect("config serialises");
        if self.seed.is_none() {
            top.as_object_mut().expect("object").remove("seed");
        }
        overlay(&mut merged, top);
        serde_json::from_value(merged).map_err(|e| CliError::validation("Config", e.to_string()))
    }
}
