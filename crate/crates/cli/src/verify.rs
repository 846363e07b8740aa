use clap::Args;
use gluing_core::estimates::csv::to_csv;
use gluing_core::estimates::{run_suite, EstimateKind, SuiteConfig};
use gluing_core::plumbing::models::PairSpec;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{input, read_file, CliResult};
use crate::output::{emit, summary};

/// Samples and fits the decay estimates of a chart pair.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// Pair description (JSON).
    #[arg(long)]
    pub pair: String,
    /// Estimate families, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub estimates: Vec<String>,
    /// Highest derivative order.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Smallest decay rate accepted.
    #[arg(long)]
    pub c_min: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Spacing of the default grid.
    #[arg(long)]
    pub step: Option<f64>,
    /// Range of S = 1/|phi| for the corner lines.
    #[arg(long)]
    pub corner_min: Option<f64>,
    #[arg(long)]
    pub corner_max: Option<f64>,
    /// Marked-point samples, the center included.
    #[arg(long)]
    pub v_samples: Option<usize>,
    #[arg(long)]
    pub v_jitter: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Central-difference step.
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// JSON config overriding the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<String>,
    /// CSV file; stdout without one.
    #[arg(long)]
    pub out: Option<String>,
}

pub fn suite_config(a: &VerifyArgs) -> CliResult<SuiteConfig> {
    let d = SuiteConfig::default();
    let cfg = SuiteConfig {
        n_max: a.n_max.unwrap_or(d.n_max),
        c_min: a.c_min.unwrap_or(d.c_min),
        t_range: (a.t_min.unwrap_or(d.t_range.0), a.t_max.unwrap_or(d.t_range.1)),
        step: a.step.unwrap_or(d.step),
        corner_range: (
            a.corner_min.unwrap_or(d.corner_range.0),
            a.corner_max.unwrap_or(d.corner_range.1),
        ),
        v_samples: a.v_samples.unwrap_or(d.v_samples),
        v_jitter: a.v_jitter.unwrap_or(d.v_jitter),
        seed: a.seed.unwrap_or(d.seed),
        fd_step: a.fd_step.unwrap_or(d.fd_step),
        estimates: a
            .estimates
            .iter()
            .map(|s| EstimateKind::from_id(s.trim()))
            .collect::<Result<_, _>>()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: VerifyArgs) -> CliResult<u8> {
    let cfg = args.config.clone();
    let a = config::apply(args, cfg.as_deref())?;
    let suite = suite_config(&a)?;
    let pair = PairSpec::from_json(&read_file(&a.pair)?)
        .and_then(|s| s.build())
        .map_err(|e| input(format!("{}: {e}", a.pair)))?;
    let report = run_suite(&pair, &suite)?;
    emit(&to_csv(&report.results), a.out.as_deref())?;
    let mut lines: Vec<String> = report
        .summary()
        .into_iter()
        .zip(&report.results)
        .map(|(s, r)| format!("{} {s}", if r.passed() { "PASS" } else { "FAIL" }))
        .collect();
    let failed = report.results.iter().filter(|r| !r.passed()).count();
    lines.push(format!(
        "{} of {} estimate lines passed ({} transition solves)",
        report.results.len() - failed,
        report.results.len(),
        report.solves
    ));
    summary(&lines, a.out.is_some());
    Ok(if failed == 0 { 0 } else { 4 })
}
