use clap::Args;
use gluing_core::coords::RescaleFactor;
use gluing_core::jet::{classify_smoothness, SmoothnessReport, Tolerances};
use gluing_core::maps::{transition_map, RescaleMap, TransitionSystem};
use gluing_core::plumbing::models::PairSpec;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::coords::parse_complex;
use crate::error::{input, read_file, CliResult};
use crate::output::{emit, summary, to_json};

/// Classifies the smoothness of a named map at its base point.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClassifyArgs {
    /// single-log-rescale, double-log-rescale, corner-rescale, corner-double-rescale or transition:<pair-file>.
    #[arg(long)]
    pub map: String,
    /// Rescale factor, real or complex; ignored for transitions.
    #[arg(long, default_value = "2.718281828459045", allow_hyphen_values = true)]
    pub lambda: String,
    /// Highest jet order compared.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Coordinates of a transition map.
    #[arg(long, value_enum, default_value = "double-log")]
    pub system: SystemArg,
    /// Expected verdict: a full label, C<k>-not-C<k+1>, smooth or not-smooth.
    #[arg(long)]
    pub expect: Option<String>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub certify_factor: Option<f64>,
    /// Neighborhood radius for the step ladder.
    #[arg(long)]
    pub radius: Option<f64>,
    /// JSON config overriding the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<String>,
    /// Report file; stdout without one.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemArg {
    SingleLog,
    DoubleLog,
}

fn tolerances(a: &ClassifyArgs) -> CliResult<Tolerances> {
    let d = Tolerances::default();
    let t = Tolerances {
        atol: a.atol.unwrap_or(d.atol),
        rtol: a.rtol.unwrap_or(d.rtol),
        certify_factor: a.certify_factor.unwrap_or(d.certify_factor),
        radius: a.radius.unwrap_or(d.radius),
    };
    if !(t.atol >= 0.0 && t.rtol >= 0.0 && t.certify_factor >= 1.0 && t.radius > 0.0 && t.radius.is_finite()) {
        return Err(input(
            "tolerances need atol, rtol >= 0, certify-factor >= 1 and 0 < radius < inf",
        ));
    }
    Ok(t)
}

pub fn matches(expect: &str, report: &SmoothnessReport) -> bool {
    let smooth = report.verdict.is_smooth();
    match expect {
        "smooth" | "C^inf" | "consistent-with-C^inf" => smooth,
        "not-smooth" => !smooth,
        e => e == report.label,
    }
}

pub fn classify(a: &ClassifyArgs) -> CliResult<SmoothnessReport> {
    if !(1..=8).contains(&a.order) {
        return Err(input(format!("--order {} outside 1..=8", a.order)));
    }
    let tol = tolerances(a)?;
    let (f, x0) = if let Some(path) = a.map.strip_prefix("transition:") {
        let pair = PairSpec::from_json(&read_file(path)?)?.build()?;
        let system = match a.system {
            SystemArg::SingleLog => TransitionSystem::SingleLog,
            SystemArg::DoubleLog => TransitionSystem::DoubleLog,
        };
        transition_map(&pair, system)?
    } else {
        let lambda = RescaleFactor::new(parse_complex("lambda", &a.lambda)?)?;
        RescaleMap::from_name(&a.map)?.build(lambda)?
    };
    Ok(classify_smoothness(&*f, &x0, a.order, tol)?)
}

pub fn run(args: ClassifyArgs) -> CliResult<u8> {
    let cfg = args.config.clone();
    let a = config::apply(args, cfg.as_deref())?;
    let report = classify(&a)?;
    emit(&to_json(&report)?, a.out.as_deref())?;
    let mut lines = vec![format!("verdict: {}", report.label)];
    let code = match &a.expect {
        Some(e) if matches(e, &report) => 0,
        Some(e) => {
            lines.push(format!("expected {e}"));
            3
        }
        None => 0,
    };
    summary(&lines, a.out.is_some());
    Ok(code)
}
