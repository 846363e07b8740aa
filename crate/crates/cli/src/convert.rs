use clap::Args;
use gluing_core::coords::DEFAULT_CUTOFF;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::coords::{CoordArgs, Coords, System};
use crate::error::{input, CliResult};
use crate::output::{emit, to_json};

/// Converts node coordinates between systems.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub from: System,
    #[arg(long, value_enum)]
    pub to: System,
    /// Chart cutoff c in (0, 1).
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub values: CoordArgs,
    /// JSON config overriding the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<String>,
    /// Also write the converted coordinates as JSON.
    #[arg(long)]
    pub out: Option<String>,
}

pub fn run(args: ConvertArgs) -> CliResult<u8> {
    let cfg = args.config.clone();
    let a = config::apply(args, cfg.as_deref())?;
    if a.values.is_empty() {
        return Err(input(format!("no {} coordinates given", a.from.name())));
    }
    let src = a.values.parse(a.from, a.cutoff)?;
    let out = Coords::from_log(&src.to_log()?, a.to)?;
    for l in out.lines() {
        println!("{l}");
    }
    if let Some(p) = &a.out {
        emit(&to_json(&out)?, Some(p))?;
    }
    Ok(0)
}
