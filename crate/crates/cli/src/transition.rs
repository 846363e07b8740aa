use clap::Args;
use gluing_core::coords::{DoubleLogCoords, SingleLogCoords};
use gluing_core::plumbing::models::PairSpec;
use gluing_core::plumbing::transition::{chart_transition, chart_transition_log, chart_transition_single_log};
use serde::{Deserialize, Serialize};

use crate::config;
use crate::coords::{CoordArgs, Coords, System};
use crate::error::{input, read_file, CliResult};
use crate::output::{emit, summary, to_json};

/// Maps a point of the q chart of a pair into the p chart.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TransitionArgs {
    /// Pair description (JSON).
    #[arg(long)]
    pub pair: String,
    /// Coordinates of the input and output points (not raw).
    #[arg(long, value_enum, default_value = "double-log")]
    pub system: System,
    /// q's node coordinates; the deepest corner when omitted.
    #[command(flatten)]
    #[serde(flatten)]
    pub values: CoordArgs,
    /// Marked-point positions; q's own when omitted.
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    pub v: Vec<f64>,
    /// JSON config overriding the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<String>,
    /// Output file; stdout without one.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Serialize)]
struct TransitionOutput {
    q: Coords,
    p: Coords,
    v: Vec<f64>,
    iterations: usize,
    residual: f64,
}

pub fn run(args: TransitionArgs) -> CliResult<u8> {
    let cfg = args.config.clone();
    let a = config::apply(args, cfg.as_deref())?;
    if a.system == System::Raw {
        return Err(input(
            "transitions are evaluated in log, single-log or double-log coordinates",
        ));
    }
    let pair = PairSpec::from_json(&read_file(&a.pair)?)
        .and_then(|s| s.build())
        .map_err(|e| input(format!("{}: {e}", a.pair)))?;
    let topo = pair.q.topology();
    let cutoff = pair.q.cutoff;
    let q = if a.values.is_empty() {
        Coords::corner(a.system, topo.m_d, topo.m_s, cutoff)
    } else {
        a.values.parse(a.system, cutoff)?
    };
    if q.counts() != (topo.m_d, topo.m_s) {
        return Err(input(format!(
            "the pair has {} boundary and {} interior nodes, got {:?}",
            topo.m_d,
            topo.m_s,
            q.counts()
        )));
    }
    let v = if a.v.is_empty() { pair.q.v() } else { a.v.clone() };
    let (lp, tr) = chart_transition_log(&pair.p, &pair.q, &v, &q.to_log()?)?;
    let p = match &q {
        Coords::DoubleLog(d) => {
            let (_, out): (_, DoubleLogCoords) = chart_transition(&pair.p, &pair.q, d, &v)?;
            Coords::DoubleLog(out)
        }
        Coords::SingleLog(s) => {
            let (_, out): (_, SingleLogCoords) = chart_transition_single_log(&pair.p, &pair.q, s, &v)?;
            Coords::SingleLog(out)
        }
        _ => Coords::Log(lp),
    };
    let lines = p.lines();
    let out = TransitionOutput {
        q,
        p,
        v,
        iterations: tr.iterations,
        residual: tr.residual,
    };
    emit(&to_json(&out)?, a.out.as_deref())?;
    summary(&lines, a.out.is_some());
    Ok(0)
}
