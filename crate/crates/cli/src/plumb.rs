use clap::Args;
use gluing_core::coords::NodeParams;
use gluing_core::plumbing::models::model;
use gluing_core::plumbing::plumb::chart_map_phi;
use gluing_core::plumbing::tree::StableTree;
use serde::{Deserialize, Serialize};

use crate::config;
use crate::coords::parse_complex;
use crate::error::{input, read_file, CliResult};
use crate::output::{emit, summary, to_json};

/// Plumbs a nodal configuration and prints its gauge-fixed moduli coordinates.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PlumbArgs {
    /// Tree file (JSON).
    #[arg(long, conflicts_with = "model")]
    pub tree: Option<String>,
    /// Built-in tree: two-sphere, disk-boundary-pair, disk-sphere-bubble or chain.
    #[arg(long)]
    pub model: Option<String>,
    /// Boundary gluing parameters in boundary-node order; zero when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Vec<f64>,
    /// Interior gluing parameters in interior-node order; zero when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Vec<String>,
    /// Marked-point positions; the tree's own when omitted.
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

pub fn load_tree(tree: &Option<String>, name: &Option<String>) -> CliResult<StableTree> {
    match (tree, name) {
        (Some(path), None) => Ok(StableTree::from_json(&read_file(path)?).map_err(|e| input(format!("{path}: {e}")))?),
        (None, Some(m)) => Ok(model(m)?),
        _ => Err(input("give exactly one of --tree and --model")),
    }
}

pub fn run(args: PlumbArgs) -> CliResult<u8> {
    let cfg = args.config.clone();
    let a = config::apply(args, cfg.as_deref())?;
    let tree = load_tree(&a.tree, &a.model)?;
    let topo = tree.topology();
    let (m_d, m_s) = (topo.m_d, topo.m_s);
    let mut params = NodeParams::zeros(m_d, m_s, tree.cutoff);
    if !a.r.is_empty() {
        params.boundary = a.r.clone();
    }
    if !a.sigma.is_empty() {
        params.interior = a
            .sigma
            .iter()
            .map(|s| parse_complex("sigma", s))
            .collect::<CliResult<_>>()?;
    }
    if params.boundary.len() != m_d || params.interior.len() != m_s {
        return Err(input(format!(
            "the tree has {m_d} boundary and {m_s} interior nodes, got {} --r and {} --sigma",
            params.boundary.len(),
            params.interior.len()
        )));
    }
    params.validate()?;
    let v = if a.v.is_empty() { tree.v() } else { a.v.clone() };
    let coords = chart_map_phi(&tree, &v, &params)?;
    emit(&to_json(&coords)?, a.out.as_deref())?;
    let flat: Vec<String> = coords
        .to_vec()
        .iter()
        .map(|x| gluing_core::estimates::csv::sig17(*x))
        .collect();
    summary(
        &[
            format!("nodes kept: {:?}", coords.nodes),
            format!("coordinates: [{}]", flat.join(", ")),
        ],
        a.out.is_some(),
    );
    Ok(0)
}
