//! Numerical verification of the decay estimates satisfied by chart
//! transitions between twin centers.
//!
//! Every estimate bounds a derivative of a coordinate difference
//! (`T^p - T^q`, `theta^p - theta^q`, `S^p - S^q`, ...) by `C e^{-c x}` for
//! an abscissa `x` built from the `T` or `S` coordinates. Quantities are
//! sampled along the diagonal of a grid, where every node shares the grid
//! value, and `log |q|` is fitted against `x`.

pub mod angular;
pub mod csv;
pub mod eval;
pub mod fit;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::coords::NodeRef;
use crate::error::{Error, Result};
use crate::plumbing::tree::{NodeKind, StableTree};

pub use angular::{estimate_angular_offset, AngularOffset};
pub use eval::{BasePoint, Evaluator, State};
pub use fit::{DecayFit, FitVerdict, HalvingCheck};
pub use suite::{run_suite, sample_estimate, verify_corner_gap, EstimateResult, SuiteConfig, SuiteReport};

/// The eight estimate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    /// Derivatives of `T^p - T^q` (and of `theta^p - theta^q`) decay like `e^{-c T}`.
    LogGap,
    /// Mixed `T_{i0}` derivatives of `theta^p_{i0} - theta^q_{i0}` decay like `e^{-c (T + T_{i0})}`.
    AngleGapMixed,
    /// `v`-derivatives of `S^p - S^q` decay like `1/T = e^{-S}`.
    DoubleLogGap,
    /// Derivatives of `S^p_{j0} - S^q_{j0}` in the double-log variables.
    BoundaryDoubleLogGap,
    /// Derivatives of `S^p_{i0} - S^q_{i0}` in the double-log variables.
    InteriorDoubleLogGap,
    /// Derivatives of the angular offset `f_{i0}`.
    AngularOffsetDrift,
    /// Derivatives of `theta^p_{i0} - theta^q_{i0} - f_{i0}`.
    AngleGapResidual,
    /// `s^p - s^q` and `phi^p - e^{i f} phi^q` decay like `e^{-c/s}`, `e^{-c/|phi|}`.
    CornerGap,
}

impl EstimateKind {
    pub const ALL: [EstimateKind; 8] = [
        EstimateKind::LogGap,
        EstimateKind::AngleGapMixed,
        EstimateKind::DoubleLogGap,
        EstimateKind::BoundaryDoubleLogGap,
        EstimateKind::InteriorDoubleLogGap,
        EstimateKind::AngularOffsetDrift,
        EstimateKind::AngleGapResidual,
        EstimateKind::CornerGap,
    ];

    pub fn id(self) -> &'static str {
        match self {
            EstimateKind::LogGap => "log-gap",
            EstimateKind::AngleGapMixed => "angle-gap-mixed",
            EstimateKind::DoubleLogGap => "double-log-gap",
            EstimateKind::BoundaryDoubleLogGap => "boundary-double-log-gap",
            EstimateKind::InteriorDoubleLogGap => "interior-double-log-gap",
            EstimateKind::AngularOffsetDrift => "angular-offset-drift",
            EstimateKind::AngleGapResidual => "angle-gap-residual",
            EstimateKind::CornerGap => "corner-gap",
        }
    }

    pub fn from_id(s: &str) -> Result<EstimateKind> {
        EstimateKind::ALL.into_iter().find(|k| k.id() == s).ok_or_else(|| {
            let ids: Vec<&str> = EstimateKind::ALL.iter().map(|k| k.id()).collect();
            Error::Domain(format!("unknown estimate '{s}', expected one of {}", ids.join(", ")))
        })
    }
}

/// A coordinate of the `q` chart; node indices are in tree order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "axis", content = "index", rename_all = "lowercase")]
pub enum Axis {
    /// Entry of the marked-point vector `v`.
    V(usize),
    T(usize),
    /// `S = log T`.
    S(usize),
    Theta(usize),
}

impl Axis {
    pub fn node(self) -> Option<usize> {
        match self {
            Axis::V(_) => None,
            Axis::T(e) | Axis::S(e) | Axis::Theta(e) => Some(e),
        }
    }
}

/// The differenced coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "target", content = "node", rename_all = "kebab-case")]
pub enum Target {
    /// `T^p - T^q`.
    LogGap(usize),
    /// `theta^p - theta^q`.
    AngleGap(usize),
    /// `S^p - S^q`.
    DoubleLogGap(usize),
    /// `s^p - s^q` with `s = 1/S`.
    CornerS(usize),
    /// `phi^p - e^{i f} phi^q`.
    CornerPhi(usize),
}

impl Target {
    pub fn node(self) -> usize {
        match self {
            Target::LogGap(e)
            | Target::AngleGap(e)
            | Target::DoubleLogGap(e)
            | Target::CornerS(e)
            | Target::CornerPhi(e) => e,
        }
    }

    /// Affine in the offsets, so constant parts cancel under annihilation.
    pub fn is_linear(self) -> bool {
        matches!(self, Target::LogGap(_) | Target::AngleGap(_))
    }
}

/// Fit abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "abscissa", content = "nodes", rename_all = "kebab-case")]
pub enum Abscissa {
    T(usize),
    SumT(usize, usize),
    S(usize),
    TwiceS(usize),
}

impl Abscissa {
    pub fn eval(self, t: &[f64]) -> f64 {
        match self {
            Abscissa::T(e) => t[e],
            Abscissa::SumT(a, b) => t[a] + t[b],
            Abscissa::S(e) => t[e].ln(),
            Abscissa::TwiceS(e) => 2.0 * t[e].ln(),
        }
    }
}

/// How a grid value sets the node coordinates: `T = g` or `S = g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    T,
    S,
}

/// Variables of the outer `n - 1` derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterVars {
    /// `v`, every `T`, every interior `theta`.
    LogVars,
    /// `v` only.
    MarkedOnly,
    /// `v`, every `S`, every interior `theta`.
    DoubleLogVars,
}

/// Which piece of the target a line measures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// The target itself.
    #[default]
    Whole,
    /// The target with every node held nodal.
    Limit,
    /// The target minus its limit.
    Remainder,
}

/// Left-hand side of one estimate line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantitySpec {
    pub kind: EstimateKind,
    /// Total derivative order: the inner derivatives plus `n - 1` outer ones.
    pub n: usize,
    pub target: Target,
    /// Inner derivatives, applied in every sample.
    pub inner: Vec<Axis>,
    /// Nodes held nodal (`sigma = 0`) when evaluating the target.
    pub nodal: Vec<usize>,
    /// Nodes whose `sigma = 0` values are subtracted by inclusion-exclusion.
    /// Each must be the node of an inner derivative, or the target of an
    /// angle residual, so the quantity is unchanged.
    pub annihilate: Vec<usize>,
    #[serde(default)]
    pub part: Part,
    pub outer: OuterVars,
    pub abscissa: Abscissa,
    pub grid: GridKind,
    /// Short human-readable line label, without commas.
    pub label: String,
}

pub const MAX_ORDER: usize = 4;

impl QuantitySpec {
    pub fn id(&self) -> String {
        format!("{}:{}", self.kind.id(), self.label)
    }

    pub fn validate(&self, tree: &StableTree) -> Result<()> {
        let nn = tree.nodes.len();
        let bad = |m: String| Err(Error::Domain(format!("{}: {m}", self.id())));
        if !(1..=MAX_ORDER).contains(&self.n) {
            return bad(format!("derivative order n = {} outside 1..={MAX_ORDER}", self.n));
        }
        let node_ok = |e: usize| e < nn;
        let interior = |e: usize| node_ok(e) && tree.nodes[e].kind == NodeKind::Interior;
        if !node_ok(self.target.node()) {
            return bad(format!("target node {} does not exist", self.target.node()));
        }
        if matches!(self.target, Target::AngleGap(e) | Target::CornerPhi(e) if !interior(e)) {
            return bad("angle targets need an interior node".into());
        }
        for a in &self.inner {
            match *a {
                Axis::V(k) if k >= tree.v_len() => return bad(format!("v index {k} out of range")),
                Axis::Theta(e) if !interior(e) => return bad(format!("theta axis on non-interior node {e}")),
                Axis::T(e) | Axis::S(e) if !node_ok(e) => return bad(format!("node {e} does not exist")),
                _ => {}
            }
        }
        for &e in self.nodal.iter().chain(&self.annihilate) {
            if !node_ok(e) {
                return bad(format!("node {e} does not exist"));
            }
        }
        if self.part != Part::Whole && !(self.annihilate.is_empty() && self.nodal.is_empty()) {
            return bad("limit and remainder parts take no nodal or annihilated nodes".into());
        }
        Ok(())
    }
}

/// Node names `b<j>` and `i<k>` by slot.
pub fn node_names(tree: &StableTree) -> Vec<String> {
    tree.topology()
        .slot
        .iter()
        .map(|s| match *s {
            NodeRef::Boundary(j) => format!("b{j}"),
            NodeRef::Interior(k) => format!("i{k}"),
        })
        .collect()
}

fn axis_label(a: Axis, names: &[String]) -> String {
    match a {
        Axis::V(k) => format!("dv{k}"),
        Axis::T(e) => format!("dT{}", names[e]),
        Axis::S(e) => format!("dS{}", names[e]),
        Axis::Theta(e) => format!("dtheta{}", names[e]),
    }
}

fn target_label(t: Target, names: &[String]) -> String {
    match t {
        Target::LogGap(e) => format!("T{}", names[e]),
        Target::AngleGap(e) => format!("theta{}", names[e]),
        Target::DoubleLogGap(e) => format!("S{}", names[e]),
        Target::CornerS(e) => format!("s{}", names[e]),
        Target::CornerPhi(e) => format!("phi{}", names[e]),
    }
}

fn dedup(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Every estimate line of the eight families for the given tree, at orders `1..=n_max`.
pub fn standard_suite(tree: &StableTree, n_max: usize) -> Result<Vec<QuantitySpec>> {
    if !(1..=MAX_ORDER).contains(&n_max) {
        return Err(Error::Domain(format!("n_max = {n_max} outside 1..={MAX_ORDER}")));
    }
    let names = node_names(tree);
    let nodes: Vec<usize> = (0..tree.nodes.len()).collect();
    let boundary: Vec<usize> = nodes
        .iter()
        .copied()
        .filter(|&e| tree.nodes[e].kind == NodeKind::Boundary)
        .collect();
    let interior: Vec<usize> = nodes
        .iter()
        .copied()
        .filter(|&e| tree.nodes[e].kind == NodeKind::Interior)
        .collect();
    let log_vars: Vec<Axis> = nodes
        .iter()
        .map(|&e| Axis::T(e))
        .chain(interior.iter().map(|&e| Axis::Theta(e)))
        .collect();
    let dlog_vars: Vec<Axis> = nodes
        .iter()
        .map(|&e| Axis::S(e))
        .chain(interior.iter().map(|&e| Axis::Theta(e)))
        .collect();
    let node_of = |a: Axis| a.node().expect("node axis");

    let mut lines = Vec::new();
    let mut push = |kind: EstimateKind,
                    target: Target,
                    inner: Vec<Axis>,
                    nodal: Vec<usize>,
                    annihilate: Vec<usize>,
                    part: Part,
                    outer: OuterVars,
                    abscissa: Abscissa,
                    grid: GridKind,
                    suffix: &str| {
        let mut label = target_label(target, &names) + suffix;
        for a in &inner {
            label.push('/');
            label.push_str(&axis_label(*a, &names));
        }
        lines.push(QuantitySpec {
            kind,
            n: 1,
            target,
            inner,
            nodal,
            annihilate: dedup(annihilate),
            part,
            outer,
            abscissa,
            grid,
            label,
        });
    };

    let log_targets: Vec<Target> = nodes
        .iter()
        .map(|&e| Target::LogGap(e))
        .chain(interior.iter().map(|&e| Target::AngleGap(e)))
        .collect();
    for &t in &log_targets {
        for &a in &log_vars {
            let k = node_of(a);
            push(
                EstimateKind::LogGap,
                t,
                vec![a],
                vec![],
                vec![k],
                Part::Whole,
                OuterVars::LogVars,
                Abscissa::T(k),
                GridKind::T,
                "",
            );
        }
    }
    for &i0 in &interior {
        for &a in &log_vars {
            let k = node_of(a);
            push(
                EstimateKind::AngleGapMixed,
                Target::AngleGap(i0),
                vec![a, Axis::T(i0)],
                vec![],
                vec![k, i0],
                Part::Whole,
                OuterVars::LogVars,
                Abscissa::SumT(k, i0),
                GridKind::T,
                "",
            );
        }
    }
    for &k0 in &nodes {
        for (part, abscissa, suffix) in [
            (Part::Whole, Abscissa::S(k0), ""),
            (Part::Limit, Abscissa::S(k0), "-limit"),
            (Part::Remainder, Abscissa::T(k0), "-remainder"),
        ] {
            push(
                EstimateKind::DoubleLogGap,
                Target::DoubleLogGap(k0),
                vec![],
                vec![],
                vec![],
                part,
                OuterVars::MarkedOnly,
                abscissa,
                GridKind::T,
                suffix,
            );
        }
    }
    for (kind, targets) in [
        (EstimateKind::BoundaryDoubleLogGap, &boundary),
        (EstimateKind::InteriorDoubleLogGap, &interior),
    ] {
        for &k0 in targets {
            for &a in &dlog_vars {
                let k = node_of(a);
                if a == Axis::S(k0) {
                    for (part, abscissa, suffix) in [
                        (Part::Whole, Abscissa::TwiceS(k0), ""),
                        (Part::Limit, Abscissa::TwiceS(k0), "-limit"),
                        (Part::Remainder, Abscissa::T(k0), "-remainder"),
                    ] {
                        push(
                            kind,
                            Target::DoubleLogGap(k0),
                            vec![a],
                            vec![],
                            vec![],
                            part,
                            OuterVars::DoubleLogVars,
                            abscissa,
                            GridKind::T,
                            suffix,
                        );
                    }
                } else {
                    push(
                        kind,
                        Target::DoubleLogGap(k0),
                        vec![a],
                        vec![],
                        vec![k],
                        Part::Whole,
                        OuterVars::DoubleLogVars,
                        Abscissa::SumT(k, k0),
                        GridKind::T,
                        "",
                    );
                }
            }
        }
    }
    for &i0 in &interior {
        for &a in &dlog_vars {
            let k = node_of(a);
            if k == i0 {
                continue;
            }
            push(
                EstimateKind::AngularOffsetDrift,
                Target::AngleGap(i0),
                vec![a],
                vec![i0],
                vec![k],
                Part::Whole,
                OuterVars::DoubleLogVars,
                Abscissa::T(k),
                GridKind::T,
                "-limit",
            );
        }
        for &a in &dlog_vars {
            let k = node_of(a);
            push(
                EstimateKind::AngleGapResidual,
                Target::AngleGap(i0),
                vec![a],
                vec![],
                vec![k, i0],
                Part::Whole,
                OuterVars::DoubleLogVars,
                Abscissa::SumT(k, i0),
                GridKind::T,
                "-residual",
            );
        }
    }
    for &j0 in &boundary {
        push(
            EstimateKind::CornerGap,
            Target::CornerS(j0),
            vec![],
            vec![],
            vec![],
            Part::Whole,
            OuterVars::DoubleLogVars,
            Abscissa::S(j0),
            GridKind::S,
            "",
        );
    }
    for &i0 in &interior {
        push(
            EstimateKind::CornerGap,
            Target::CornerPhi(i0),
            vec![],
            vec![],
            vec![],
            Part::Whole,
            OuterVars::DoubleLogVars,
            Abscissa::S(i0),
            GridKind::S,
            "",
        );
    }

    let split = |l: &QuantitySpec| {
        lines
            .iter()
            .any(|m| m.part == Part::Limit && m.kind == l.kind && m.target == l.target && m.inner == l.inner)
    };
    let mut out = Vec::new();
    for n in 1..=n_max {
        for l in &lines {
            if n > 1 && l.part == Part::Whole && split(l) {
                continue;
            }
            out.push(QuantitySpec { n, ..l.clone() });
        }
    }
    Ok(out)
}

/// `5, 5 + step, ..., 40`.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| lo + step * i as f64).collect()
}

/// The default grid `{5, 7.5, ..., 40}`.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(5.0, 40.0, 2.5)
}

/// The default grid with its spacing halved.
pub fn halved_grid() -> Vec<f64> {
    uniform_grid(5.0, 40.0, 1.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::models::chain;

    #[test]
    fn suite_lines_are_valid_and_labelled() {
        let t = chain();
        let s = standard_suite(&t, 2).unwrap();
        for q in &s {
            q.validate(&t).unwrap();
            assert!(!q.id().contains(','));
        }
        for k in EstimateKind::ALL {
            assert!(s.iter().any(|q| q.kind == k), "{k:?} missing");
            assert_eq!(EstimateKind::from_id(k.id()).unwrap(), k);
        }
        let ids: std::collections::HashSet<(String, usize)> = s.iter().map(|q| (q.id(), q.n)).collect();
        assert_eq!(ids.len(), s.len());
    }

    #[test]
    fn grids() {
        assert_eq!(default_grid().len(), 15);
        let h = halved_grid();
        assert_eq!(h.len(), 29);
        let d = default_grid();
        for (k, g) in d.iter().enumerate() {
            assert_eq!(h[2 * k], *g);
        }
    }
}
