//! Built-in desk-scale centers and chart pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::CoordFamily;
use super::tree::{Component, ComponentKind, MarkKind, Marked, Node, NodeKind, Signature, StableTree};
use crate::coords::DEFAULT_CUTOFF;
use crate::error::{Error, Result};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn comp(kind: ComponentKind, name: &str) -> Component {
    Component {
        kind,
        name: Some(name.to_string()),
    }
}

fn node(kind: NodeKind, parent: usize, child: usize, zp: Complex64, zc: Complex64) -> Node {
    Node {
        kind,
        parent,
        child,
        parent_position: zp,
        child_position: zc,
        parent_family: CoordFamily::identity(),
        child_family: CoordFamily::identity(),
    }
}

fn mark(kind: MarkKind, index: usize, component: usize, z: Complex64) -> Marked {
    Marked {
        kind,
        index,
        component,
        position: z,
    }
}

/// Two spheres glued at `0/0`, marked `{1, -1}` on each.
pub fn two_sphere() -> StableTree {
    StableTree {
        signature: Signature {
            boundary: 0,
            interior: 4,
        },
        cutoff: DEFAULT_CUTOFF,
        components: vec![comp(ComponentKind::Sphere, "root"), comp(ComponentKind::Sphere, "leaf")],
        root: 0,
        nodes: vec![node(NodeKind::Interior, 0, 1, c(0.0, 0.0), c(0.0, 0.0))],
        marked: vec![
            mark(MarkKind::Interior, 0, 0, c(1.0, 0.0)),
            mark(MarkKind::Interior, 1, 0, c(-1.0, 0.0)),
            mark(MarkKind::Interior, 2, 1, c(1.0, 0.0)),
            mark(MarkKind::Interior, 3, 1, c(-1.0, 0.0)),
        ],
    }
}

/// Two disks joined by one boundary node, four boundary points.
pub fn disk_boundary_pair() -> StableTree {
    StableTree {
        signature: Signature {
            boundary: 4,
            interior: 0,
        },
        cutoff: DEFAULT_CUTOFF,
        components: vec![comp(ComponentKind::Disk, "root"), comp(ComponentKind::Disk, "leaf")],
        root: 0,
        nodes: vec![node(NodeKind::Boundary, 0, 1, c(0.0, 0.0), c(0.0, 0.0))],
        marked: vec![
            mark(MarkKind::Boundary, 0, 0, c(-1.0, 0.0)),
            mark(MarkKind::Boundary, 1, 1, c(1.0, 0.0)),
            mark(MarkKind::Boundary, 2, 1, c(-1.0, 0.0)),
            mark(MarkKind::Boundary, 3, 0, c(1.0, 0.0)),
        ],
    }
}

/// A disk with one boundary point and a sphere bubble carrying two interior points.
pub fn disk_sphere_bubble() -> StableTree {
    StableTree {
        signature: Signature {
            boundary: 1,
            interior: 2,
        },
        cutoff: DEFAULT_CUTOFF,
        components: vec![comp(ComponentKind::Disk, "root"), comp(ComponentKind::Sphere, "bubble")],
        root: 0,
        nodes: vec![node(NodeKind::Interior, 0, 1, c(0.0, 1.0), c(0.0, 0.0))],
        marked: vec![
            mark(MarkKind::Boundary, 0, 0, c(0.0, 0.0)),
            mark(MarkKind::Interior, 0, 1, c(1.0, 0.0)),
            mark(MarkKind::Interior, 1, 1, c(-1.0, 0.0)),
        ],
    }
}

/// Root disk, a middle disk on a boundary node, and a sphere on an interior
/// node of the middle disk.
pub fn chain() -> StableTree {
    StableTree {
        signature: Signature {
            boundary: 2,
            interior: 2,
        },
        cutoff: DEFAULT_CUTOFF,
        components: vec![
            comp(ComponentKind::Disk, "root"),
            comp(ComponentKind::Disk, "middle"),
            comp(ComponentKind::Sphere, "bubble"),
        ],
        root: 0,
        nodes: vec![
            node(NodeKind::Boundary, 0, 1, c(0.0, 0.0), c(0.0, 0.0)),
            node(NodeKind::Interior, 1, 2, c(0.0, 1.0), c(0.0, 0.0)),
        ],
        marked: vec![
            mark(MarkKind::Boundary, 0, 0, c(-1.0, 0.0)),
            mark(MarkKind::Boundary, 1, 0, c(1.0, 0.0)),
            mark(MarkKind::Interior, 0, 2, c(1.0, 0.0)),
            mark(MarkKind::Interior, 1, 2, c(-1.0, 0.0)),
        ],
    }
}

pub const MODEL_NAMES: [&str; 4] = ["two-sphere", "disk-boundary-pair", "disk-sphere-bubble", "chain"];

pub fn model(name: &str) -> Result<StableTree> {
    match name {
        "two-sphere" => Ok(two_sphere()),
        "disk-boundary-pair" => Ok(disk_boundary_pair()),
        "disk-sphere-bubble" => Ok(disk_sphere_bubble()),
        "chain" => Ok(chain()),
        _ => Err(Error::Domain(format!(
            "unknown model '{name}', expected one of {}",
            MODEL_NAMES.join(", ")
        ))),
    }
}

/// Two chart centers over the same nodal configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPair {
    pub p: StableTree,
    pub q: StableTree,
}

/// `p` keeps the families of `tree`; `q` divides every child-branch `lambda`
/// by `lambda`, so that `sigma_p = lambda sigma_q` at every node.
pub fn rescale_pair(tree: &StableTree, lambda: Complex64) -> Result<ChartPair> {
    if !(lambda.norm() > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "rescale factor {lambda} must be finite and nonzero"
        )));
    }
    let mut q = tree.clone();
    for n in &mut q.nodes {
        if n.kind == NodeKind::Boundary && !(lambda.im == 0.0 && lambda.re > 0.0) {
            return Err(Error::Domain(format!(
                "boundary nodes need a real positive rescale factor, got {lambda}"
            )));
        }
        n.child_family.lambda /= lambda;
    }
    Ok(ChartPair { p: tree.clone(), q })
}

/// `p` carries `a1` on every branch; `q` has identity families.
pub fn nonlinear_pair(tree: &StableTree, a1: f64) -> ChartPair {
    let mut p = tree.clone();
    let mut q = tree.clone();
    for n in &mut p.nodes {
        n.parent_family.a1 = c(a1, 0.0);
        n.child_family.a1 = c(a1, 0.0);
    }
    for n in &mut q.nodes {
        n.parent_family = CoordFamily::identity();
        n.child_family = CoordFamily::identity();
    }
    ChartPair { p, q }
}

pub fn identical_pair(tree: &StableTree) -> ChartPair {
    ChartPair {
        p: tree.clone(),
        q: tree.clone(),
    }
}

/// A real or complex scalar, written as a number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub fn value(self) -> Complex64 {
        match self {
            Scalar::Real(x) => c(x, 0.0),
            Scalar::Complex(z) => z,
        }
    }
}

/// Serializable description of a chart pair over a built-in `model` or an inline `tree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PairSpec {
    Rescale {
        model: Option<String>,
        tree: Option<StableTree>,
        lambda: Scalar,
    },
    Nonlinear {
        model: Option<String>,
        tree: Option<StableTree>,
        a1: f64,
    },
    Identical {
        model: Option<String>,
        tree: Option<StableTree>,
    },
    Explicit {
        p: StableTree,
        q: StableTree,
    },
}

fn base_tree(model_name: &Option<String>, tree: &Option<StableTree>) -> Result<StableTree> {
    let t = match (model_name, tree) {
        (Some(m), None) => model(m)?,
        (None, Some(t)) => t.clone(),
        _ => return Err(Error::Domain("give exactly one of 'model' and 'tree'".into())),
    };
    t.check()?;
    Ok(t)
}

impl PairSpec {
    pub fn from_json(s: &str) -> Result<PairSpec> {
        serde_json::from_str(s).map_err(|e| {
            Error::Domain(format!(
                "pair description, line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn build(&self) -> Result<ChartPair> {
        match self {
            PairSpec::Rescale { model, tree, lambda } => rescale_pair(&base_tree(model, tree)?, lambda.value()),
            PairSpec::Nonlinear { model, tree, a1 } => {
                if !a1.is_finite() {
                    return Err(Error::Domain(format!("a1 = {a1} must be finite")));
                }
                let pair = nonlinear_pair(&base_tree(model, tree)?, *a1);
                pair.p.check()?;
                Ok(pair)
            }
            PairSpec::Identical { model, tree } => Ok(identical_pair(&base_tree(model, tree)?)),
            PairSpec::Explicit { p, q } => {
                p.check()?;
                q.check()?;
                if !p.same_shape(q) {
                    return Err(Error::Unsupported(
                        "p and q differ in more than their coordinate families".into(),
                    ));
                }
                Ok(ChartPair {
                    p: p.clone(),
                    q: q.clone(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::tree::validate;

    #[test]
    fn models_are_valid_and_rigid() {
        for name in MODEL_NAMES {
            let t = model(name).unwrap();
            assert!(validate(&t).is_empty(), "{name}: {:?}", validate(&t));
            assert!(t.is_rigid(), "{name}");
        }
    }

    #[test]
    fn pairs_share_shape() {
        let t = chain();
        for pair in [
            rescale_pair(&t, c(std::f64::consts::E, 0.0)).unwrap(),
            nonlinear_pair(&t, 0.3),
            identical_pair(&t),
        ] {
            assert!(pair.p.same_shape(&pair.q));
            assert!(validate(&pair.p).is_empty() && validate(&pair.q).is_empty());
        }
        assert!(rescale_pair(&t, c(0.0, 1.0)).is_err());
    }

    #[test]
    fn pair_specs_parse_and_build() {
        let s = r#"{"kind": "rescale", "model": "chain", "lambda": 2.0}"#;
        let pair = PairSpec::from_json(s).unwrap().build().unwrap();
        assert_eq!(pair, rescale_pair(&chain(), c(2.0, 0.0)).unwrap());
        let s = r#"{"kind": "rescale", "model": "two-sphere", "lambda": [0.0, 2.0]}"#;
        assert!(PairSpec::from_json(s).unwrap().build().is_ok());
        let s = r#"{"kind": "nonlinear", "model": "chain", "a1": 0.3}"#;
        assert_eq!(
            PairSpec::from_json(s).unwrap().build().unwrap(),
            nonlinear_pair(&chain(), 0.3)
        );
        let spec = PairSpec::Identical {
            model: None,
            tree: Some(two_sphere()),
        };
        let back = PairSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let s = r#"{"kind": "identical", "model": "chain", "tree": null, "extra": 1}"#;
        assert!(PairSpec::from_json(s).is_err());
        let s = r#"{"kind": "identical"}"#;
        assert!(PairSpec::from_json(s).unwrap().build().is_err());
    }
}
