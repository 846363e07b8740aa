//! Stable trees of disks and spheres with node coordinate families.
//!
//! Disks are modeled on the upper half-plane (boundary = real line), spheres
//! on the complex plane. Every position is given in its component's frame.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::family::CoordFamily;
use crate::coords::{NodeRef, DEFAULT_CUTOFF};
use crate::error::{Error, Result};

/// Positions closer than this count as colliding.
pub const SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Disk,
    Sphere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: usize,
    pub child: usize,
    pub parent_position: Complex64,
    pub child_position: Complex64,
    #[serde(default)]
    pub parent_family: CoordFamily,
    #[serde(default)]
    pub child_family: CoordFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkKind {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marked {
    pub kind: MarkKind,
    pub index: usize,
    pub component: usize,
    pub position: Complex64,
}

/// `(k + 1, l)`: numbers of boundary and interior marked points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub boundary: usize,
    pub interior: usize,
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableTree {
    pub signature: Signature,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    pub components: Vec<Component>,
    pub root: usize,
    pub nodes: Vec<Node>,
    pub marked: Vec<Marked>,
}

/// One stability or consistency problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Label of a special point on a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "index", rename_all = "lowercase")]
pub enum Special {
    /// Marked point, by position in `StableTree::marked`.
    Marked(usize),
    /// Nodal point, by node index.
    Node(usize),
}

/// Derived adjacency data for a valid tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    /// Node joining each component to its parent; `None` for the root.
    pub parent_node: Vec<Option<usize>>,
    /// Child nodes hanging off each component, in node order.
    pub children: Vec<Vec<usize>>,
    /// Marked points (indices into `marked`) on each component, in order.
    pub marked_on: Vec<Vec<usize>>,
    /// Position of each node in the boundary or interior parameter list.
    pub slot: Vec<NodeRef>,
    pub m_d: usize,
    pub m_s: usize,
}

impl StableTree {
    pub fn from_json(s: &str) -> Result<StableTree> {
        let t: StableTree = serde_json::from_str(s)
            .map_err(|e| Error::InvalidTree(format!("line {} column {}: {e}", e.line(), e.column())))?;
        t.check()?;
        Ok(t)
    }

    /// Validates and fails with all violations joined.
    pub fn check(&self) -> Result<()> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTree(
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    pub fn topology(&self) -> Topology {
        let nc = self.components.len();
        let mut parent_node = vec![None; nc];
        let mut children = vec![Vec::new(); nc];
        let mut slot = Vec::with_capacity(self.nodes.len());
        let (mut m_d, mut m_s) = (0, 0);
        for (k, n) in self.nodes.iter().enumerate() {
            if n.child < nc {
                parent_node[n.child] = Some(k);
            }
            if n.parent < nc {
                children[n.parent].push(k);
            }
            match n.kind {
                NodeKind::Boundary => {
                    slot.push(NodeRef::Boundary(m_d));
                    m_d += 1;
                }
                NodeKind::Interior => {
                    slot.push(NodeRef::Interior(m_s));
                    m_s += 1;
                }
            }
        }
        let mut marked_on = vec![Vec::new(); nc];
        for (k, m) in self.marked.iter().enumerate() {
            if m.component < nc {
                marked_on[m.component].push(k);
            }
        }
        Topology {
            parent_node,
            children,
            marked_on,
            slot,
            m_d,
            m_s,
        }
    }

    /// Position of a special point in its component's frame.
    pub fn special_position(&self, comp: usize, s: Special) -> Complex64 {
        match s {
            Special::Marked(k) => self.marked[k].position,
            Special::Node(k) => {
                let n = &self.nodes[k];
                if n.parent == comp {
                    n.parent_position
                } else {
                    n.child_position
                }
            }
        }
    }

    /// Special points on a component with their boundary flag.
    pub fn specials(&self, comp: usize) -> Vec<(Special, bool)> {
        let mut out = Vec::new();
        for (k, m) in self.marked.iter().enumerate() {
            if m.component == comp {
                out.push((Special::Marked(k), m.kind == MarkKind::Boundary));
            }
        }
        for (k, n) in self.nodes.iter().enumerate() {
            if n.parent == comp || n.child == comp {
                out.push((Special::Node(k), n.kind == NodeKind::Boundary));
            }
        }
        out
    }

    /// Stability weight: boundary specials + 2 x interior specials on disks,
    /// number of specials on spheres.
    pub fn weight(&self, comp: usize) -> usize {
        let sp = self.specials(comp);
        match self.components[comp].kind {
            ComponentKind::Sphere => sp.len(),
            ComponentKind::Disk => sp.iter().map(|&(_, b)| if b { 1 } else { 2 }).sum(),
        }
    }

    /// Every component carries exactly the minimum of three special points.
    pub fn is_rigid(&self) -> bool {
        (0..self.components.len()).all(|c| self.weight(c) == 3)
    }

    /// Marked positions flattened: one real per boundary point, two per interior point.
    pub fn v(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for m in &self.marked {
            match m.kind {
                MarkKind::Boundary => out.push(m.position.re),
                MarkKind::Interior => {
                    out.push(m.position.re);
                    out.push(m.position.im);
                }
            }
        }
        out
    }

    pub fn v_len(&self) -> usize {
        self.marked
            .iter()
            .map(|m| if m.kind == MarkKind::Boundary { 1 } else { 2 })
            .sum()
    }

    /// Copy with marked positions replaced by `v` (layout of [`StableTree::v`]).
    pub fn with_v(&self, v: &[f64]) -> Result<StableTree> {
        if v.len() != self.v_len() {
            return Err(Error::Domain(format!(
                "v has length {}, expected {}",
                v.len(),
                self.v_len()
            )));
        }
        let mut t = self.clone();
        let mut k = 0;
        for m in &mut t.marked {
            match m.kind {
                MarkKind::Boundary => {
                    m.position = Complex64::new(v[k], 0.0);
                    k += 1;
                }
                MarkKind::Interior => {
                    m.position = Complex64::new(v[k], v[k + 1]);
                    k += 2;
                }
            }
        }
        Ok(t)
    }

    /// Same tree and positions; coordinate families may differ.
    pub fn same_shape(&self, other: &StableTree) -> bool {
        self.signature == other.signature
            && self.root == other.root
            && self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.kind == b.kind)
            && self.marked == other.marked
            && self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| {
                a.kind == b.kind
                    && a.parent == b.parent
                    && a.child == b.child
                    && a.parent_position == b.parent_position
                    && a.child_position == b.child_position
            })
    }
}

fn push(v: &mut Vec<Violation>, field: impl Into<String>, message: impl Into<String>) {
    v.push(Violation {
        field: field.into(),
        message: message.into(),
    });
}

/// All stability, planarity and consistency violations; empty iff valid.
pub fn validate(t: &StableTree) -> Vec<Violation> {
    let mut v = Vec::new();
    let nc = t.components.len();
    if !(t.cutoff > 0.0 && t.cutoff < 1.0) {
        push(&mut v, "cutoff", format!("{} outside (0, 1)", t.cutoff));
    }
    if nc == 0 {
        push(&mut v, "components", "empty");
        return v;
    }
    if t.root >= nc {
        push(&mut v, "root", format!("no component {}", t.root));
        return v;
    }
    let has_disk = t.components.iter().any(|c| c.kind == ComponentKind::Disk);
    if has_disk && t.components[t.root].kind != ComponentKind::Disk {
        push(&mut v, "root", "root must be a disk when the tree has disks");
    }

    // Tree structure.
    let mut parent_count = vec![0usize; nc];
    for (k, n) in t.nodes.iter().enumerate() {
        let f = format!("nodes[{k}]");
        if n.parent >= nc || n.child >= nc {
            push(&mut v, &f, "references a missing component");
            continue;
        }
        if n.parent == n.child {
            push(&mut v, &f, "joins a component to itself");
            continue;
        }
        parent_count[n.child] += 1;
        let (pk, ck) = (t.components[n.parent].kind, t.components[n.child].kind);
        match n.kind {
            NodeKind::Boundary => {
                if pk != ComponentKind::Disk || ck != ComponentKind::Disk {
                    push(&mut v, format!("{f}.kind"), "boundary node must join two disks");
                }
                if n.parent_position.im.abs() > SEPARATION || n.child_position.im.abs() > SEPARATION {
                    push(&mut v, &f, "boundary node positions must be real");
                }
                for (side, fam) in [("parent_family", &n.parent_family), ("child_family", &n.child_family)] {
                    if !fam.is_real() || !(fam.lambda.re > 0.0) {
                        push(
                            &mut v,
                            format!("{f}.{side}"),
                            "boundary branch needs real coefficients and lambda > 0",
                        );
                    }
                }
            }
            NodeKind::Interior => {
                if ck != ComponentKind::Sphere {
                    push(
                        &mut v,
                        format!("{f}.kind"),
                        "interior node must attach a sphere as child",
                    );
                }
                if pk == ComponentKind::Disk && !(n.parent_position.im > SEPARATION) {
                    push(
                        &mut v,
                        format!("{f}.parent_position"),
                        "interior node on a disk must lie in the upper half-plane",
                    );
                }
            }
        }
        for (side, fam) in [("parent_family", &n.parent_family), ("child_family", &n.child_family)] {
            if !(fam.lambda.norm() > 0.0) || !fam.lambda.is_finite() {
                push(&mut v, format!("{f}.{side}.lambda"), "must be nonzero");
            }
            if !(fam.radius > 0.0) {
                push(&mut v, format!("{f}.{side}.radius"), "must be positive");
            }
        }
    }
    for c in 0..nc {
        let want = if c == t.root { 0 } else { 1 };
        if parent_count[c] != want {
            push(
                &mut v,
                format!("components[{c}]"),
                format!("has {} parent nodes, expected {want}", parent_count[c]),
            );
        }
    }
    if t.nodes.len() + 1 != nc {
        push(
            &mut v,
            "nodes",
            format!("{} nodes for {nc} components is not a tree", t.nodes.len()),
        );
    }
    // Reachability from the root.
    let topo = t.topology();
    let mut seen = vec![false; nc];
    let mut stack = vec![t.root];
    while let Some(c) = stack.pop() {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        for &k in &topo.children[c] {
            if t.nodes[k].child < nc {
                stack.push(t.nodes[k].child);
            }
        }
    }
    for (c, s) in seen.iter().enumerate() {
        if !s {
            push(&mut v, format!("components[{c}]"), "not reachable from the root");
        }
    }

    // Marked points.
    let mut b_seen = vec![false; t.signature.boundary];
    let mut i_seen = vec![false; t.signature.interior];
    for (k, m) in t.marked.iter().enumerate() {
        let f = format!("marked[{k}]");
        if m.component >= nc {
            push(&mut v, &f, "references a missing component");
            continue;
        }
        let ck = t.components[m.component].kind;
        match m.kind {
            MarkKind::Boundary => {
                if ck != ComponentKind::Disk {
                    push(&mut v, &f, "boundary marked point on a sphere");
                }
                if m.position.im.abs() > SEPARATION {
                    push(&mut v, format!("{f}.position"), "boundary point must be real");
                }
                match b_seen.get_mut(m.index) {
                    Some(s) if !*s => *s = true,
                    Some(_) => push(&mut v, format!("{f}.index"), "duplicate boundary index"),
                    None => push(&mut v, format!("{f}.index"), "exceeds the signature"),
                }
                if m.index == 0 && has_disk && m.component != t.root {
                    push(&mut v, &f, "boundary point 0 must lie on the root disk");
                }
            }
            MarkKind::Interior => {
                if ck == ComponentKind::Disk && !(m.position.im > SEPARATION) {
                    push(
                        &mut v,
                        format!("{f}.position"),
                        "interior point must lie in the upper half-plane",
                    );
                }
                match i_seen.get_mut(m.index) {
                    Some(s) if !*s => *s = true,
                    Some(_) => push(&mut v, format!("{f}.index"), "duplicate interior index"),
                    None => push(&mut v, format!("{f}.index"), "exceeds the signature"),
                }
            }
        }
        if !m.position.is_finite() {
            push(&mut v, format!("{f}.position"), "not finite");
        }
    }
    if b_seen.iter().any(|s| !s) || i_seen.iter().any(|s| !s) {
        push(&mut v, "marked", "does not cover the signature");
    }
    if !v.is_empty() {
        return v;
    }

    // Stability and collisions.
    for c in 0..nc {
        let f = format!("components[{c}]");
        let w = t.weight(c);
        if w < 3 {
            let what = match t.components[c].kind {
                ComponentKind::Sphere => "unstable sphere",
                ComponentKind::Disk => "unstable disk",
            };
            push(&mut v, &f, format!("{what}: weight {w} < 3"));
        }
        let sp = t.specials(c);
        for a in 0..sp.len() {
            for b in a + 1..sp.len() {
                let za = t.special_position(c, sp[a].0);
                let zb = t.special_position(c, sp[b].0);
                if (za - zb).norm() < SEPARATION {
                    push(
                        &mut v,
                        &f,
                        format!("special points {:?} and {:?} collide", sp[a].0, sp[b].0),
                    );
                }
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk3() -> StableTree {
        StableTree {
            signature: Signature {
                boundary: 3,
                interior: 0,
            },
            cutoff: DEFAULT_CUTOFF,
            components: vec![Component {
                kind: ComponentKind::Disk,
                name: None,
            }],
            root: 0,
            nodes: vec![],
            marked: (0..3)
                .map(|i| Marked {
                    kind: MarkKind::Boundary,
                    index: i,
                    component: 0,
                    position: Complex64::new(i as f64 - 1.0, 0.0),
                })
                .collect(),
        }
    }

    #[test]
    fn minimal_disk_is_valid() {
        assert!(validate(&disk3()).is_empty());
    }

    #[test]
    fn unstable_sphere_is_reported() {
        let mut t = disk3();
        t.components.push(Component {
            kind: ComponentKind::Sphere,
            name: None,
        });
        t.signature.interior = 1;
        t.nodes.push(Node {
            kind: NodeKind::Interior,
            parent: 0,
            child: 1,
            parent_position: Complex64::new(0.0, 1.0),
            child_position: Complex64::new(0.0, 0.0),
            parent_family: CoordFamily::identity(),
            child_family: CoordFamily::identity(),
        });
        t.marked.push(Marked {
            kind: MarkKind::Interior,
            index: 0,
            component: 1,
            position: Complex64::new(1.0, 0.0),
        });
        let v = validate(&t);
        assert!(v.iter().any(|x| x.message.contains("unstable sphere")), "{v:?}");
    }

    #[test]
    fn disks_joined_by_interior_node_are_rejected() {
        let mut t = disk3();
        t.components.push(Component {
            kind: ComponentKind::Disk,
            name: None,
        });
        t.nodes.push(Node {
            kind: NodeKind::Interior,
            parent: 0,
            child: 1,
            parent_position: Complex64::new(0.5, 0.0),
            child_position: Complex64::new(0.0, 0.0),
            parent_family: CoordFamily::identity(),
            child_family: CoordFamily::identity(),
        });
        let v = validate(&t);
        assert!(v.iter().any(|x| x.field == "nodes[0].kind"), "{v:?}");
        assert!(v.iter().any(|x| x.field == "nodes[0].parent_position"), "{v:?}");
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let t = disk3();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(StableTree::from_json(&s).unwrap(), t);
        let err = StableTree::from_json("{\n \"signature\": 3 }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn v_round_trip() {
        let t = disk3();
        let v = t.v();
        assert_eq!(v, vec![-1.0, 0.0, 1.0]);
        assert_eq!(t.with_v(&v).unwrap(), t);
    }
}
