//! Node smoothing, gauge normalization and the chart maps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::{disk_gauge, disk_gauge_interior, sphere_gauge, Ext, Mobius};
use super::tree::{ComponentKind, MarkKind, NodeKind, Special, StableTree, Topology};
use crate::coords::{from_double_log, DoubleLogCoords, NodeParams, NodeRef};
use crate::error::{Error, Result};

/// A chart center: a nodal configuration together with its node coordinate
/// families, cutoff and marked positions.
pub type ChartCenter = StableTree;

/// Result of smoothing: the partially smoothed tree with transported positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Plumbed {
    pub tree: StableTree,
    /// Component of `tree` containing each original component.
    pub group: Vec<usize>,
    /// Original index of each node kept in `tree`.
    pub kept_nodes: Vec<usize>,
}

/// Effective gluing constant `z w = sigma_eff`: `sigma` for interior nodes, `-r` on boundaries.
pub fn effective_sigma(topo: &Topology, params: &NodeParams, node: usize) -> Complex64 {
    match topo.slot[node] {
        NodeRef::Boundary(j) => Complex64::new(-params.boundary[j], 0.0),
        NodeRef::Interior(i) => params.interior[i],
    }
}

pub(crate) fn check_params(tree: &StableTree, topo: &Topology, params: &NodeParams) -> Result<()> {
    if params.boundary.len() != topo.m_d || params.interior.len() != topo.m_s {
        return Err(Error::Domain(format!(
            "parameters have {} boundary and {} interior entries, tree has {} and {}",
            params.boundary.len(),
            params.interior.len(),
            topo.m_d,
            topo.m_s
        )));
    }
    if params.cutoff != tree.cutoff {
        return Err(Error::Domain(format!(
            "parameter cutoff {} differs from the center's cutoff {}",
            params.cutoff, tree.cutoff
        )));
    }
    params.validate()
}

/// Moves `w` on the child of `node` into the parent's frame: `z = z_e + F_P^{-1}(sigma / F_C(w - w_e))`.
pub fn transport_up(tree: &StableTree, node: usize, sigma: Complex64, w: Complex64) -> Result<Complex64> {
    let n = &tree.nodes[node];
    let fc = n.child_family.eval_checked(w - n.child_position)?;
    if fc == Complex64::new(0.0, 0.0) {
        return Err(Error::Range(format!("point {w} sits on node {node}")));
    }
    Ok(n.parent_position + n.parent_family.inverse(sigma / fc)?)
}

/// Moves `z` on the parent of `node` into the child's frame.
pub fn transport_down(tree: &StableTree, node: usize, sigma: Complex64, z: Complex64) -> Result<Complex64> {
    let n = &tree.nodes[node];
    let fp = n.parent_family.eval_checked(z - n.parent_position)?;
    if fp == Complex64::new(0.0, 0.0) {
        return Err(Error::Range(format!("point {z} sits on node {node}")));
    }
    Ok(n.child_position + n.child_family.inverse(sigma / fp)?)
}

/// Smooths every node with a nonzero parameter; nodes with zero parameter persist.
pub fn plumb(center: &ChartCenter, params: &NodeParams) -> Result<Plumbed> {
    let topo = center.topology();
    check_params(center, &topo, params)?;
    let nc = center.components.len();
    let sig: Vec<Complex64> = (0..center.nodes.len())
        .map(|k| effective_sigma(&topo, params, k))
        .collect();
    let smoothed: Vec<bool> = sig.iter().map(|s| *s != Complex64::new(0.0, 0.0)).collect();

    let group_root = |mut c: usize| {
        while let Some(k) = topo.parent_node[c] {
            if !smoothed[k] {
                break;
            }
            c = center.nodes[k].parent;
        }
        c
    };
    let roots: Vec<usize> = (0..nc).filter(|&c| group_root(c) == c).collect();
    let group: Vec<usize> = (0..nc)
        .map(|c| roots.binary_search(&group_root(c)).expect("group root is listed"))
        .collect();
    let lift = |mut c: usize, mut z: Complex64| -> Result<Complex64> {
        while let Some(k) = topo.parent_node[c] {
            if !smoothed[k] {
                break;
            }
            z = transport_up(center, k, sig[k], z)?;
            c = center.nodes[k].parent;
        }
        Ok(z)
    };

    let mut out = center.clone();
    out.components = roots.iter().map(|&r| center.components[r].clone()).collect();
    out.root = group[center.root];
    for m in &mut out.marked {
        m.position = lift(m.component, m.position)?;
        if m.kind == MarkKind::Boundary {
            m.position.im = 0.0;
        }
        m.component = group[m.component];
    }
    let mut kept_nodes = Vec::new();
    out.nodes.clear();
    for (k, n) in center.nodes.iter().enumerate() {
        if smoothed[k] {
            continue;
        }
        let mut m = n.clone();
        m.parent_position = lift(n.parent, n.parent_position)?;
        if n.kind == NodeKind::Boundary {
            m.parent_position.im = 0.0;
        }
        m.parent = group[n.parent];
        m.child = group[n.child];
        out.nodes.push(m);
        kept_nodes.push(k);
    }
    Ok(Plumbed {
        tree: out,
        group,
        kept_nodes,
    })
}

/// One special point after gauge fixing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPoint {
    pub special: Special,
    pub boundary: bool,
    pub position: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedComponent {
    pub kind: ComponentKind,
    /// Gauge points: the three lowest boundary specials in cyclic order from
    /// the first, sent to `(-1, 0, 1)` on disks (or `x0 -> infinity`,
    /// first interior special `-> i`), and `(infinity, 0, 1)` on spheres.
    pub gauge: Vec<Special>,
    pub points: Vec<NormalizedPoint>,
}

/// Gauge-fixed positions of all non-gauge special points, per component of
/// the (partially smoothed) configuration. Node labels are original node indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuliCoords {
    pub components: Vec<NormalizedComponent>,
    /// Original indices of the nodes still present.
    pub nodes: Vec<usize>,
}

impl ModuliCoords {
    /// Flattened real vector: one entry per boundary point, two per interior point.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for c in &self.components {
            for p in &c.points {
                v.push(p.position.re);
                if !p.boundary {
                    v.push(p.position.im);
                }
            }
        }
        v
    }

    pub fn same_type(&self, other: &ModuliCoords) -> bool {
        self.nodes == other.nodes
            && self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| {
                a.kind == b.kind
                    && a.gauge == b.gauge
                    && a.points.len() == b.points.len()
                    && a.points.iter().zip(&b.points).all(|(x, y)| x.special == y.special)
            })
    }

    /// Max-norm distance; `None` when the combinatorial types differ.
    pub fn distance(&self, other: &ModuliCoords) -> Option<f64> {
        if !self.same_type(other) {
            return None;
        }
        Some(
            self.to_vec()
                .iter()
                .zip(other.to_vec())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())),
        )
    }
}

/// Specials of one component in gauge order: boundary marked by index, boundary
/// nodes, interior marked by index, interior nodes.
fn ordered_specials(tree: &StableTree, comp: usize) -> (Vec<Special>, Vec<Special>) {
    let mut bm: Vec<(usize, usize)> = Vec::new();
    let mut im: Vec<(usize, usize)> = Vec::new();
    for (k, m) in tree.marked.iter().enumerate() {
        if m.component == comp {
            match m.kind {
                MarkKind::Boundary => bm.push((m.index, k)),
                MarkKind::Interior => im.push((m.index, k)),
            }
        }
    }
    bm.sort();
    im.sort();
    let mut boundary: Vec<Special> = bm.into_iter().map(|(_, k)| Special::Marked(k)).collect();
    let mut interior: Vec<Special> = im.into_iter().map(|(_, k)| Special::Marked(k)).collect();
    for (k, n) in tree.nodes.iter().enumerate() {
        if n.parent == comp || n.child == comp {
            match n.kind {
                NodeKind::Boundary => boundary.push(Special::Node(k)),
                NodeKind::Interior => interior.push(Special::Node(k)),
            }
        }
    }
    (boundary, interior)
}

fn component_gauge(tree: &StableTree, comp: usize) -> Result<(Vec<Special>, Mobius)> {
    let (boundary, interior) = ordered_specials(tree, comp);
    let pos = |s: Special| tree.special_position(comp, s);
    match tree.components[comp].kind {
        ComponentKind::Disk => {
            if boundary.len() >= 3 {
                let mut chosen = boundary[..3].to_vec();
                let x0 = pos(chosen[0]).re;
                chosen[1..].sort_by(|&a, &b| {
                    let ka = (pos(a).re <= x0, pos(a).re);
                    let kb = (pos(b).re <= x0, pos(b).re);
                    ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
                });
                let g = disk_gauge(x0, pos(chosen[1]).re, pos(chosen[2]).re)?;
                Ok((chosen, g))
            } else if !boundary.is_empty() && !interior.is_empty() {
                let g = disk_gauge_interior(pos(boundary[0]).re, pos(interior[0]))?;
                Ok((vec![boundary[0], interior[0]], g))
            } else {
                Err(Error::DegenerateGauge(format!(
                    "disk component {comp} has no boundary special point"
                )))
            }
        }
        ComponentKind::Sphere => {
            if interior.len() < 3 {
                return Err(Error::DegenerateGauge(format!(
                    "sphere component {comp} has fewer than 3 special points"
                )));
            }
            let g = sphere_gauge(pos(interior[0]), pos(interior[1]), pos(interior[2]))?;
            Ok((interior[..3].to_vec(), g))
        }
    }
}

fn relabel(s: Special, ids: &[usize]) -> Special {
    match s {
        Special::Node(k) => Special::Node(ids[k]),
        m => m,
    }
}

/// Gauge-fixes every component of a configuration.
pub fn normalize(tree: &StableTree) -> Result<ModuliCoords> {
    let ids: Vec<usize> = (0..tree.nodes.len()).collect();
    normalize_labeled(tree, &ids)
}

fn normalize_labeled(tree: &StableTree, ids: &[usize]) -> Result<ModuliCoords> {
    let mut components = Vec::with_capacity(tree.components.len());
    for comp in 0..tree.components.len() {
        let (gauge, g) = component_gauge(tree, comp)?;
        let (boundary, interior) = ordered_specials(tree, comp);
        let mut points = Vec::new();
        for (list, is_b) in [(boundary, true), (interior, false)] {
            for s in list {
                if gauge.contains(&s) {
                    continue;
                }
                let z = match g.apply(Ext::Finite(tree.special_position(comp, s))) {
                    Ext::Finite(z) => z,
                    Ext::Infinity => {
                        return Err(Error::DegenerateGauge(format!(
                            "special point {s:?} collides with a gauge point"
                        )))
                    }
                };
                points.push(NormalizedPoint {
                    special: relabel(s, ids),
                    boundary: is_b,
                    position: if is_b { Complex64::new(z.re, 0.0) } else { z },
                });
            }
        }
        components.push(NormalizedComponent {
            kind: tree.components[comp].kind,
            gauge: gauge.into_iter().map(|s| relabel(s, ids)).collect(),
            points,
        });
    }
    Ok(ModuliCoords {
        components,
        nodes: ids.to_vec(),
    })
}

/// Plumbs then normalizes, labelling nodes by their original indices.
pub fn plumb_normalized(center: &ChartCenter, params: &NodeParams) -> Result<ModuliCoords> {
    let p = plumb(center, params)?;
    normalize_labeled(&p.tree, &p.kept_nodes)
}

/// The chart map in raw gluing parameters, with marked positions `v`.
pub fn chart_map_phi(center: &ChartCenter, v: &[f64], params: &NodeParams) -> Result<ModuliCoords> {
    plumb_normalized(&center.with_v(v)?, params)
}

/// The chart map in double-log coordinates.
pub fn chart_map_psi(center: &ChartCenter, v: &[f64], d: &DoubleLogCoords) -> Result<ModuliCoords> {
    chart_map_phi(center, v, &from_double_log(d)?)
}
