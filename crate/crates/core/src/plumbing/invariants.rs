//! Frame-local node invariants in double-double precision.
//!
//! For a node `e` with parent frame `z` and child frame `w`, two child-side
//! special points are transported through `e` to `delta_1, delta_2`, and two
//! parent-side points `a, b` are chosen. The invariant is
//! `I_e = log(1 - CR(a, b; delta_1, delta_2))`, which splits as
//! `log sigma_e + L0_e + dL_e` with `L0_e` independent of all gluing
//! parameters and `dL_e -> 0` as they vanish. Points are carried as a
//! nodal base position plus a small offset so that `dL_e` keeps full
//! relative precision at tiny parameters.

use num_complex::Complex64;

use super::tree::{ComponentKind, NodeKind, StableTree, Topology};
use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};

/// Bases closer than this are not used together.
const BASE_SEPARATION: f64 = 1e-6;

/// A point `base + off` with `off` small.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub base: Complex64,
    pub off: Cdd,
}

impl Pt {
    fn at(base: Complex64) -> Pt {
        Pt { base, off: Cdd::ZERO }
    }

    fn conj(self) -> Pt {
        Pt {
            base: self.base.conj(),
            off: self.off.conj(),
        }
    }

    /// `self - c` in double-double.
    fn minus(self, c: Complex64) -> Cdd {
        (Cdd::from_c64(self.base) - Cdd::from_c64(c)) + self.off
    }
}

/// A tree with effective gluing constants `sigma_eff` per node (zero for nodal).
pub struct Glued<'a> {
    pub tree: &'a StableTree,
    pub topo: &'a Topology,
    pub sigma: Vec<Cdd>,
}

/// The pieces of one node invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTerms {
    pub lambda_parent: Complex64,
    pub lambda_child: Complex64,
    /// `1/(u1 (1 + g(u1))) - 1/(u2 (1 + g(u2)))` at the nodal child positions.
    pub bracket: Cdd,
    /// `b - a`, `a - z_e`, `b - z_e` at the nodal positions.
    pub d0: Cdd,
    pub a0: Cdd,
    pub b0: Cdd,
    /// The parameter-dependent remainder `dL`.
    pub delta: Cdd,
}

impl NodeTerms {
    /// `L0` in ordinary precision.
    pub fn l0(&self) -> Complex64 {
        let ln = |z: Cdd| z.to_c64().ln();
        ln(self.d0) - self.lambda_parent.ln() - self.lambda_child.ln() + ln(self.bracket) - ln(self.a0) - ln(self.b0)
    }

    /// `L0(self) - L0(other)` for twin centers, which share all nodal positions.
    pub fn l0_difference(&self, other: &NodeTerms) -> Cdd {
        let c = |z: Complex64| Cdd::from_c64(z);
        (c(other.lambda_parent) / c(self.lambda_parent)).ln()
            + (c(other.lambda_child) / c(self.lambda_child)).ln()
            + (self.bracket / other.bracket).ln()
    }
}

impl<'a> Glued<'a> {
    pub fn new(tree: &'a StableTree, topo: &'a Topology, sigma: Vec<Cdd>) -> Result<Self> {
        if sigma.len() != tree.nodes.len() {
            return Err(Error::Domain(format!(
                "{} gluing constants for {} nodes",
                sigma.len(),
                tree.nodes.len()
            )));
        }
        Ok(Glued { tree, topo, sigma })
    }

    fn up(&self, e: usize, w: Pt) -> Result<Pt> {
        let n = &self.tree.nodes[e];
        let s = self.sigma[e];
        if s.is_zero() {
            return Ok(Pt::at(n.parent_position));
        }
        let f = n.child_family.eval_dd(w.minus(n.child_position))?;
        let x = n.parent_family.inverse_dd(s / f)?;
        Ok(Pt {
            base: n.parent_position,
            off: x,
        })
    }

    fn down(&self, e: usize, z: Pt) -> Result<Pt> {
        let n = &self.tree.nodes[e];
        let s = self.sigma[e];
        if s.is_zero() {
            return Ok(Pt::at(n.child_position));
        }
        let f = n.parent_family.eval_dd(z.minus(n.parent_position))?;
        let x = n.child_family.inverse_dd(s / f)?;
        Ok(Pt {
            base: n.child_position,
            off: x,
        })
    }

    fn own_marked(&self, comp: usize) -> impl Iterator<Item = Pt> + '_ {
        self.topo.marked_on[comp]
            .iter()
            .map(move |&k| Pt::at(self.tree.marked[k].position))
    }

    /// A marked point of the subtree below `comp`, in `comp`'s frame.
    fn subtree_rep(&self, comp: usize) -> Result<Pt> {
        if let Some(p) = self.own_marked(comp).next() {
            return Ok(p);
        }
        match self.topo.children[comp].first() {
            Some(&e) => self.child_rep(e),
            None => Err(Error::Unsupported(format!(
                "component {comp} has no marked point below it"
            ))),
        }
    }

    /// A marked point of the subtree below node `e`, in the parent's frame.
    pub fn child_rep(&self, e: usize) -> Result<Pt> {
        let w = self.subtree_rep(self.tree.nodes[e].child)?;
        self.up(e, w)
    }

    /// A marked point outside the subtree of `comp`, in `comp`'s frame.
    pub fn parent_side_rep(&self, comp: usize) -> Result<Pt> {
        let e = self.topo.parent_node[comp].ok_or_else(|| Error::Unsupported("the root has no parent side".into()))?;
        let p = self.tree.nodes[e].parent;
        let z = if let Some(m) = self.own_marked(p).next() {
            m
        } else if let Some(&o) = self.topo.children[p].iter().find(|&&o| o != e) {
            self.child_rep(o)?
        } else {
            self.parent_side_rep(p)?
        };
        self.down(e, z)
    }

    /// All terms of the invariant at node `e`.
    pub fn node_terms(&self, e: usize) -> Result<NodeTerms> {
        let n = &self.tree.nodes[e];
        let (pc, cc) = (n.parent, n.child);
        let (ze, we) = (n.parent_position, n.child_position);

        let mut child: Vec<Pt> = self.own_marked(cc).collect();
        for &o in &self.topo.children[cc] {
            child.push(self.child_rep(o)?);
        }
        if n.kind == NodeKind::Boundary {
            let conj: Vec<Pt> = child.iter().filter(|p| p.base.im != 0.0).map(|p| p.conj()).collect();
            child.extend(conj);
        }
        let [c1, c2] = pick_two(&child, we)
            .ok_or_else(|| Error::Unsupported(format!("node {e}: fewer than two usable child-side points")))?;

        let s = self.sigma[e];
        let fc = &n.child_family;
        let fp = &n.parent_family;
        let u = [c1.minus(we), c2.minus(we)];
        let u0 = [
            Cdd::from_c64(c1.base) - Cdd::from_c64(we),
            Cdd::from_c64(c2.base) - Cdd::from_c64(we),
        ];
        let f = [fc.eval_dd(u[0])?, fc.eval_dd(u[1])?];
        let x = if s.is_zero() {
            [Cdd::ZERO; 2]
        } else {
            [fp.inverse_dd(s / f[0])?, fp.inverse_dd(s / f[1])?]
        };

        let parent_disk = self.tree.components[pc].kind == ComponentKind::Disk;
        let mut parent: Vec<Pt> = self.own_marked(pc).collect();
        if parent_disk {
            let conj: Vec<Pt> = parent.iter().filter(|p| p.base.im != 0.0).map(|p| p.conj()).collect();
            parent.extend(conj);
        }
        for &o in &self.topo.children[pc] {
            if o != e {
                parent.push(self.child_rep(o)?);
            }
        }
        if parent_disk && n.kind == NodeKind::Interior {
            parent.push(Pt {
                base: ze.conj(),
                off: x[0].conj(),
            });
            parent.push(Pt {
                base: ze.conj(),
                off: x[1].conj(),
            });
        }
        if self.topo.parent_node[pc].is_some() {
            parent.push(self.parent_side_rep(pc)?);
        }
        let [a, b] = pick_two(&parent, ze)
            .ok_or_else(|| Error::Unsupported(format!("node {e}: fewer than two usable parent-side points")))?;

        let d0 = Cdd::from_c64(b.base) - Cdd::from_c64(a.base);
        let a0 = Cdd::from_c64(a.base) - Cdd::from_c64(ze);
        let b0 = Cdd::from_c64(b.base) - Cdd::from_c64(ze);
        let f0 = [fc.eval_dd(u0[0])?, fc.eval_dd(u0[1])?];
        let unscaled = |u: Cdd| Cdd::ONE / (u * (Cdd::ONE + fc.g_dd(u)));
        let bracket = unscaled(u0[0]) - unscaled(u0[1]);
        let psi0 = Cdd::ONE / Cdd::from_c64(fp.lambda);
        let bb0 = psi0 * (Cdd::ONE / f0[0] - Cdd::ONE / f0[1]);
        let mut db = Cdd::ZERO;
        for k in 0..2 {
            let df = fc.diff_dd(u0[k], c_off(k, c1, c2));
            let term = fp.psi_offset_dd(x[k]) / f[k] - psi0 * df / (f[k] * f0[k]);
            db = if k == 0 { db + term } else { db - term };
        }
        let (alpha, beta) = (a.off, b.off);
        let delta = ((beta - alpha) / d0).ln_1p() + (db / bb0).ln_1p()
            - ((alpha - x[1]) / a0).ln_1p()
            - ((beta - x[0]) / b0).ln_1p();
        Ok(NodeTerms {
            lambda_parent: fp.lambda,
            lambda_child: fc.lambda,
            bracket,
            d0,
            a0,
            b0,
            delta,
        })
    }
}

fn c_off(k: usize, c1: Pt, c2: Pt) -> Cdd {
    if k == 0 {
        c1.off
    } else {
        c2.off
    }
}

/// First two candidates whose bases avoid `node` and each other.
fn pick_two(cands: &[Pt], node: Complex64) -> Option<[Pt; 2]> {
    let ok = |p: &Pt| (p.base - node).norm() > BASE_SEPARATION;
    let mut it = cands.iter().filter(|p| ok(p));
    let first = *it.next()?;
    let second = *it.find(|p| (p.base - first.base).norm() > BASE_SEPARATION)?;
    Some([first, second])
}

/// `sigma = exp(-z)` for `z = T + i theta`; zero when `T = +inf`.
pub fn sigma_dd(t: f64, theta: Dd) -> Cdd {
    if t == f64::INFINITY {
        return Cdd::ZERO;
    }
    Cdd::new(-Dd::from_f64(t), -theta).exp()
}

/// `sigma = exp(-z)` for a double-double `z`.
pub fn sigma_of_z(z: Option<Cdd>) -> Cdd {
    match z {
        Some(z) => (-z).exp(),
        None => Cdd::ZERO,
    }
}

/// Full invariant `log sigma + L0 + dL` at node `e`, with `z_e = -log sigma_eff`.
pub fn invariant(terms: &NodeTerms, z: Complex64) -> Complex64 {
    -z + terms.l0() + terms.delta.to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::NodeParams;
    use crate::plumbing::models::{chain, disk_boundary_pair, disk_sphere_bubble, nonlinear_pair, two_sphere};
    use crate::plumbing::plumb::plumb;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn naive_cross(a: Complex64, b: Complex64, d1: Complex64, d2: Complex64) -> Complex64 {
        (b - a) * (d1 - d2) / ((a - d2) * (b - d1))
    }

    #[test]
    fn two_sphere_closed_form() {
        let t = two_sphere();
        for s in [c(0.1, 0.0), c(1e-5, 3e-6), c(1e-17, -2e-18)] {
            let topo = t.topology();
            let g = Glued::new(&t, &topo, vec![Cdd::from_c64(s)]).unwrap();
            let terms = g.node_terms(0).unwrap();
            let z = -s.ln();
            let got = invariant(&terms, z);
            let want = (4.0 * s).ln() - 2.0 * (1.0 + s).ln();
            assert!((got - want).norm() < 1e-13, "{got} vs {want}");
            let dl_want = -2.0 * Cdd::from_c64(s).ln_1p().to_c64();
            assert!((terms.delta.to_c64() - dl_want).norm() <= 1e-14 * dl_want.norm(), "{s}");
        }
    }

    #[test]
    fn depth_one_invariant_matches_plumbed_cross_ratio() {
        for base in [two_sphere(), disk_boundary_pair(), disk_sphere_bubble()] {
            for t in [nonlinear_pair(&base, 0.3).p, base.clone()] {
                let topo = t.topology();
                let sig = if topo.m_d == 1 { c(-0.05, 0.0) } else { c(0.03, 0.04) };
                let params = if topo.m_d == 1 {
                    NodeParams::new(vec![0.05], vec![], t.cutoff).unwrap()
                } else {
                    NodeParams::new(vec![], vec![sig], t.cutoff).unwrap()
                };
                let pl = plumb(&t, &params).unwrap();
                let topo = t.topology();
                let g = Glued::new(&t, &topo, vec![Cdd::from_c64(sig)]).unwrap();
                let terms = g.node_terms(0).unwrap();
                let inv = invariant(&terms, -sig.ln());
                // Recover the four points from the plumbed configuration.
                let pos: Vec<Complex64> = pl.tree.marked.iter().map(|m| m.position).collect();
                let n = &t.nodes[0];
                let child_pts: Vec<Complex64> = t
                    .marked
                    .iter()
                    .zip(&pos)
                    .filter(|(m, _)| m.component == n.child)
                    .map(|(_, &p)| p)
                    .collect();
                let mut parent_pts: Vec<Complex64> = t
                    .marked
                    .iter()
                    .zip(&pos)
                    .filter(|(m, _)| m.component == n.parent)
                    .map(|(_, &p)| p)
                    .collect();
                if t.components[n.parent].kind == ComponentKind::Disk && n.kind == NodeKind::Interior {
                    parent_pts.push(child_pts[0].conj());
                }
                let cr = naive_cross(parent_pts[0], parent_pts[1], child_pts[0], child_pts[1]);
                let d = inv - cr.ln();
                let wrapped = c(d.re, crate::coords::wrap_angle_signed(d.im));
                assert!(wrapped.norm() < 1e-10, "{wrapped}");
            }
        }
    }

    #[test]
    fn remainder_vanishes_at_the_corner() {
        let t = nonlinear_pair(&chain(), 0.3).p;
        let topo = t.topology();
        let g = Glued::new(&t, &topo, vec![Cdd::ZERO, Cdd::ZERO]).unwrap();
        for e in 0..2 {
            assert!(g.node_terms(e).unwrap().delta.is_zero());
        }
        let topo = t.topology();
        let g = Glued::new(
            &t,
            &topo,
            vec![Cdd::from_c64(c(-1e-3, 0.0)), Cdd::from_c64(c(1e-3, 1e-3))],
        )
        .unwrap();
        for e in 0..2 {
            let d = g.node_terms(e).unwrap().delta.to_c64().norm();
            assert!(d > 1e-6 && d < 1e-1, "{e}: {d}");
        }
    }
}
