//! Chart transitions between twin centers.
//!
//! Two centers are twins when they share the nodal configuration and differ
//! only in their node coordinate families. On rigid trees (every component
//! carries exactly three special points) the node invariants are local
//! coordinates near the deepest corner, so a point of `q`'s chart is matched
//! in `p`'s chart by solving `I^p_e = I^q_e` for every node `e`:
//! `z^p_e = z^q_e + (L0^p_e - L0^q_e) + (dL^p_e - dL^q_e)` with `z = T + i theta`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::invariants::{Glued, NodeTerms};
use super::models::ChartPair;
use super::plumb::ChartCenter;
use super::tree::{NodeKind, StableTree, Topology};
use crate::coords::{
    t_from_s, wrap_angle, wrap_angle_signed, DoubleLogCoords, LogCoords, LogPair, NodeRef, SingleLogCoords,
};
use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const TOLERANCE: f64 = 1e-28;
/// Remainder differences below this fraction of the remainders are rounding noise.
pub const NOISE_FLOOR: f64 = 1e-24;
pub const RESIDUAL_LIMIT: f64 = 1e-10;

/// Per-node offsets `z^p - z^q` and solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOffsets {
    /// `constant + remainder`, in tree node order; also defined at nodal
    /// nodes as the limit value.
    pub offsets: Vec<Cdd>,
    /// `L0^p - L0^q`, independent of the gluing parameters.
    pub constant: Vec<Cdd>,
    /// `dL^p - dL^q`, vanishing at the deepest corner.
    pub remainder: Vec<Cdd>,
    pub iterations: usize,
    /// Max over smoothed nodes of `|I^p - I^q|`, imaginary part taken mod `2 pi`.
    pub residual: f64,
}

/// Same configuration and rigid components; otherwise the transition is not supported.
pub fn check_twins(p: &ChartCenter, q: &ChartCenter) -> Result<()> {
    p.check()?;
    q.check()?;
    if !p.same_shape(q) {
        return Err(Error::Unsupported(
            "centers differ in more than their coordinate families".into(),
        ));
    }
    if !p.is_rigid() {
        return Err(Error::Unsupported(
            "transitions need every component to carry exactly three special points".into(),
        ));
    }
    Ok(())
}

fn sigma_at(kind: NodeKind, z: Option<Cdd>) -> Cdd {
    match (z, kind) {
        (None, _) => Cdd::ZERO,
        (Some(z), NodeKind::Boundary) => Cdd::real(-(-z.re).exp()),
        (Some(z), NodeKind::Interior) => (-z).exp(),
    }
}

fn all_terms(g: &Glued) -> Result<Vec<NodeTerms>> {
    (0..g.tree.nodes.len()).map(|e| g.node_terms(e)).collect()
}

fn realify(x: Cdd, k: NodeKind) -> Cdd {
    match k {
        NodeKind::Boundary => Cdd::new(x.re, Dd::ZERO),
        NodeKind::Interior => x,
    }
}

/// Transition solver for one pair of twin centers at fixed marked positions.
#[derive(Debug, Clone)]
pub struct TwinSolver {
    pt: StableTree,
    qt: StableTree,
    topo: Topology,
    kinds: Vec<NodeKind>,
    identical: bool,
    constant: Vec<Cdd>,
    l0_p: Vec<Complex64>,
    l0_q: Vec<Complex64>,
}

impl TwinSolver {
    pub fn new(p: &ChartCenter, q: &ChartCenter, v: &[f64]) -> Result<Self> {
        let pt = p.with_v(v)?;
        let qt = q.with_v(v)?;
        let nn = pt.nodes.len();
        let kinds: Vec<NodeKind> = pt.nodes.iter().map(|n| n.kind).collect();
        let identical = pt == qt;
        let topo = pt.topology();
        let (constant, l0_p, l0_q) = if identical {
            pt.check()?;
            (vec![Cdd::ZERO; nn], vec![], vec![])
        } else {
            check_twins(&pt, &qt)?;
            let tp = all_terms(&Glued::new(&pt, &topo, vec![Cdd::ZERO; nn])?)?;
            let tq = all_terms(&Glued::new(&qt, &topo, vec![Cdd::ZERO; nn])?)?;
            (
                (0..nn)
                    .map(|e| realify(tp[e].l0_difference(&tq[e]), kinds[e]))
                    .collect(),
                tp.iter().map(|t| t.l0()).collect(),
                tq.iter().map(|t| t.l0()).collect(),
            )
        };
        Ok(TwinSolver {
            pt,
            qt,
            topo,
            kinds,
            identical,
            constant,
            l0_p,
            l0_q,
        })
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    /// Solves for the offsets given `z^q` per node in tree order (`None` for
    /// nodal; the imaginary part of boundary entries is ignored).
    pub fn solve(&self, zq: &[Option<Complex64>]) -> Result<TransitionOffsets> {
        let nn = self.kinds.len();
        let kinds = &self.kinds;
        if zq.len() != nn {
            return Err(Error::Domain(format!("{} node coordinates for {nn} nodes", zq.len())));
        }
        let t_min = -self.qt.cutoff.ln();
        for (e, z) in zq.iter().enumerate() {
            if let Some(z) = z {
                if !(z.re > t_min) || z.im.is_nan() {
                    return Err(Error::Domain(format!(
                        "node {e}: T = {} must exceed -log c = {t_min}",
                        z.re
                    )));
                }
            }
        }
        if self.identical {
            return Ok(TransitionOffsets {
                offsets: vec![Cdd::ZERO; nn],
                constant: vec![Cdd::ZERO; nn],
                remainder: vec![Cdd::ZERO; nn],
                iterations: 0,
                residual: 0.0,
            });
        }
        let zq_dd: Vec<Option<Cdd>> = zq
            .iter()
            .zip(kinds)
            .map(|(z, k)| {
                z.filter(|z| z.re != f64::INFINITY).map(|z| match k {
                    NodeKind::Boundary => Cdd::new(Dd::from_f64(z.re), Dd::PI),
                    NodeKind::Interior => Cdd::from_c64(z),
                })
            })
            .collect();
        let sig_q: Vec<Cdd> = zq_dd.iter().zip(kinds).map(|(z, &k)| sigma_at(k, *z)).collect();
        let dq: Vec<Cdd> = if sig_q.iter().all(|s| s.is_zero()) {
            vec![Cdd::ZERO; nn]
        } else {
            all_terms(&Glued::new(&self.qt, &self.topo, sig_q)?)?
                .iter()
                .map(|t| t.delta)
                .collect()
        };
        let c0 = &self.constant;
        let tp_min = -self.pt.cutoff.ln();
        let mut tau = vec![Cdd::ZERO; nn];
        let mut dp = vec![Cdd::ZERO; nn];
        let mut iterations = 0;
        loop {
            for e in 0..nn {
                if let Some(z) = zq_dd[e] {
                    let tp = (z.re + c0[e].re + tau[e].re).to_f64();
                    if !(tp > tp_min) {
                        return Err(Error::NoOverlap(format!(
                            "node {e}: T^p = {tp} is outside p's chart (needs > {tp_min})"
                        )));
                    }
                }
            }
            let sig_p: Vec<Cdd> = (0..nn)
                .map(|e| sigma_at(kinds[e], zq_dd[e].map(|z| z + c0[e] + tau[e])))
                .collect();
            if !sig_p.iter().all(|s| s.is_zero()) {
                let terms = all_terms(&Glued::new(&self.pt, &self.topo, sig_p)?)?;
                for e in 0..nn {
                    dp[e] = terms[e].delta;
                }
            }
            let mut change = 0.0_f64;
            let mut scale = 0.0_f64;
            for e in 0..nn {
                let mut t = dp[e] - dq[e];
                let floor = NOISE_FLOOR * dp[e].norm_f64().max(dq[e].norm_f64());
                if t.norm_f64() <= floor {
                    t = Cdd::ZERO;
                }
                let t = realify(t, kinds[e]);
                change = change.max((t - tau[e]).norm_f64());
                scale = scale.max(t.norm_f64());
                tau[e] = t;
            }
            iterations += 1;
            if change <= TOLERANCE * scale {
                break;
            }
            if iterations >= MAX_ITERATIONS {
                return Err(Error::Convergence {
                    iterations,
                    residual: change,
                });
            }
        }

        let offsets: Vec<Cdd> = (0..nn).map(|e| c0[e] + tau[e]).collect();
        let mut residual = 0.0_f64;
        for e in 0..nn {
            if zq_dd[e].is_none() {
                continue;
            }
            let d = -offsets[e].to_c64() + (self.l0_p[e] - self.l0_q[e]) + (dp[e] - dq[e]).to_c64();
            let d = match kinds[e] {
                NodeKind::Boundary => d.re.abs(),
                NodeKind::Interior => Complex64::new(d.re, wrap_angle_signed(d.im)).norm(),
            };
            residual = residual.max(d);
        }
        if !(residual < RESIDUAL_LIMIT) {
            return Err(Error::Convergence { iterations, residual });
        }
        Ok(TransitionOffsets {
            offsets,
            constant: c0.clone(),
            remainder: tau,
            iterations,
            residual,
        })
    }
}

/// Solves for the offsets at marked positions `v`, given `z^q` per node in
/// tree order (`None` for nodal; the imaginary part of boundary entries is ignored).
pub fn transition_offsets(
    p: &ChartCenter,
    q: &ChartCenter,
    v: &[f64],
    zq: &[Option<Complex64>],
) -> Result<TransitionOffsets> {
    TwinSolver::new(p, q, v)?.solve(zq)
}

/// Node coordinates `T + i theta` in tree order from slot-ordered log coordinates.
pub fn log_to_node_z(p: &ChartCenter, l: &LogCoords) -> Result<Vec<Option<Complex64>>> {
    let topo = p.topology();
    if l.boundary.len() != topo.m_d || l.interior.len() != topo.m_s {
        return Err(Error::Domain(format!(
            "coordinates have {} boundary and {} interior entries, tree has {} and {}",
            l.boundary.len(),
            l.interior.len(),
            topo.m_d,
            topo.m_s
        )));
    }
    Ok(topo
        .slot
        .iter()
        .map(|s| match *s {
            NodeRef::Boundary(j) => {
                let t = l.boundary[j];
                (t != f64::INFINITY).then(|| Complex64::new(t, 0.0))
            }
            NodeRef::Interior(i) => {
                let pr = l.interior[i];
                match pr.theta {
                    Some(th) if pr.t != f64::INFINITY => Some(Complex64::new(pr.t, th)),
                    _ => None,
                }
            }
        })
        .collect())
}

/// Offsets in slot order: `(boundary, interior)`.
pub fn offsets_by_slot(p: &ChartCenter, offsets: &[Cdd]) -> (Vec<Cdd>, Vec<Cdd>) {
    let topo = p.topology();
    let mut b = vec![Cdd::ZERO; topo.m_d];
    let mut i = vec![Cdd::ZERO; topo.m_s];
    for (e, s) in topo.slot.iter().enumerate() {
        match *s {
            NodeRef::Boundary(j) => b[j] = offsets[e],
            NodeRef::Interior(k) => i[k] = offsets[e],
        }
    }
    (b, i)
}

/// Transition in log coordinates: `T^p = T^q + Re off`, `theta^p = theta^q + Im off`.
pub fn chart_transition_log(
    p: &ChartCenter,
    q: &ChartCenter,
    v: &[f64],
    l: &LogCoords,
) -> Result<(LogCoords, TransitionOffsets)> {
    l.validate()?;
    let zq = log_to_node_z(p, l)?;
    let tr = transition_offsets(p, q, v, &zq)?;
    let (ob, oi) = offsets_by_slot(p, &tr.offsets);
    let out = LogCoords {
        boundary: l.boundary.iter().zip(&ob).map(|(&t, o)| t + o.re.to_f64()).collect(),
        interior: l
            .interior
            .iter()
            .zip(&oi)
            .map(|(pr, o)| match pr.theta {
                Some(th) if pr.t != f64::INFINITY => LogPair {
                    t: pr.t + o.re.to_f64(),
                    theta: Some(wrap_angle(th + o.im.to_f64())),
                },
                _ => *pr,
            })
            .collect(),
        cutoff: p.cutoff,
    };
    Ok((out, tr))
}

/// `S^p = S^q + log(1 + Re off / T^q)`, exact at `T^q = inf`.
fn shift_s(s_q: f64, t_q: f64, off: f64) -> f64 {
    if t_q == f64::INFINITY {
        s_q
    } else {
        s_q + (off / t_q).ln_1p()
    }
}

fn no_overlap_s(s_p: f64, cutoff: f64) -> Result<f64> {
    let s_min = (-cutoff.ln()).ln();
    if !(s_p > s_min) {
        return Err(Error::NoOverlap(format!(
            "log T^p = {s_p} is outside p's chart (needs > {s_min})"
        )));
    }
    Ok(s_p)
}

/// Node coordinates for a double-log point; `T = e^S` may be infinite.
fn double_log_to_node_z(p: &ChartCenter, d: &DoubleLogCoords) -> Result<Vec<Option<Complex64>>> {
    let topo = p.topology();
    if d.boundary.len() != topo.m_d || d.interior.len() != topo.m_s {
        return Err(Error::Domain(format!(
            "coordinates have {} boundary and {} interior entries, tree has {} and {}",
            d.boundary.len(),
            d.interior.len(),
            topo.m_d,
            topo.m_s
        )));
    }
    Ok(topo
        .slot
        .iter()
        .map(|s| match *s {
            NodeRef::Boundary(j) => {
                let t = t_from_s(d.boundary[j]);
                (t != f64::INFINITY).then(|| Complex64::new(t, 0.0))
            }
            NodeRef::Interior(i) => {
                let phi = d.interior[i];
                let t = t_from_s(phi.norm());
                (t != f64::INFINITY).then(|| Complex64::new(t, wrap_angle(phi.arg())))
            }
        })
        .collect())
}

/// Transition in double-log coordinates: returns `(v_p, d_p)` with `v_p = v_q`.
pub fn chart_transition(
    p: &ChartCenter,
    q: &ChartCenter,
    d_q: &DoubleLogCoords,
    v_q: &[f64],
) -> Result<(Vec<f64>, DoubleLogCoords)> {
    d_q.validate()?;
    let zq = double_log_to_node_z(p, d_q)?;
    let tr = transition_offsets(p, q, v_q, &zq)?;
    let (ob, oi) = offsets_by_slot(p, &tr.offsets);
    let mut boundary = Vec::with_capacity(ob.len());
    for (&s, o) in d_q.boundary.iter().zip(&ob) {
        if s == 0.0 {
            boundary.push(0.0);
            continue;
        }
        let s_q = 1.0 / s;
        let s_p = no_overlap_s(shift_s(s_q, t_from_s(s), o.re.to_f64()), p.cutoff)?;
        boundary.push(1.0 / s_p);
    }
    let mut interior = Vec::with_capacity(oi.len());
    for (&phi, o) in d_q.interior.iter().zip(&oi) {
        let r = phi.norm();
        if r == 0.0 {
            interior.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let s_p = no_overlap_s(shift_s(1.0 / r, t_from_s(r), o.re.to_f64()), p.cutoff)?;
        interior.push(Complex64::from_polar(1.0 / s_p, phi.arg() + o.im.to_f64()));
    }
    let out = DoubleLogCoords {
        boundary,
        interior,
        cutoff: p.cutoff,
    };
    Ok((v_q.to_vec(), out))
}

/// Transition in single-log coordinates.
pub fn chart_transition_single_log(
    p: &ChartCenter,
    q: &ChartCenter,
    sl_q: &SingleLogCoords,
    v_q: &[f64],
) -> Result<(Vec<f64>, SingleLogCoords)> {
    let l = crate::coords::single_log_to_log(sl_q)?;
    let (lp, _) = chart_transition_log(p, q, v_q, &l)?;
    let t_min = -p.cutoff.ln();
    for t in lp.boundary.iter().chain(lp.interior.iter().map(|x| &x.t)) {
        if !(*t > t_min) {
            return Err(Error::NoOverlap(format!("T^p = {t} is outside p's chart")));
        }
    }
    Ok((v_q.to_vec(), crate::coords::log_to_single_log(&lp)?))
}

impl ChartPair {
    pub fn offsets(&self, v: &[f64], zq: &[Option<Complex64>]) -> Result<TransitionOffsets> {
        transition_offsets(&self.p, &self.q, v, zq)
    }
}

/// Serializable summary of one transition evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub v: Vec<f64>,
    pub log: LogCoords,
    pub iterations: usize,
    pub residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::{rescale_corner_double, rescale_double_log, RescaleFactor};
    use crate::plumbing::models::{
        chain, disk_boundary_pair, disk_sphere_bubble, identical_pair, nonlinear_pair, rescale_pair, two_sphere,
    };
    use crate::plumbing::plumb::chart_map_phi;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identical_centers_give_the_identity() {
        let t = chain();
        let pair = identical_pair(&t);
        let d = DoubleLogCoords {
            boundary: vec![0.3],
            interior: vec![c(0.2, 0.1)],
            cutoff: t.cutoff,
        };
        let (v, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
        assert_eq!(v, t.v());
        assert_eq!(dp, d);
    }

    #[test]
    fn rescale_pair_matches_closed_forms() {
        let t = disk_sphere_bubble();
        let lam = c(E, 0.0);
        let pair = rescale_pair(&t, lam).unwrap();
        for phi in [c(0.3, 0.2), c(-0.1, 0.25), c(0.05, 0.0)] {
            let d = DoubleLogCoords {
                boundary: vec![],
                interior: vec![phi],
                cutoff: t.cutoff,
            };
            let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
            let want = rescale_double_log(phi, RescaleFactor::new(lam).unwrap()).unwrap();
            assert!((dp.interior[0] - want).norm() < 1e-9 * want.norm(), "{phi}");
        }
        let t = disk_boundary_pair();
        let pair = rescale_pair(&t, c(2.0, 0.0)).unwrap();
        for s in [0.3, 0.5, 0.01] {
            let d = DoubleLogCoords {
                boundary: vec![s],
                interior: vec![],
                cutoff: t.cutoff,
            };
            let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
            let want = rescale_corner_double(s, RescaleFactor::real(2.0).unwrap()).unwrap();
            assert!((dp.boundary[0] - want).abs() < 1e-9 * want, "{s}");
        }
    }

    #[test]
    fn nodal_coordinates_stay_nodal() {
        let t = chain();
        let pair = nonlinear_pair(&t, 0.3);
        let d = DoubleLogCoords {
            boundary: vec![0.0],
            interior: vec![c(0.2, 0.3)],
            cutoff: t.cutoff,
        };
        let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
        assert_eq!(dp.boundary[0], 0.0);
        let d = DoubleLogCoords {
            boundary: vec![0.4],
            interior: vec![c(0.0, 0.0)],
            cutoff: t.cutoff,
        };
        let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
        assert_eq!(dp.interior[0], c(0.0, 0.0));
    }

    #[test]
    fn depth_one_transition_lands_on_the_same_moduli_point() {
        for t in [two_sphere(), disk_boundary_pair(), disk_sphere_bubble()] {
            let pair = nonlinear_pair(&t, 0.3);
            let topo = t.topology();
            let l = LogCoords {
                boundary: vec![3.0; topo.m_d],
                interior: vec![
                    LogPair {
                        t: 3.5,
                        theta: Some(0.7)
                    };
                    topo.m_s
                ],
                cutoff: t.cutoff,
            };
            let (lp, tr) = chart_transition_log(&pair.p, &pair.q, &t.v(), &l).unwrap();
            assert!(tr.residual < 1e-12);
            let pq = crate::coords::from_log(&l).unwrap();
            let pp = crate::coords::from_log(&lp).unwrap();
            let mq = chart_map_phi(&pair.q, &t.v(), &pq).unwrap();
            let mp = chart_map_phi(&pair.p, &t.v(), &pp).unwrap();
            assert!(mp.distance(&mq).unwrap() < 1e-10, "{:?}", mp.distance(&mq));
        }
    }

    #[test]
    fn nonlinear_offsets_decay_towards_the_constant() {
        let t = chain();
        let pair = nonlinear_pair(&t, 0.3);
        let v = t.v();
        let at = |tt: f64| pair.offsets(&v, &[Some(c(tt, 0.0)), Some(c(tt, 1.0))]).unwrap().offsets;
        let inf = pair.offsets(&v, &[None, None]).unwrap().offsets;
        let d10 = (at(10.0)[1] - inf[1]).norm_f64();
        let d20 = (at(20.0)[1] - inf[1]).norm_f64();
        assert!(d10 > 0.0 && d20 < d10 * 1e-3, "{d10} {d20}");
    }

    #[test]
    fn out_of_chart_targets_are_rejected() {
        let t = disk_sphere_bubble();
        let mut pair = rescale_pair(&t, c(2.0, 0.0)).unwrap();
        pair.p.cutoff = (-5.0f64).exp();
        let l = LogCoords {
            boundary: vec![],
            interior: vec![LogPair {
                t: 3.0,
                theta: Some(0.0),
            }],
            cutoff: t.cutoff,
        };
        let r = chart_transition_log(&pair.p, &pair.q, &t.v(), &l);
        assert!(matches!(r, Err(Error::NoOverlap(_))), "{r:?}");
    }
}
