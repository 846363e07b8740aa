//! Memoized evaluation of estimate quantities with double-double central
//! differences.

use std::collections::HashMap;
use std::rc::Rc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Axis, GridKind, OuterVars, Part, QuantitySpec, Target};
use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};
use crate::plumbing::models::ChartPair;
use crate::plumbing::transition::TwinSolver;
use crate::plumbing::tree::NodeKind;

/// Default finite-difference step in every variable.
pub const DEFAULT_STEP: f64 = 0.02;
/// Default angle of every interior node along the sampled diagonal.
pub const DEFAULT_THETA: f64 = 0.5;

/// A point of the `q` chart: marked positions and per-node `T`, `theta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
}

impl State {
    fn shifted(&self, axis: Axis, d: f64) -> State {
        let mut s = self.clone();
        match axis {
            Axis::V(k) => s.v[k] += d,
            Axis::T(e) => s.t[e] += d,
            Axis::S(e) => s.t[e] *= d.exp(),
            Axis::Theta(e) => s.theta[e] += d,
        }
        s
    }
}

/// Marked positions and angles that a grid sweep keeps fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub v: Vec<f64>,
    pub theta: Vec<f64>,
}

impl BasePoint {
    pub fn state(&self, grid: GridKind, g: f64) -> State {
        let t = match grid {
            GridKind::T => g,
            GridKind::S => g.exp(),
        };
        State {
            v: self.v.clone(),
            t: vec![t; self.theta.len()],
            theta: self.theta.clone(),
        }
    }
}

type Offsets = Rc<(Vec<Cdd>, Vec<Cdd>)>;

/// Transition offsets for one chart pair, memoized by point and nodal set.
pub struct Evaluator<'a> {
    pair: &'a ChartPair,
    kinds: Vec<NodeKind>,
    step: f64,
    solvers: HashMap<Vec<u64>, TwinSolver>,
    memo: HashMap<Vec<u64>, Offsets>,
    /// Number of transition solves performed.
    pub solves: usize,
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// `(offset, weight)` pairs of the second-order central stencil for the `k`-th derivative.
fn stencil(k: usize) -> Result<&'static [(f64, f64)]> {
    Ok(match k {
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        4 => &[(-2.0, 1.0), (-1.0, -4.0), (0.0, 6.0), (1.0, -4.0), (2.0, 1.0)],
        5 => &[
            (-3.0, -0.5),
            (-2.0, 2.0),
            (-1.0, -2.5),
            (1.0, 2.5),
            (2.0, -2.0),
            (3.0, 0.5),
        ],
        6 => &[
            (-3.0, 1.0),
            (-2.0, -6.0),
            (-1.0, 15.0),
            (0.0, -20.0),
            (1.0, 15.0),
            (2.0, -6.0),
            (3.0, 1.0),
        ],
        _ => return Err(Error::Domain(format!("no stencil for derivative order {k}"))),
    })
}

/// `(axis, order)` list with repeated axes merged.
fn merge(ops: &[Axis], extra: Option<(Axis, usize)>) -> Vec<(Axis, usize)> {
    let mut out: Vec<(Axis, usize)> = Vec::new();
    let all = ops.iter().map(|&a| (a, 1)).chain(extra);
    for (a, k) in all {
        match out.iter_mut().find(|(b, _)| *b == a) {
            Some(e) => e.1 += k,
            None => out.push((a, k)),
        }
    }
    out
}

impl<'a> Evaluator<'a> {
    pub fn new(pair: &'a ChartPair) -> Result<Self> {
        let kinds = pair.p.nodes.iter().map(|n| n.kind).collect();
        let mut ev = Evaluator {
            pair,
            kinds,
            step: DEFAULT_STEP,
            solvers: HashMap::new(),
            memo: HashMap::new(),
            solves: 0,
        };
        ev.solver(&pair.q.v())?;
        Ok(ev)
    }

    pub fn with_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step < 0.5) {
            return Err(Error::Domain(format!("finite-difference step {step} outside (0, 0.5)")));
        }
        self.step = step;
        Ok(self)
    }

    pub fn pair(&self) -> &ChartPair {
        self.pair
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    /// The center's marked positions and the default angle at interior nodes.
    pub fn default_base(&self) -> BasePoint {
        BasePoint {
            v: self.pair.q.v(),
            theta: self
                .kinds
                .iter()
                .map(|k| match k {
                    NodeKind::Boundary => 0.0,
                    NodeKind::Interior => DEFAULT_THETA,
                })
                .collect(),
        }
    }

    fn solver(&mut self, v: &[f64]) -> Result<&TwinSolver> {
        let key = bits(v);
        if !self.solvers.contains_key(&key) {
            let s = TwinSolver::new(&self.pair.p, &self.pair.q, v)?;
            self.solvers.insert(key.clone(), s);
        }
        Ok(&self.solvers[&key])
    }

    /// `(L0^p - L0^q, dL^p - dL^q)` per node, with the nodes in `nodal` held at `sigma = 0`.
    pub fn offsets(&mut self, s: &State, nodal: &[bool]) -> Result<Offsets> {
        let nn = self.kinds.len();
        if s.t.len() != nn || s.theta.len() != nn || nodal.len() != nn {
            return Err(Error::Domain(format!("state does not match a tree with {nn} nodes")));
        }
        let mut key = bits(&s.v);
        let mut zq = Vec::with_capacity(nn);
        for e in 0..nn {
            if nodal[e] {
                key.extend([u64::MAX, u64::MAX]);
                zq.push(None);
                continue;
            }
            let th = match self.kinds[e] {
                NodeKind::Boundary => 0.0,
                NodeKind::Interior => s.theta[e],
            };
            key.extend([s.t[e].to_bits(), th.to_bits()]);
            zq.push(Some(Complex64::new(s.t[e], th)));
        }
        if let Some(o) = self.memo.get(&key) {
            return Ok(o.clone());
        }
        let tr = self.solver(&s.v)?.solve(&zq)?;
        self.solves += 1;
        let o = Rc::new((tr.constant, tr.remainder));
        self.memo.insert(key, o.clone());
        Ok(o)
    }

    fn offset(&mut self, s: &State, nodal: &[bool], e: usize, with_constant: bool) -> Result<Cdd> {
        let o = self.offsets(s, nodal)?;
        Ok(if with_constant { o.0[e] + o.1[e] } else { o.1[e] })
    }

    /// The target at `s`, with `nodal` nodes held at `sigma = 0`. Linear
    /// targets drop the parameter-independent constant when `with_constant` is false.
    fn target(&mut self, target: Target, s: &State, nodal: &[bool], with_constant: bool) -> Result<Cdd> {
        let e = target.node();
        match target {
            Target::LogGap(_) => Ok(Cdd::real(self.offset(s, nodal, e, with_constant)?.re)),
            Target::AngleGap(_) => Ok(Cdd::real(self.offset(s, nodal, e, with_constant)?.im)),
            Target::DoubleLogGap(_) => {
                let off = self.offset(s, nodal, e, true)?;
                Ok(Cdd::real((off.re / Dd::from_f64(s.t[e])).ln_1p()))
            }
            Target::CornerS(_) => {
                let off = self.offset(s, nodal, e, true)?;
                let (sq, sp, l) = s_pair(s.t[e], off.re);
                Ok(Cdd::real(-(l / (sp * sq))))
            }
            Target::CornerPhi(_) => {
                let o = self.offsets(s, nodal)?;
                let mut limit_mask = nodal.to_vec();
                limit_mask[e] = true;
                let o0 = self.offsets(s, &limit_mask)?;
                let off = o.0[e] + o.1[e];
                let f = o0.0[e].im + o0.1[e].im;
                let delta = o.1[e].im - o0.1[e].im;
                let (sq, sp, l) = s_pair(s.t[e], off.re);
                let (sh, ch) = (delta.mul_f64(0.5)).sin_cos();
                let rot_minus_one = Cdd::new(-(sh * sh).mul_f64(2.0), (sh * ch).mul_f64(2.0));
                let inner = rot_minus_one.scale(Dd::ONE / sp) + Cdd::real(-(l / (sp * sq)));
                Ok(Cdd::cis(Dd::from_f64(s.theta[e]) + f) * inner)
            }
        }
    }

    /// Target with inclusion-exclusion over the annihilated nodes.
    fn annihilated(&mut self, spec: &QuantitySpec, s: &State) -> Result<Cdd> {
        let nn = self.kinds.len();
        match spec.part {
            Part::Whole => {}
            Part::Limit => return self.target(spec.target, s, &vec![true; nn], true),
            Part::Remainder => {
                let full = self.target(spec.target, s, &vec![false; nn], true)?;
                return Ok(full - self.target(spec.target, s, &vec![true; nn], true)?);
            }
        }
        let mut base = vec![false; nn];
        for &e in &spec.nodal {
            base[e] = true;
        }
        let ann: Vec<usize> = spec.annihilate.iter().copied().filter(|&e| !base[e]).collect();
        if ann.len() < spec.annihilate.len() {
            return Ok(Cdd::ZERO);
        }
        let with_constant = !(spec.target.is_linear() && !ann.is_empty());
        let mut acc = Cdd::ZERO;
        for subset in 0..(1usize << ann.len()) {
            let mut mask = base.clone();
            for (b, &e) in ann.iter().enumerate() {
                if subset >> b & 1 == 1 {
                    mask[e] = true;
                }
            }
            let v = self.target(spec.target, s, &mask, with_constant)?;
            acc = if subset.count_ones() % 2 == 0 { acc + v } else { acc - v };
        }
        Ok(acc)
    }

    fn derivative(&mut self, spec: &QuantitySpec, s: &State, ops: &[(Axis, usize)]) -> Result<Cdd> {
        let Some(&(axis, k)) = ops.first() else {
            return self.annihilated(spec, s);
        };
        let h = self.step;
        let mut acc = Cdd::ZERO;
        for &(m, w) in stencil(k)? {
            let d = self.derivative(spec, &s.shifted(axis, m * h), &ops[1..])?;
            acc = acc + d.scale(Dd::from_f64(w));
        }
        let mut hk = Dd::ONE;
        for _ in 0..k {
            hk = hk * Dd::from_f64(h);
        }
        Ok(acc.scale(Dd::ONE / hk))
    }

    fn outer_axes(&self, outer: OuterVars, v_len: usize) -> Vec<Axis> {
        let mut axes: Vec<Axis> = (0..v_len).map(Axis::V).collect();
        let nn = self.kinds.len();
        let interior = (0..nn).filter(|&e| self.kinds[e] == NodeKind::Interior);
        match outer {
            OuterVars::MarkedOnly => {}
            OuterVars::LogVars => {
                axes.extend((0..nn).map(Axis::T));
                axes.extend(interior.map(Axis::Theta));
            }
            OuterVars::DoubleLogVars => {
                axes.extend((0..nn).map(Axis::S));
                axes.extend(interior.map(Axis::Theta));
            }
        }
        axes
    }

    /// `|d_inner q|` for `n = 1`; otherwise the largest pure `(n-1)`-th outer
    /// derivative of `d_inner q` over the outer variables.
    pub fn quantity(&mut self, spec: &QuantitySpec, s: &State) -> Result<f64> {
        spec.validate(&self.pair.q)?;
        if spec.n == 1 {
            let ops = merge(&spec.inner, None);
            return Ok(self.derivative(spec, s, &ops)?.norm_f64());
        }
        let mut best = 0.0_f64;
        for a in self.outer_axes(spec.outer, s.v.len()) {
            let ops = merge(&spec.inner, Some((a, spec.n - 1)));
            best = best.max(self.derivative(spec, s, &ops)?.norm_f64());
        }
        Ok(best)
    }

    /// The raw target value at `s` (no derivatives, no annihilation).
    pub fn target_value(&mut self, target: Target, s: &State) -> Result<Complex64> {
        let nodal = vec![false; self.kinds.len()];
        Ok(self.target(target, s, &nodal, true)?.to_c64())
    }

    /// `theta^p - theta^q` at interior node `e` with the given nodal set, in ordinary precision.
    pub fn angle_gap(&mut self, s: &State, e: usize, nodal: &[bool]) -> Result<f64> {
        Ok(self.offset(s, nodal, e, true)?.im.to_f64())
    }
}

/// `(S^q, S^p, log(1 + off/T))` with `S^p = S^q + log(1 + off/T)`.
fn s_pair(t: f64, off: Dd) -> (Dd, Dd, Dd) {
    let sq = Dd::from_f64(t).ln();
    let l = (off / Dd::from_f64(t)).ln_1p();
    (sq, sq + l, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::{Abscissa, EstimateKind};
    use crate::plumbing::models::{chain, nonlinear_pair};

    fn spec(target: Target, inner: Vec<Axis>, annihilate: Vec<usize>) -> QuantitySpec {
        QuantitySpec {
            kind: EstimateKind::LogGap,
            n: 1,
            target,
            inner,
            nodal: vec![],
            annihilate,
            part: Part::Whole,
            outer: OuterVars::LogVars,
            abscissa: Abscissa::T(0),
            grid: GridKind::T,
            label: "test".into(),
        }
    }

    #[test]
    fn annihilation_leaves_derivatives_unchanged() {
        let pair = nonlinear_pair(&chain(), 0.3);
        let mut ev = Evaluator::new(&pair).unwrap();
        let s = ev.default_base().state(GridKind::T, 6.0);
        let plain = ev
            .quantity(&spec(Target::LogGap(0), vec![Axis::T(1)], vec![]), &s)
            .unwrap();
        let ann = ev
            .quantity(&spec(Target::LogGap(0), vec![Axis::T(1)], vec![1]), &s)
            .unwrap();
        assert!(plain > 0.0);
        assert!((plain - ann).abs() <= 1e-12 * plain, "{plain} vs {ann}");
    }

    #[test]
    fn stencils_reproduce_polynomial_derivatives() {
        for k in 1..=6 {
            let st = stencil(k).unwrap();
            for p in 0..=k {
                let sum: f64 = st.iter().map(|&(m, w)| w * m.powi(p as i32)).sum();
                let want = if p == k { (1..=k).product::<usize>() as f64 } else { 0.0 };
                assert!((sum - want).abs() < 1e-12, "order {k}, power {p}: {sum}");
            }
        }
    }
}
