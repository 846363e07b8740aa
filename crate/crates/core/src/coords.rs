//! Gluing-parameter coordinate systems near a corner of the moduli space.
//!
//! Raw parameters are `r >= 0` for boundary nodes and complex `sigma` for
//! interior nodes. Writing `sigma = exp(-(T + i theta))`, the log, single-log
//! and double-log systems use `(T, theta)`, `(1/T, e^{i theta}/T)` and
//! `(1/log T, e^{i theta}/log T)` respectively. An unsmoothed node has
//! `T = +inf` and sits at `0` in both corner systems.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Default cutoff `c = e^{-2}`.
pub const DEFAULT_CUTOFF: f64 = 0.135_335_283_236_612_7;

fn check_cutoff(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("cutoff {c} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_double_log_cutoff(c: f64) -> Result<()> {
    check_cutoff(c)?;
    if -c.ln() <= 1.0 {
        return Err(Error::Domain(format!(
            "double-log coordinates need cutoff < 1/e, got {c}"
        )));
    }
    Ok(())
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_angle_signed(theta: f64) -> f64 {
    let t = wrap_angle(theta);
    if t > std::f64::consts::PI {
        t - TAU
    } else {
        t
    }
}

/// Which node a per-node operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum NodeRef {
    Boundary(usize),
    Interior(usize),
}

/// Raw gluing parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeParams {
    pub boundary: Vec<f64>,
    pub interior: Vec<Complex64>,
    pub cutoff: f64,
}

impl NodeParams {
    pub fn new(boundary: Vec<f64>, interior: Vec<Complex64>, cutoff: f64) -> Result<Self> {
        let p = NodeParams {
            boundary,
            interior,
            cutoff,
        };
        p.validate()?;
        Ok(p)
    }

    /// All parameters zero: the deepest corner.
    pub fn zeros(m_d: usize, m_s: usize, cutoff: f64) -> Self {
        NodeParams {
            boundary: vec![0.0; m_d],
            interior: vec![Complex64::new(0.0, 0.0); m_s],
            cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_cutoff(self.cutoff)?;
        for (j, &r) in self.boundary.iter().enumerate() {
            if !(r >= 0.0 && r < self.cutoff) {
                return Err(Error::Domain(format!(
                    "boundary parameter r[{j}] = {r} outside [0, {})",
                    self.cutoff
                )));
            }
        }
        for (i, s) in self.interior.iter().enumerate() {
            if !(s.norm() < self.cutoff) {
                return Err(Error::Domain(format!(
                    "interior parameter sigma[{i}] = {s} outside the disk of radius {}",
                    self.cutoff
                )));
            }
        }
        Ok(())
    }
}

/// `(T, theta)` of one interior node; `theta` is `None` when `T = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPair {
    pub t: f64,
    pub theta: Option<f64>,
}

impl LogPair {
    /// `T + i theta`, the holomorphic coordinate with `sigma = exp(-z)`.
    pub fn z(&self) -> Option<Complex64> {
        self.theta.map(|th| Complex64::new(self.t, th))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogCoords {
    pub boundary: Vec<f64>,
    pub interior: Vec<LogPair>,
    pub cutoff: f64,
}

impl LogCoords {
    pub fn validate(&self) -> Result<()> {
        check_cutoff(self.cutoff)?;
        let t_min = -self.cutoff.ln();
        for (j, &t) in self.boundary.iter().enumerate() {
            if !(t > t_min) {
                return Err(Error::Domain(format!(
                    "boundary T[{j}] = {t} must exceed -log c = {t_min}"
                )));
            }
        }
        for (i, p) in self.interior.iter().enumerate() {
            if !(p.t > t_min) {
                return Err(Error::Domain(format!(
                    "interior T[{i}] = {} must exceed -log c = {t_min}",
                    p.t
                )));
            }
            match p.theta {
                None if p.t.is_finite() => return Err(Error::Domain(format!("interior theta[{i}] missing"))),
                Some(th) if !th.is_finite() => return Err(Error::Domain(format!("interior theta[{i}] not finite"))),
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleLogCoords {
    pub boundary: Vec<f64>,
    pub interior: Vec<Complex64>,
    pub cutoff: f64,
}

impl SingleLogCoords {
    /// Upper bound `-1/log c` of `t` and `|rho|`.
    pub fn bound(cutoff: f64) -> f64 {
        -1.0 / cutoff.ln()
    }

    pub fn validate(&self) -> Result<()> {
        check_cutoff(self.cutoff)?;
        let b = Self::bound(self.cutoff);
        for (j, &t) in self.boundary.iter().enumerate() {
            if !(t >= 0.0 && t < b) {
                return Err(Error::Domain(format!("t[{j}] = {t} outside [0, {b})")));
            }
        }
        for (i, r) in self.interior.iter().enumerate() {
            if !(r.norm() < b) {
                return Err(Error::Domain(format!("rho[{i}] = {r} outside the disk of radius {b}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleLogCoords {
    pub boundary: Vec<f64>,
    pub interior: Vec<Complex64>,
    pub cutoff: f64,
}

impl DoubleLogCoords {
    /// Upper bound `1/log(-log c)` of `s` and `|phi|`.
    pub fn bound(cutoff: f64) -> f64 {
        1.0 / (-cutoff.ln()).ln()
    }

    pub fn validate(&self) -> Result<()> {
        check_double_log_cutoff(self.cutoff)?;
        let b = Self::bound(self.cutoff);
        for (j, &s) in self.boundary.iter().enumerate() {
            if !(s >= 0.0 && s < b) {
                return Err(Error::Domain(format!("s[{j}] = {s} outside [0, {b})")));
            }
        }
        for (i, p) in self.interior.iter().enumerate() {
            if !(p.norm() < b) {
                return Err(Error::Domain(format!("phi[{i}] = {p} outside the disk of radius {b}")));
            }
        }
        Ok(())
    }
}

/// Multiplier `lambda` in `sigma' = lambda sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaleFactor(pub Complex64);

impl RescaleFactor {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !(lambda.norm() > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("rescale factor {lambda} must be nonzero")));
        }
        Ok(RescaleFactor(lambda))
    }

    pub fn real(lambda: f64) -> Result<Self> {
        Self::new(Complex64::new(lambda, 0.0))
    }

    /// `log lambda` for a positive real factor.
    pub fn log_real(&self) -> Result<f64> {
        if self.0.im != 0.0 || !(self.0.re > 0.0) {
            return Err(Error::Domain(format!(
                "rescale factor {} must be real positive here",
                self.0
            )));
        }
        Ok(self.0.re.ln())
    }
}

/// `T = -log x`, with `+inf` at `x = 0`.
fn neg_log(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        -x.ln()
    }
}

fn interior_log(s: Complex64) -> LogPair {
    if s.norm() == 0.0 {
        return LogPair {
            t: f64::INFINITY,
            theta: None,
        };
    }
    let l = s.ln();
    LogPair {
        t: -l.re,
        theta: Some(wrap_angle(-l.im)),
    }
}

pub fn to_log(p: &NodeParams) -> Result<LogCoords> {
    p.validate()?;
    Ok(LogCoords {
        boundary: p.boundary.iter().map(|&r| neg_log(r)).collect(),
        interior: p.interior.iter().map(|&s| interior_log(s)).collect(),
        cutoff: p.cutoff,
    })
}

/// `sigma = exp(-(T + i theta))`.
pub fn sigma_from_log(t: f64, theta: f64) -> Complex64 {
    if t == f64::INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((-t).exp(), -theta)
}

pub fn from_log(l: &LogCoords) -> Result<NodeParams> {
    l.validate()?;
    Ok(NodeParams {
        boundary: l.boundary.iter().map(|&t| (-t).exp()).collect(),
        interior: l
            .interior
            .iter()
            .map(|p| sigma_from_log(p.t, p.theta.unwrap_or(0.0)))
            .collect(),
        cutoff: l.cutoff,
    })
}

fn inv(t: f64) -> f64 {
    if t == f64::INFINITY {
        0.0
    } else {
        1.0 / t
    }
}

pub fn log_to_single_log(l: &LogCoords) -> Result<SingleLogCoords> {
    l.validate()?;
    Ok(SingleLogCoords {
        boundary: l.boundary.iter().map(|&t| inv(t)).collect(),
        interior: l
            .interior
            .iter()
            .map(|p| match p.theta {
                Some(th) if p.t.is_finite() => Complex64::from_polar(1.0 / p.t, th),
                _ => Complex64::new(0.0, 0.0),
            })
            .collect(),
        cutoff: l.cutoff,
    })
}

pub fn single_log_to_log(sl: &SingleLogCoords) -> Result<LogCoords> {
    sl.validate()?;
    let pair = |r: &Complex64| {
        if r.norm() == 0.0 {
            LogPair {
                t: f64::INFINITY,
                theta: None,
            }
        } else {
            LogPair {
                t: 1.0 / r.norm(),
                theta: Some(wrap_angle(r.arg())),
            }
        }
    };
    Ok(LogCoords {
        boundary: sl
            .boundary
            .iter()
            .map(|&t| if t == 0.0 { f64::INFINITY } else { 1.0 / t })
            .collect(),
        interior: sl.interior.iter().map(pair).collect(),
        cutoff: sl.cutoff,
    })
}

pub fn log_to_double_log(l: &LogCoords) -> Result<DoubleLogCoords> {
    l.validate()?;
    check_double_log_cutoff(l.cutoff)?;
    Ok(DoubleLogCoords {
        boundary: l.boundary.iter().map(|&t| inv(t.ln())).collect(),
        interior: l
            .interior
            .iter()
            .map(|p| match p.theta {
                Some(th) if p.t.is_finite() => Complex64::from_polar(1.0 / p.t.ln(), th),
                _ => Complex64::new(0.0, 0.0),
            })
            .collect(),
        cutoff: l.cutoff,
    })
}

/// `T = exp(1/s)`, `+inf` at `s = 0`.
pub fn t_from_s(s: f64) -> f64 {
    if s == 0.0 {
        f64::INFINITY
    } else {
        (1.0 / s).exp()
    }
}

pub fn double_log_to_log(d: &DoubleLogCoords) -> Result<LogCoords> {
    d.validate()?;
    let pair = |p: &Complex64| {
        if p.norm() == 0.0 {
            LogPair {
                t: f64::INFINITY,
                theta: None,
            }
        } else {
            LogPair {
                t: t_from_s(p.norm()),
                theta: Some(wrap_angle(p.arg())),
            }
        }
    };
    Ok(LogCoords {
        boundary: d.boundary.iter().map(|&s| t_from_s(s)).collect(),
        interior: d.interior.iter().map(pair).collect(),
        cutoff: d.cutoff,
    })
}

pub fn to_single_log(p: &NodeParams) -> Result<SingleLogCoords> {
    log_to_single_log(&to_log(p)?)
}

pub fn from_single_log(sl: &SingleLogCoords) -> Result<NodeParams> {
    from_log(&single_log_to_log(sl)?)
}

pub fn to_double_log(p: &NodeParams) -> Result<DoubleLogCoords> {
    check_double_log_cutoff(p.cutoff)?;
    log_to_double_log(&to_log(p)?)
}

pub fn from_double_log(d: &DoubleLogCoords) -> Result<NodeParams> {
    from_log(&double_log_to_log(d)?)
}

/// Effect of `sigma' = lambda sigma` on one node in log coordinates.
///
/// Boundary nodes accept only positive real `lambda`. A node at `T = +inf`
/// stays there.
pub fn rescale_log(l: &LogCoords, node: NodeRef, lambda: RescaleFactor) -> Result<LogCoords> {
    l.validate()?;
    let t_min = -l.cutoff.ln();
    let mut out = l.clone();
    match node {
        NodeRef::Boundary(j) => {
            let a = lambda.log_real()?;
            let t = *out
                .boundary
                .get(j)
                .ok_or_else(|| Error::Domain(format!("no boundary node {j}")))?;
            if t.is_finite() {
                let tp = t - a;
                if !(tp > t_min) {
                    return Err(Error::Range(format!("rescaled T = {tp} leaves (-log c, inf]")));
                }
                out.boundary[j] = tp;
            }
        }
        NodeRef::Interior(i) => {
            let p = *out
                .interior
                .get(i)
                .ok_or_else(|| Error::Domain(format!("no interior node {i}")))?;
            if p.t.is_finite() {
                let tp = p.t - lambda.0.norm().ln();
                if !(tp > t_min) {
                    return Err(Error::Range(format!("rescaled T = {tp} leaves (-log c, inf]")));
                }
                out.interior[i] = LogPair {
                    t: tp,
                    theta: p.theta.map(|th| wrap_angle(th - lambda.0.arg())),
                };
            }
        }
    }
    Ok(out)
}

/// `rho / (1 - a |rho|)` with `a = log lambda`.
pub fn rescale_single_log(rho: Complex64, lambda: RescaleFactor) -> Result<Complex64> {
    let a = lambda.log_real()?;
    let den = 1.0 - a * rho.norm();
    if !(den > 0.0) {
        return Err(Error::Range(format!("1 - log(lambda)|rho| = {den} is not positive")));
    }
    Ok(rho / den)
}

/// Factor `1 + x log(1 - a e^{-1/x})` shared by both double-log rescales.
fn double_log_denominator(x: f64, a: f64) -> Result<f64> {
    let inner = a * (-1.0 / x).exp();
    if !(inner < 1.0) {
        return Err(Error::Range(format!(
            "1 - log(lambda) e^(-1/|phi|) = {} is not positive",
            1.0 - inner
        )));
    }
    let den = 1.0 + x * (-inner).ln_1p();
    if !(den > 0.0) {
        return Err(Error::Range(format!("rescaled log T is not positive (factor {den})")));
    }
    Ok(den)
}

/// `phi / (1 + |phi| log(1 - a e^{-1/|phi|}))`, `0 -> 0`.
pub fn rescale_double_log(phi: Complex64, lambda: RescaleFactor) -> Result<Complex64> {
    let a = lambda.log_real()?;
    let x = phi.norm();
    if x == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(phi / double_log_denominator(x, a)?)
}

/// `t / (1 - a t)`.
pub fn rescale_corner(t: f64, lambda: RescaleFactor) -> Result<f64> {
    let a = lambda.log_real()?;
    if t < 0.0 {
        return Err(Error::Domain(format!("corner variable t = {t} is negative")));
    }
    let den = 1.0 - a * t;
    if !(den > 0.0) {
        return Err(Error::Range(format!("1 - log(lambda) t = {den} is not positive")));
    }
    Ok(t / den)
}

/// [`rescale_corner`] in double-double, with `a = log lambda` taken in double-double.
pub fn rescale_corner_dd(t: Dd, lambda: RescaleFactor) -> Result<Dd> {
    lambda.log_real()?;
    let a = Dd::from_f64(lambda.0.re).ln();
    if t.hi < 0.0 {
        return Err(Error::Domain(format!("corner variable t = {} is negative", t.hi)));
    }
    let den = Dd::ONE - a * t;
    if !(den.hi > 0.0) {
        return Err(Error::Range(format!("1 - log(lambda) t = {} is not positive", den.hi)));
    }
    Ok(t / den)
}

/// `s / (1 + s log(1 - a e^{-1/s}))`, `0 -> 0`.
pub fn rescale_corner_double(s: f64, lambda: RescaleFactor) -> Result<f64> {
    let a = lambda.log_real()?;
    if s < 0.0 {
        return Err(Error::Domain(format!("corner variable s = {s} is negative")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(s / double_log_denominator(s, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn log_examples() {
        let p = NodeParams::new(vec![(-10f64).exp()], vec![], DEFAULT_CUTOFF).unwrap();
        let l = to_log(&p).unwrap();
        assert!(close(l.boundary[0], 10.0, 1e-15));

        let p = NodeParams::new(vec![0.0], vec![Complex64::new(0.0, 0.0)], DEFAULT_CUTOFF).unwrap();
        let l = to_log(&p).unwrap();
        assert_eq!(l.boundary[0], f64::INFINITY);
        assert_eq!(l.interior[0].t, f64::INFINITY);
        assert_eq!(l.interior[0].theta, None);

        let s = Complex64::from_polar((-10f64).exp(), -1.0);
        let l = to_log(&NodeParams::new(vec![], vec![s], DEFAULT_CUTOFF).unwrap()).unwrap();
        assert!(close(l.interior[0].t, 10.0, 1e-15));
        assert!(close(l.interior[0].theta.unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn from_log_examples() {
        let l = LogCoords {
            boundary: vec![10.0, f64::INFINITY],
            interior: vec![LogPair {
                t: 10.0,
                theta: Some(PI),
            }],
            cutoff: DEFAULT_CUTOFF,
        };
        let p = from_log(&l).unwrap();
        assert!(close(p.boundary[0], (-10f64).exp(), 1e-15));
        assert_eq!(p.boundary[1], 0.0);
        assert!(close(p.interior[0].re, -(-10f64).exp(), 1e-15));
        assert!(p.interior[0].im.abs() < 1e-19);
    }

    #[test]
    fn single_and_double_log_examples() {
        let e10 = (-10f64).exp();
        let p = NodeParams::new(vec![e10, 0.0], vec![Complex64::new(e10, 0.0)], DEFAULT_CUTOFF).unwrap();
        let sl = to_single_log(&p).unwrap();
        assert!(close(sl.boundary[0], 0.1, 1e-15));
        assert_eq!(sl.boundary[1], 0.0);
        assert!(close(sl.interior[0].re, 0.1, 1e-15));

        let s = Complex64::from_polar(e10, 1.0);
        let p = NodeParams::new(vec![e10], vec![s, Complex64::new(0.0, 0.0)], DEFAULT_CUTOFF).unwrap();
        let d = to_double_log(&p).unwrap();
        assert!(close(d.boundary[0], 1.0 / 10f64.ln(), 1e-15));
        // theta = -arg sigma = -1, so phi = e^{-i}/log 10.
        let want = Complex64::from_polar(1.0 / 10f64.ln(), -1.0);
        assert!((d.interior[0] - want).norm() < 1e-15);
        assert_eq!(d.interior[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn from_double_log_examples() {
        let d = DoubleLogCoords {
            boundary: vec![1.0 / 10f64.ln(), 0.0],
            interior: vec![Complex64::new(0.3, 0.0)],
            cutoff: DEFAULT_CUTOFF,
        };
        let p = from_double_log(&d).unwrap();
        assert!(close(p.boundary[0], (-10f64).exp(), 1e-13));
        assert_eq!(p.boundary[1], 0.0);
        let want = (-(1.0f64 / 0.3).exp()).exp();
        assert!(close(p.interior[0].re, want, 1e-13));
    }

    #[test]
    fn double_log_rejects_large_cutoff() {
        let p = NodeParams::new(vec![0.1], vec![], 0.5).unwrap();
        assert!(matches!(to_double_log(&p), Err(Error::Domain(_))));
        assert!(NodeParams::new(vec![0.2], vec![], DEFAULT_CUTOFF).is_err());
    }

    #[test]
    fn rescale_examples() {
        let e = RescaleFactor::real(E).unwrap();
        let one = RescaleFactor::real(1.0).unwrap();
        let l = LogCoords {
            boundary: vec![10.0, f64::INFINITY],
            interior: vec![],
            cutoff: DEFAULT_CUTOFF,
        };
        let r = rescale_log(&l, NodeRef::Boundary(0), e).unwrap();
        assert!(close(r.boundary[0], 9.0, 1e-15));
        let r = rescale_log(&l, NodeRef::Boundary(1), RescaleFactor::real(2.0).unwrap()).unwrap();
        assert_eq!(r.boundary[1], f64::INFINITY);
        assert_eq!(rescale_log(&l, NodeRef::Boundary(0), one).unwrap(), l);

        let rho = rescale_single_log(Complex64::new(0.1, 0.0), e).unwrap();
        assert!(close(rho.re, 1.0 / 9.0, 1e-15));
        assert_eq!(
            rescale_single_log(Complex64::new(0.0, 0.0), RescaleFactor::real(5.0).unwrap()).unwrap(),
            Complex64::new(0.0, 0.0)
        );

        let phi = Complex64::new(1.0 / 10f64.ln(), 0.0);
        let phi2 = rescale_double_log(phi, e).unwrap();
        assert!(close(phi2.norm(), 1.0 / 9f64.ln(), 1e-14));
        assert_eq!(
            rescale_double_log(Complex64::new(0.0, 0.0), RescaleFactor::real(7.0).unwrap()).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            rescale_double_log(Complex64::new(0.2, 0.0), one).unwrap(),
            Complex64::new(0.2, 0.0)
        );

        assert!(close(rescale_corner(0.1, e).unwrap(), 1.0 / 9.0, 1e-15));
        assert_eq!(rescale_corner(0.0, e).unwrap(), 0.0);
        assert!(close(
            rescale_corner_double(1.0 / 10f64.ln(), e).unwrap(),
            1.0 / 9f64.ln(),
            1e-14
        ));
        assert_eq!(rescale_corner_double(0.0, e).unwrap(), 0.0);
    }

    #[test]
    fn rescale_range_errors() {
        let big = RescaleFactor::real(100.0).unwrap();
        assert!(matches!(
            rescale_single_log(Complex64::new(0.3, 0.0), big),
            Err(Error::Range(_))
        ));
        assert!(matches!(rescale_corner(0.3, big), Err(Error::Range(_))));
        let huge = RescaleFactor::real(1e6).unwrap();
        assert!(matches!(rescale_corner_double(1.0, huge), Err(Error::Range(_))));
        let l = LogCoords {
            boundary: vec![2.5],
            interior: vec![],
            cutoff: DEFAULT_CUTOFF,
        };
        assert!(matches!(
            rescale_log(&l, NodeRef::Boundary(0), RescaleFactor::real(E).unwrap()),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn complex_rescale_shifts_angle() {
        let l = LogCoords {
            boundary: vec![],
            interior: vec![LogPair {
                t: 10.0,
                theta: Some(1.0),
            }],
            cutoff: DEFAULT_CUTOFF,
        };
        let lam = RescaleFactor::new(Complex64::from_polar(E, 0.7)).unwrap();
        let r = rescale_log(&l, NodeRef::Interior(0), lam).unwrap();
        assert!(close(r.interior[0].t, 9.0, 1e-15));
        assert!(close(r.interior[0].theta.unwrap(), 0.3, 1e-14));
        // Agrees with multiplying sigma directly.
        let s = from_log(&l).unwrap().interior[0] * lam.0;
        let back = to_log(&NodeParams::new(vec![], vec![s], DEFAULT_CUTOFF).unwrap()).unwrap();
        assert!(close(back.interior[0].theta.unwrap(), 0.3, 1e-13));
        assert!(close(back.interior[0].t, 9.0, 1e-14));
    }
}
