//! Corner-aware finite differences and smoothness classification.
//!
//! Derivatives at a point are estimated along a direction from one side
//! only, with a Richardson tableau over a geometric step ladder (Ridders'
//! scheme: the entry with the smallest consecutive spread is kept). A map is
//! reported as failing `C^n` only when the two one-sided `n`-jets along a
//! line differ by more than ten times their combined error estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Which side of the base point a one-sided jet samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// Geometric step ladder `h0, h0/ratio, h0/ratio^2, ...` with `levels` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub h0: f64,
    pub levels: usize,
    pub ratio: f64,
}

impl Ladder {
    /// Ladder for an `n`-th derivative in a neighborhood of the given radius.
    ///
    /// The whole stencil `0..=n` fits inside the radius at the first level and
    /// the smallest step is `h0 / 64`.
    pub fn for_order(n: usize, radius: f64) -> Ladder {
        Ladder {
            h0: radius / (n.max(1) as f64),
            levels: 13,
            ratio: std::f64::consts::SQRT_2,
        }
    }

    /// Plain halving ladder.
    pub fn halving(h0: f64, levels: usize) -> Ladder {
        Ladder { h0, levels, ratio: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetEstimate {
    pub order: usize,
    pub direction: Vec<f64>,
    pub value: f64,
    pub step: f64,
    pub error_estimate: f64,
}

/// Assumed evaluation error of the sampled function, in units of `eps * |g|`.
const NOISE_ULPS: f64 = 4.0;

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Richardson-extrapolated jets for a vector-valued function of one real
/// variable, one `(value, error, step)` per output component.
///
/// `one_sided` selects forward differences (error series in `h`) versus
/// central differences (series in `h^2`).
fn ridders<G>(g: &G, n: usize, one_sided: bool, ladder: Ladder) -> Result<Vec<(f64, f64, f64)>>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    if ladder.levels < 2 {
        return Err(Error::Domain("step ladder needs at least two levels".into()));
    }
    let weights: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let w = binomial(n, k) * if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            let x = if one_sided { k as f64 } else { k as f64 - n as f64 / 2.0 };
            (x, w)
        })
        .collect();
    // Quotients with a roundoff bound `NOISE_ULPS * eps * sum |w g| / h^n`.
    let diff = |h: f64| -> Result<Vec<(f64, f64)>> {
        let mut acc: Vec<(f64, f64)> = Vec::new();
        for &(x, w) in &weights {
            let v = g(x * h).map_err(|e| Error::EvaluationDomain {
                step: h,
                reason: e.to_string(),
            })?;
            if acc.is_empty() {
                acc = vec![(0.0, 0.0); v.len()];
            }
            for (a, y) in acc.iter_mut().zip(&v) {
                a.0 += w * y;
                a.1 += (w * y).abs();
            }
        }
        let hn = h.powi(n as i32);
        Ok(acc
            .into_iter()
            .map(|(a, b)| (a / hn, NOISE_ULPS * f64::EPSILON * b / hn))
            .collect())
    };
    if !(ladder.ratio > 1.0) {
        return Err(Error::Domain("step ladder ratio must exceed 1".into()));
    }
    let factor = if one_sided {
        ladder.ratio
    } else {
        ladder.ratio * ladder.ratio
    };

    let mut h = ladder.h0;
    let first = diff(h)?;
    let m = first.len();
    // Best `(value, error, step)` per component and ladder level; errors never
    // fall below the propagated roundoff bound.
    let mut levels: Vec<Vec<(f64, f64, f64)>> = first.iter().map(|&(v, _)| vec![(v, f64::INFINITY, h)]).collect();
    let mut prev_row: Vec<Vec<(f64, f64)>> = first.iter().map(|&q| vec![q]).collect();
    let mut raw: Vec<Vec<(f64, f64, f64)>> = first.iter().map(|&(v, e)| vec![(v, e, h)]).collect();
    for _ in 1..ladder.levels {
        h /= ladder.ratio;
        let d = diff(h)?;
        for c in 0..m {
            let prev = &prev_row[c];
            let mut row = vec![d[c]];
            raw[c].push((d[c].0, d[c].1, h));
            let mut level = (d[c].0, f64::INFINITY, h);
            let mut fac = factor;
            for j in 1..=prev.len() {
                let (a, na) = row[j - 1];
                let (b, nb) = prev[j - 1];
                let val = (fac * a - b) / (fac - 1.0);
                let noise = (fac * na + nb) / (fac - 1.0);
                let err = (val - a).abs().max((val - b).abs()).max(noise);
                if err <= level.1 {
                    level = (val, err, h);
                }
                row.push((val, noise));
                fac *= factor;
            }
            levels[c].push(level);
            prev_row[c] = row;
        }
    }
    // Unextrapolated quotients compete too, judged against both neighbours.
    // This is what resolves flat functions, whose quotients have no power
    // series in h to extrapolate.
    for c in 0..m {
        for (k, w) in raw[c].windows(3).enumerate() {
            let err = (w[1].0 - w[0].0).abs().max((w[1].0 - w[2].0).abs()).max(w[1].1);
            if err < levels[c][k + 1].1 {
                levels[c][k + 1] = (w[1].0, err, w[1].2);
            }
        }
    }
    // The winner must also agree with the best entry of an adjacent level.
    let best = levels
        .iter()
        .map(|lv| {
            let (k, &(v, e, h)) = lv
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .expect("at least two levels");
            let nb = [k.checked_sub(1), Some(k + 1)]
                .into_iter()
                .flatten()
                .filter_map(|j| lv.get(j))
                .map(|o| (o.0 - v).abs())
                .fold(f64::INFINITY, f64::min);
            (v, e.max(nb), h)
        })
        .collect();
    Ok(best)
}

fn unstable(value: f64, err: f64) -> bool {
    !value.is_finite() || !(err <= 0.5 * value.abs().max(1.0))
}

/// `n`-th derivative of `g` at 0 from one side.
///
/// On the minus side the jet of `h -> g(-h)` is computed and multiplied by
/// `(-1)^n`, so a function smooth across 0 gives the same value on both sides.
pub fn one_sided_1d<G>(g: G, n: usize, side: Side, ladder: Ladder) -> Result<JetEstimate>
where
    G: Fn(f64) -> Result<f64>,
{
    let sgn = if side == Side::Plus { 1.0 } else { -1.0 };
    let gv = |h: f64| g(sgn * h).map(|y| vec![y]);
    let (v, e, h) = ridders(&gv, n, true, ladder)?[0];
    let v = v * sgn.powi(n as i32);
    if unstable(v, e) {
        return Err(Error::Instability(format!(
            "order {n} one-sided jet {v:e} with spread {e:e}"
        )));
    }
    Ok(JetEstimate {
        order: n,
        direction: vec![sgn],
        value: v,
        step: h,
        error_estimate: e,
    })
}

/// `n`-th right derivative at 0 of a double-double function.
///
/// Forward differences are formed in double-double and extrapolated over the
/// ladder; the entry with the smallest neighbour disagreement is returned.
pub fn one_sided_1d_dd<G>(g: G, n: usize, ladder: Ladder) -> Result<JetEstimate>
where
    G: Fn(Dd) -> Result<Dd>,
{
    if ladder.levels < 2 || !(ladder.ratio > 1.0) {
        return Err(Error::Domain("step ladder needs two levels and a ratio above 1".into()));
    }
    let diff = |h: f64| -> Result<Dd> {
        let mut acc = Dd::ZERO;
        for k in 0..=n {
            let w = binomial(n, k) * if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            let y = g(Dd::from_f64(h).mul_f64(k as f64)).map_err(|e| Error::EvaluationDomain {
                step: h,
                reason: e.to_string(),
            })?;
            acc += y.mul_f64(w);
        }
        let mut hn = Dd::ONE;
        for _ in 0..n {
            hn = hn * Dd::from_f64(h);
        }
        Ok(acc / hn)
    };
    let mut h = ladder.h0;
    let mut prev = vec![diff(h)?];
    let mut best = (prev[0], f64::INFINITY, h);
    for _ in 1..ladder.levels {
        h /= ladder.ratio;
        let mut row = vec![diff(h)?];
        let mut fac = Dd::from_f64(ladder.ratio);
        for j in 1..=prev.len() {
            let val = (fac * row[j - 1] - prev[j - 1]) / (fac - Dd::ONE);
            let err = (val - row[j - 1])
                .abs()
                .to_f64()
                .max((val - prev[j - 1]).abs().to_f64());
            if err < best.1 {
                best = (val, err, h);
            }
            row.push(val);
            fac = fac * Dd::from_f64(ladder.ratio);
        }
        prev = row;
    }
    let (v, e, h) = (best.0.to_f64(), best.1, best.2);
    if unstable(v, e) {
        return Err(Error::Instability(format!(
            "order {n} one-sided jet {v:e} with spread {e:e}"
        )));
    }
    Ok(JetEstimate {
        order: n,
        direction: vec![1.0],
        value: v,
        step: h,
        error_estimate: e,
    })
}

/// Vector-valued one-sided jets along `dir` from `x0`.
pub fn one_sided_vec<F>(
    f: &F,
    x0: &[f64],
    dir: &[f64],
    n: usize,
    side: Side,
    ladder: Ladder,
) -> Result<Vec<JetEstimate>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let sgn = if side == Side::Plus { 1.0 } else { -1.0 };
    let g = |h: f64| {
        let x: Vec<f64> = x0.iter().zip(dir).map(|(a, d)| a + sgn * h * d).collect();
        f(&x)
    };
    let out = ridders(&g, n, true, ladder)?;
    let s = sgn.powi(n as i32);
    out.into_iter()
        .map(|(v, e, h)| {
            let v = v * s;
            if unstable(v, e) {
                return Err(Error::Instability(format!(
                    "order {n} one-sided jet {v:e} with spread {e:e}"
                )));
            }
            Ok(JetEstimate {
                order: n,
                direction: dir.iter().map(|d| sgn * d).collect(),
                value: v,
                step: h,
                error_estimate: e,
            })
        })
        .collect()
}

/// Scalar one-sided derivative at a corner point along `dir`.
pub fn one_sided_derivative<F>(
    f: F,
    x0: &CornerPoint,
    dir: &[f64],
    n: usize,
    side: Side,
    ladder: Ladder,
) -> Result<JetEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if n > 8 {
        return Err(Error::Domain(format!("order {n} exceeds 8")));
    }
    let x = x0.to_vec();
    if dir.len() != x.len() {
        return Err(Error::Domain("direction has the wrong dimension".into()));
    }
    if !x0.admits(dir, side) {
        return Err(Error::EvaluationDomain {
            step: ladder.h0,
            reason: "direction leaves the corner".into(),
        });
    }
    let fv = |y: &[f64]| f(y).map(|v| vec![v]);
    Ok(one_sided_vec(&fv, &x, dir, n, side, ladder)?.remove(0))
}

/// Central Ridders derivative of a vector-valued function of one variable at 0.
pub fn central_derivative<G>(g: G, n: usize, ladder: Ladder) -> Result<Vec<(f64, f64)>>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    Ok(ridders(&g, n, false, ladder)?
        .into_iter()
        .map(|(v, e, _)| (v, e))
        .collect())
}

/// Fixed five-point central stencil for orders 1 to 4 (order 0 returns `g(0)`).
pub fn stencil_derivative<G>(g: G, n: usize, h: f64) -> Result<Vec<f64>>
where
    G: Fn(f64) -> Result<Vec<f64>>,
{
    let w: [f64; 5] = match n {
        0 => return g(0.0),
        1 => [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
        2 => [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0],
        3 => [-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => [1.0, -4.0, 6.0, -4.0, 1.0],
        _ => return Err(Error::Domain(format!("stencil order {n} not supported"))),
    };
    let mut acc: Vec<f64> = Vec::new();
    for (k, &wk) in w.iter().enumerate() {
        if wk == 0.0 {
            continue;
        }
        let v = g((k as f64 - 2.0) * h)?;
        if acc.is_empty() {
            acc = vec![0.0; v.len()];
        }
        for (a, y) in acc.iter_mut().zip(v) {
            *a += wk * y;
        }
    }
    let hn = h.powi(n as i32);
    Ok(acc.into_iter().map(|a| a / hn).collect())
}

/// A point of `[0, inf)^a x C^b x R^c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerPoint {
    pub corner: Vec<f64>,
    pub planar: Vec<Complex64>,
    pub free: Vec<f64>,
}

impl CornerPoint {
    pub fn new(corner: Vec<f64>, planar: Vec<Complex64>, free: Vec<f64>) -> Result<Self> {
        if corner.iter().any(|&c| !(c >= 0.0)) {
            return Err(Error::Domain("corner variables must be nonnegative".into()));
        }
        Ok(CornerPoint { corner, planar, free })
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        self.corner.len() + 2 * self.planar.len() + self.free.len()
    }

    /// Flattened layout: corner, then `(re, im)` per planar, then free.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.corner.clone();
        for z in &self.planar {
            v.push(z.re);
            v.push(z.im);
        }
        v.extend_from_slice(&self.free);
        v
    }

    /// Inverse of [`CornerPoint::to_vec`] with this point's shape.
    pub fn from_vec(&self, v: &[f64]) -> CornerPoint {
        let a = self.corner.len();
        let b = self.planar.len();
        CornerPoint {
            corner: v[..a].to_vec(),
            planar: (0..b).map(|i| Complex64::new(v[a + 2 * i], v[a + 2 * i + 1])).collect(),
            free: v[a + 2 * b..].to_vec(),
        }
    }

    /// Indices of corner variables sitting at 0.
    pub fn active_corners(&self) -> Vec<usize> {
        (0..self.corner.len()).filter(|&j| self.corner[j] == 0.0).collect()
    }

    /// Whether a small step along `side * dir` stays in the model.
    pub fn admits(&self, dir: &[f64], side: Side) -> bool {
        let sgn = if side == Side::Plus { 1.0 } else { -1.0 };
        self.active_corners().iter().all(|&j| sgn * dir[j] >= 0.0)
    }
}

/// A test direction through the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub label: String,
    pub vector: Vec<f64>,
    /// Both `+vector` and `-vector` stay in the model.
    pub two_sided: bool,
}

/// Standard direction sample through a corner point.
///
/// Each planar variable gets the eight rays at multiples of `pi/4` (four
/// opposite pairs) and four oblique directions; corner and free variables
/// get their axis. Oblique directions tilt a planar ray at `pi/8 + k pi/4`
/// toward every other variable, so mixed behaviour is probed too.
pub fn sample_directions(x0: &CornerPoint) -> Vec<Direction> {
    let dim = x0.dim();
    let a = x0.corner.len();
    let b = x0.planar.len();
    let mut out = Vec::new();
    let mk = |label: String, vector: Vec<f64>| {
        let two_sided = x0.admits(&vector, Side::Plus) && x0.admits(&vector, Side::Minus);
        Direction {
            label,
            vector,
            two_sided,
        }
    };
    for j in 0..a {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        out.push(mk(format!("corner[{j}]"), v));
    }
    for i in 0..b {
        for k in 0..4 {
            let ang = k as f64 * PI / 4.0;
            let mut v = vec![0.0; dim];
            v[a + 2 * i] = ang.cos();
            v[a + 2 * i + 1] = ang.sin();
            out.push(mk(format!("planar[{i}] ray {k}pi/4"), v));
        }
        for k in 0..4 {
            let ang = PI / 8.0 + k as f64 * PI / 4.0;
            let mut v = vec![0.0; dim];
            for (idx, slot) in v.iter_mut().enumerate() {
                if idx != a + 2 * i && idx != a + 2 * i + 1 {
                    *slot = 0.5;
                }
            }
            v[a + 2 * i] = ang.cos();
            v[a + 2 * i + 1] = ang.sin();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            out.push(mk(format!("planar[{i}] oblique {}pi/8", 2 * k + 1), v));
        }
    }
    for j in 0..x0.free.len() {
        let mut v = vec![0.0; dim];
        v[a + 2 * b + j] = 1.0;
        out.push(mk(format!("free[{j}]"), v));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Jets match when their difference is below `atol + rtol * scale`.
    pub atol: f64,
    pub rtol: f64,
    /// A mismatch is certified when it exceeds this many combined error estimates.
    pub certify_factor: f64,
    /// Neighborhood radius the step ladder is scaled to.
    pub radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            atol: 1e-6,
            rtol: 1e-6,
            certify_factor: 10.0,
            radius: 0.2,
        }
    }
}

/// Comparison of jets of one order along one direction, maximized over output components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetComparison {
    pub order: usize,
    pub direction: String,
    pub component: usize,
    pub plus: f64,
    pub plus_error: f64,
    /// Absent for one-sided directions.
    pub minus: Option<f64>,
    pub minus_error: Option<f64>,
    pub mismatch: f64,
    pub threshold: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    /// Orders up to `k` agree, order `k + 1` has a certified jump.
    NotSmooth { k: usize },
    /// No mismatch certified through `order`; numerical evidence only.
    ConsistentUpTo { order: usize },
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::NotSmooth { k } => format!("C{k}-not-C{}", k + 1),
            Verdict::ConsistentUpTo { order } => {
                format!("consistent-with-C^inf-up-to-order-{order}")
            }
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, Verdict::ConsistentUpTo { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub max_verified_order: usize,
    pub verdict: Verdict,
    pub label: String,
    pub evidence: Vec<JetComparison>,
    pub tolerances: Tolerances,
    pub note: String,
}

impl SmoothnessReport {
    /// Largest certified mismatch at `order` along a direction whose label contains `pat`.
    pub fn jump(&self, order: usize, pat: &str) -> Option<&JetComparison> {
        self.evidence
            .iter()
            .filter(|c| c.order == order && c.direction.contains(pat))
            .max_by(|a, b| a.mismatch.total_cmp(&b.mismatch))
    }
}

/// Classifies the smoothness of `f` at `x0` up to `max_order`.
pub fn classify_smoothness<F>(f: &F, x0: &CornerPoint, max_order: usize, tol: Tolerances) -> Result<SmoothnessReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
{
    classify_along(f, x0, &sample_directions(x0), max_order, tol)
}

/// As [`classify_smoothness`] with an explicit direction set.
pub fn classify_along<F>(
    f: &F,
    x0: &CornerPoint,
    dirs: &[Direction],
    max_order: usize,
    tol: Tolerances,
) -> Result<SmoothnessReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
{
    use rayon::prelude::*;

    if max_order > 8 {
        return Err(Error::Domain(format!("order {max_order} exceeds 8")));
    }
    let x = x0.to_vec();
    let mut evidence = Vec::new();
    let mut verdict = Verdict::ConsistentUpTo { order: max_order };
    'orders: for n in 1..=max_order {
        let ladder = Ladder::for_order(n, tol.radius);
        let per_dir: Vec<Result<Vec<JetComparison>>> = dirs
            .par_iter()
            .map(|d| compare_direction(f, &x, d, n, ladder, tol))
            .collect();
        let mut failed = false;
        for r in per_dir {
            let cmp = r?;
            failed |= cmp.iter().any(|c| c.certified);
            evidence.extend(cmp);
        }
        if failed {
            verdict = Verdict::NotSmooth { k: n - 1 };
            break 'orders;
        }
    }
    let max_verified_order = match verdict {
        Verdict::NotSmooth { k } => k,
        Verdict::ConsistentUpTo { order } => order,
    };
    let note = match verdict {
        Verdict::NotSmooth { .. } => "certified one-sided jet mismatch".to_string(),
        Verdict::ConsistentUpTo { .. } => "finite-difference evidence only; smoothness is not proved".to_string(),
    };
    Ok(SmoothnessReport {
        max_verified_order,
        label: verdict.label(),
        verdict,
        evidence,
        tolerances: tol,
        note,
    })
}

fn compare_direction<F>(
    f: &F,
    x: &[f64],
    d: &Direction,
    n: usize,
    ladder: Ladder,
    tol: Tolerances,
) -> Result<Vec<JetComparison>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + ?Sized,
{
    let plus = one_sided_vec(f, x, &d.vector, n, Side::Plus, ladder);
    if !d.two_sided {
        // Only instability can be certified from a single side.
        return Ok(match plus {
            Ok(p) => p
                .into_iter()
                .enumerate()
                .map(|(c, j)| JetComparison {
                    order: n,
                    direction: d.label.clone(),
                    component: c,
                    plus: j.value,
                    plus_error: j.error_estimate,
                    minus: None,
                    minus_error: None,
                    mismatch: 0.0,
                    threshold: 0.0,
                    certified: false,
                })
                .collect(),
            Err(Error::Instability(_)) => vec![JetComparison {
                order: n,
                direction: d.label.clone(),
                component: 0,
                plus: f64::NAN,
                plus_error: f64::INFINITY,
                minus: None,
                minus_error: None,
                mismatch: f64::INFINITY,
                threshold: 0.0,
                certified: true,
            }],
            Err(e) => return Err(e),
        });
    }
    let plus = plus?;
    let minus = one_sided_vec(f, x, &d.vector, n, Side::Minus, ladder)?;
    Ok(plus
        .into_iter()
        .zip(minus)
        .enumerate()
        .map(|(c, (p, m))| {
            let mismatch = (p.value - m.value).abs();
            let scale = p.value.abs().max(m.value.abs());
            let threshold =
                (tol.certify_factor * (p.error_estimate + m.error_estimate)).max(tol.atol + tol.rtol * scale);
            JetComparison {
                order: n,
                direction: d.label.clone(),
                component: c,
                plus: p.value,
                plus_error: p.error_estimate,
                minus: Some(m.value),
                minus_error: Some(m.error_estimate),
                mismatch,
                threshold,
                certified: mismatch > threshold,
            }
        })
        .collect())
}

/// Evidence from [`flatness_test`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessEvidence {
    pub radii: Vec<f64>,
    /// `max |g|` on each sampled circle.
    pub sup: Vec<f64>,
    /// `ratios[n][k] = sup[k] / radii[k]^n`, for `n = 0..=N`.
    pub ratios: Vec<Vec<f64>>,
    /// Bound constants `C_n`, the ratio at the largest radius.
    pub constants: Vec<f64>,
    /// First order whose ratio grows as the radius shrinks.
    pub failed_order: Option<usize>,
}

/// Tests `max_{|z| = r} |g(z)| <= C_n r^n` for all `n <= big_n` on shrinking circles.
///
/// Each circle is sampled at 16 points. The bound holds with `C_n` equal to the
/// ratio at the largest radius when the ratios never increase as `r` decreases
/// (relative slack `1e-6`).
pub fn flatness_test<G>(g: G, big_n: usize, radii: &[f64]) -> (bool, FlatnessEvidence)
where
    G: Fn(Complex64) -> f64,
{
    let mut r: Vec<f64> = radii.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    let sup: Vec<f64> = r
        .iter()
        .map(|&rad| {
            (0..16)
                .map(|k| g(Complex64::from_polar(rad, k as f64 * PI / 8.0)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let mut ratios = Vec::new();
    let mut constants = Vec::new();
    let mut failed_order = None;
    for n in 0..=big_n {
        let row: Vec<f64> = sup.iter().zip(&r).map(|(s, rad)| s / rad.powi(n as i32)).collect();
        let ok = row.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6));
        if !ok && failed_order.is_none() {
            failed_order = Some(n);
        }
        constants.push(row.first().copied().unwrap_or(0.0));
        ratios.push(row);
    }
    (
        failed_order.is_none(),
        FlatnessEvidence {
            radii: r,
            sup,
            ratios,
            constants,
            failed_order,
        },
    )
}
