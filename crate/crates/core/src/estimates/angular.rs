//! Extrapolation of the angular offset `f = lim (theta^p - theta^q)` as `T_{i0} -> inf`.

use serde::{Deserialize, Serialize};

use super::eval::{BasePoint, Evaluator};
use super::GridKind;
use crate::coords::wrap_angle_signed;
use crate::error::{Error, Result};
use crate::plumbing::tree::NodeKind;

pub const DEFAULT_CAUCHY_TOLERANCE: f64 = 1e-9;
/// `T` of the other nodes while `T_{i0}` runs over the grid.
pub const DEFAULT_OTHER_T: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularOffset {
    pub node: usize,
    /// Extrapolated `f`, in `(-pi, pi]`.
    pub estimate: f64,
    /// `theta^p - theta^q` with the node held nodal, for comparison.
    pub limit: f64,
    /// `(T_{i0}, theta^p - theta^q)`.
    pub raw: Vec<(f64, f64)>,
    /// Richardson extrapolants in `e^{-T}`, one per consecutive pair.
    pub extrapolants: Vec<f64>,
    /// `|last - previous|` of the extrapolants.
    pub cauchy_gap: f64,
    pub converged: bool,
}

/// Extrapolates `theta^p - theta^q` at interior node `i0` along `T_{i0} in t_grid`.
///
/// With `g_k = f + A e^{-T_k} + ...`, each consecutive pair gives
/// `(g_{k+1} - r g_k) / (1 - r)` with `r = e^{-(T_{k+1} - T_k)}`.
pub fn estimate_angular_offset(
    ev: &mut Evaluator,
    i0: usize,
    base: &BasePoint,
    t_other: f64,
    t_grid: &[f64],
    tolerance: f64,
) -> Result<AngularOffset> {
    let nn = ev.node_count();
    if i0 >= nn || ev.pair().q.nodes[i0].kind != NodeKind::Interior {
        return Err(Error::Domain(format!("node {i0} is not an interior node")));
    }
    if t_grid.len() < 3 {
        return Err(Error::Domain(
            "the angular offset needs at least three grid values".into(),
        ));
    }
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut state = base.state(GridKind::T, t_other);
    let free = vec![false; nn];
    let mut raw = Vec::with_capacity(grid.len());
    for &t in &grid {
        state.t[i0] = t;
        raw.push((t, ev.angle_gap(&state, i0, &free)?));
    }
    let mut nodal = free.clone();
    nodal[i0] = true;
    let limit = wrap_angle_signed(ev.angle_gap(&state, i0, &nodal)?);

    let unwrap = |g: f64, reference: f64| reference + wrap_angle_signed(g - reference);
    let g0 = raw[0].1;
    let extrapolants: Vec<f64> = raw
        .windows(2)
        .map(|w| {
            let (a, b) = (unwrap(w[0].1, g0), unwrap(w[1].1, g0));
            let r = (-(w[1].0 - w[0].0)).exp();
            (b - r * a) / (1.0 - r)
        })
        .collect();
    let last = extrapolants[extrapolants.len() - 1];
    let prev = extrapolants[extrapolants.len() - 2];
    let cauchy_gap = (last - prev).abs();
    Ok(AngularOffset {
        node: i0,
        estimate: wrap_angle_signed(last),
        limit,
        raw,
        extrapolants,
        cauchy_gap,
        converged: cauchy_gap <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimates::default_grid;
    use crate::plumbing::models::{chain, nonlinear_pair};

    #[test]
    fn nonlinear_offset_converges_to_the_nodal_value() {
        let pair = nonlinear_pair(&chain(), 0.3);
        let mut ev = Evaluator::new(&pair).unwrap();
        let base = ev.default_base();
        let a = estimate_angular_offset(
            &mut ev,
            1,
            &base,
            DEFAULT_OTHER_T,
            &default_grid(),
            DEFAULT_CAUCHY_TOLERANCE,
        )
        .unwrap();
        assert!(a.converged, "{a:?}");
        assert!((a.estimate - a.limit).abs() < 1e-12, "{} vs {}", a.estimate, a.limit);
    }
}
