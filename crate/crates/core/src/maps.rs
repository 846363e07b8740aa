//! Named maps in the flattened form taken by the smoothness classifier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coords::{
    rescale_corner, rescale_corner_double, rescale_double_log, rescale_single_log, DoubleLogCoords, RescaleFactor,
    SingleLogCoords,
};
use crate::error::{Error, Result};
use crate::jet::CornerPoint;
use crate::plumbing::models::ChartPair;
use crate::plumbing::transition::{chart_transition, chart_transition_single_log};

/// A map `R^n -> R^m` in [`CornerPoint::to_vec`] layout.
pub type VecMap = Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RescaleMap {
    /// `rho -> rho / (1 - a |rho|)` on `C`.
    SingleLog,
    /// `phi -> phi / (1 + |phi| log(1 - a e^{-1/|phi|}))` on `C`.
    DoubleLog,
    /// `t -> t / (1 - a t)` on `[0, inf)`.
    Corner,
    /// `s -> s / (1 + s log(1 - a e^{-1/s}))` on `[0, inf)`.
    CornerDouble,
}

impl RescaleMap {
    pub const ALL: [RescaleMap; 4] = [
        RescaleMap::SingleLog,
        RescaleMap::DoubleLog,
        RescaleMap::Corner,
        RescaleMap::CornerDouble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RescaleMap::SingleLog => "single-log-rescale",
            RescaleMap::DoubleLog => "double-log-rescale",
            RescaleMap::Corner => "corner-rescale",
            RescaleMap::CornerDouble => "corner-double-rescale",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown map '{s}'")))
    }

    /// The map and its base point, the origin.
    pub fn build(self, lambda: RescaleFactor) -> Result<(VecMap, CornerPoint)> {
        lambda.log_real()?;
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self {
            RescaleMap::SingleLog | RescaleMap::DoubleLog => {
                let single = self == RescaleMap::SingleLog;
                let f: VecMap = Box::new(move |x: &[f64]| {
                    let z = Complex64::new(x[0], x[1]);
                    let w = if single {
                        rescale_single_log(z, lambda)?
                    } else {
                        rescale_double_log(z, lambda)?
                    };
                    Ok(vec![w.re, w.im])
                });
                (f, CornerPoint::new(vec![], vec![zero], vec![])?)
            }
            RescaleMap::Corner | RescaleMap::CornerDouble => {
                let single = self == RescaleMap::Corner;
                let f: VecMap = Box::new(move |x: &[f64]| {
                    let y = if single {
                        rescale_corner(x[0], lambda)?
                    } else {
                        rescale_corner_double(x[0], lambda)?
                    };
                    Ok(vec![y])
                });
                (f, CornerPoint::new(vec![0.0], vec![], vec![])?)
            }
        })
    }
}

/// Coordinates in which a chart transition is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionSystem {
    SingleLog,
    DoubleLog,
}

/// `(corner, planar, v)` of `q` to `(corner, planar)` of `p`, based at the nodal point with `q`'s own `v`.
pub fn transition_map(pair: &ChartPair, system: TransitionSystem) -> Result<(VecMap, CornerPoint)> {
    let topo = pair.q.topology();
    let (m_d, m_s) = (topo.m_d, topo.m_s);
    let v0 = pair.q.v();
    let cutoff = pair.q.cutoff;
    let (p, q) = (pair.p.clone(), pair.q.clone());
    let f: VecMap = Box::new(move |x: &[f64]| {
        let boundary = x[..m_d].to_vec();
        let interior: Vec<Complex64> = (0..m_s)
            .map(|i| Complex64::new(x[m_d + 2 * i], x[m_d + 2 * i + 1]))
            .collect();
        let v = &x[m_d + 2 * m_s..];
        let (b, i) = match system {
            TransitionSystem::DoubleLog => {
                let d = DoubleLogCoords {
                    boundary,
                    interior,
                    cutoff,
                };
                let (_, out) = chart_transition(&p, &q, &d, v)?;
                (out.boundary, out.interior)
            }
            TransitionSystem::SingleLog => {
                let sl = SingleLogCoords {
                    boundary,
                    interior,
                    cutoff,
                };
                let (_, out) = chart_transition_single_log(&p, &q, &sl, v)?;
                (out.boundary, out.interior)
            }
        };
        let mut y = b;
        for z in i {
            y.push(z.re);
            y.push(z.im);
        }
        Ok(y)
    });
    let x0 = CornerPoint::new(vec![0.0; m_d], vec![Complex64::new(0.0, 0.0); m_s], v0)?;
    Ok((f, x0))
}
