//! Log-linear decay fits.

use serde::{Deserialize, Serialize};

/// Magnitudes below this are treated as exact zeros.
pub const UNDERFLOW: f64 = 1e-280;
pub const DEFAULT_C_MIN: f64 = 0.1;
pub const MIN_R2: f64 = 0.99;
/// Largest relative slope change tolerated when the grid spacing is halved.
pub const HALVING_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitVerdict {
    Pass,
    Fail,
    /// Fewer than three nonzero samples: the quantity vanishes.
    VacuousPass,
}

impl FitVerdict {
    pub fn passed(self) -> bool {
        !matches!(self, FitVerdict::Fail)
    }

    pub fn label(self) -> &'static str {
        match self {
            FitVerdict::Pass => "pass",
            FitVerdict::Fail => "fail",
            FitVerdict::VacuousPass => "vacuous-pass",
        }
    }
}

/// Ordinary least squares of `log |q|` against the abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `(x, |q|)`, sorted by `x`.
    pub samples: Vec<(f64, f64)>,
    /// `-c` in `log |q| = log C - c x`.
    pub slope: f64,
    /// `log C`.
    pub intercept: f64,
    pub r2: f64,
    pub verdict: FitVerdict,
}

impl DecayFit {
    pub fn fit(mut samples: Vec<(f64, f64)>, c_min: f64) -> DecayFit {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(_, q)| q.abs() >= UNDERFLOW)
            .map(|&(x, q)| (x, q.abs().ln()))
            .collect();
        if pts.len() < 3 {
            return DecayFit {
                samples,
                slope: 0.0,
                intercept: 0.0,
                r2: 1.0,
                verdict: FitVerdict::VacuousPass,
            };
        }
        let (slope, intercept, r2) = ols(&pts);
        let verdict = if slope <= -c_min && r2 >= MIN_R2 {
            FitVerdict::Pass
        } else {
            FitVerdict::Fail
        };
        DecayFit {
            samples,
            slope,
            intercept,
            r2,
            verdict,
        }
    }

    /// The fitted rate `c`.
    pub fn rate(&self) -> f64 {
        -self.slope
    }
}

/// `(slope, intercept, R^2)`; `R^2 = 1` for an exact fit of constant data.
pub fn ols(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

/// Fits on the full grid and on every other sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingCheck {
    pub coarse: DecayFit,
    pub fine: DecayFit,
    /// `|slope_fine - slope_coarse| / |slope_coarse|`; zero for vacuous fits.
    pub slope_change: f64,
    pub stable: bool,
}

impl HalvingCheck {
    /// `fine` holds the samples of the halved grid; the coarse grid is every
    /// other sample starting from the first.
    pub fn new(fine_samples: Vec<(f64, f64)>, c_min: f64) -> HalvingCheck {
        let mut fine_samples = fine_samples;
        fine_samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coarse_samples: Vec<(f64, f64)> = fine_samples.iter().step_by(2).copied().collect();
        let coarse = DecayFit::fit(coarse_samples, c_min);
        let fine = DecayFit::fit(fine_samples, c_min);
        let vacuous = coarse.verdict == FitVerdict::VacuousPass && fine.verdict == FitVerdict::VacuousPass;
        let slope_change = if vacuous {
            0.0
        } else if coarse.slope != 0.0 {
            ((fine.slope - coarse.slope) / coarse.slope).abs()
        } else {
            f64::INFINITY
        };
        HalvingCheck {
            stable: slope_change < HALVING_TOLERANCE,
            coarse,
            fine,
            slope_change,
        }
    }
}
