//! Grid sweeps, per-line fits and the full verification suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::{BasePoint, Evaluator, DEFAULT_STEP};
use super::fit::{DecayFit, FitVerdict, HalvingCheck, DEFAULT_C_MIN};
use super::{standard_suite, uniform_grid, Abscissa, EstimateKind, GridKind, OuterVars, QuantitySpec, Target};
use crate::error::{Error, Result};
use crate::plumbing::models::ChartPair;

/// `(grid value, abscissa, |quantity|)` over a grid.
pub fn sweep(ev: &mut Evaluator, spec: &QuantitySpec, base: &BasePoint, grid: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::with_capacity(grid.len());
    for &g in grid {
        let s = base.state(spec.grid, g);
        let q = ev.quantity(spec, &s)?;
        out.push((g, spec.abscissa.eval(&s.t), q));
    }
    Ok(out)
}

/// Samples one estimate line over `grid` and fits `log |q|` against its abscissa.
pub fn sample_estimate(
    ev: &mut Evaluator,
    spec: &QuantitySpec,
    base: &BasePoint,
    grid: &[f64],
    c_min: f64,
) -> Result<DecayFit> {
    let rows = sweep(ev, spec, base, grid)?;
    Ok(DecayFit::fit(rows.iter().map(|r| (r.1, r.2)).collect(), c_min))
}

/// The corner line for one node: `s^p - s^q` on boundary nodes, `phi^p - e^{i f} phi^q` on interior ones.
pub fn corner_spec(ev: &Evaluator, node: usize, n: usize) -> Result<QuantitySpec> {
    let tree = &ev.pair().q;
    if node >= tree.nodes.len() {
        return Err(Error::Domain(format!("node {node} does not exist")));
    }
    let names = super::node_names(tree);
    let target = match tree.nodes[node].kind {
        crate::plumbing::tree::NodeKind::Boundary => Target::CornerS(node),
        crate::plumbing::tree::NodeKind::Interior => Target::CornerPhi(node),
    };
    let label = match target {
        Target::CornerS(_) => format!("s{}", names[node]),
        _ => format!("phi{}", names[node]),
    };
    let spec = QuantitySpec {
        kind: EstimateKind::CornerGap,
        n,
        target,
        inner: vec![],
        nodal: vec![],
        annihilate: vec![],
        part: super::Part::Whole,
        outer: OuterVars::DoubleLogVars,
        abscissa: Abscissa::S(node),
        grid: GridKind::S,
        label,
    };
    spec.validate(tree)?;
    Ok(spec)
}

/// Corner-gap fit over `S = 1/|phi|` (or `1/s`) in `inv_radius_grid`, with the halving check.
pub fn verify_corner_gap(
    ev: &mut Evaluator,
    node: usize,
    n: usize,
    base: &BasePoint,
    inv_radius_grid: &[f64],
    c_min: f64,
) -> Result<HalvingCheck> {
    let spec = corner_spec(ev, node, n)?;
    let rows = sweep(ev, &spec, base, inv_radius_grid)?;
    Ok(HalvingCheck::new(rows.iter().map(|r| (r.1, r.2)).collect(), c_min))
}

/// Suite parameters; the seed fixes every sampled `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub n_max: usize,
    pub c_min: f64,
    /// `[lo, hi]` of the `T` grid; the sweep uses half of `step`.
    pub t_range: (f64, f64),
    pub step: f64,
    /// `[lo, hi]` of `S = 1/|phi|` for the corner lines.
    pub corner_range: (f64, f64),
    /// Marked-point samples: the center plus `v_samples - 1` jittered copies.
    pub v_samples: usize,
    pub v_jitter: f64,
    pub seed: u64,
    pub fd_step: f64,
    /// Families to run; empty means all.
    pub estimates: Vec<EstimateKind>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_max: 2,
            c_min: DEFAULT_C_MIN,
            t_range: (5.0, 40.0),
            step: 2.5,
            corner_range: (5.0, 40.0),
            v_samples: 1,
            v_jitter: 0.05,
            seed: 0,
            fd_step: DEFAULT_STEP,
            estimates: vec![],
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(1..=super::MAX_ORDER).contains(&self.n_max) {
            return bad(format!("n_max = {} outside 1..={}", self.n_max, super::MAX_ORDER));
        }
        if !(self.c_min > 0.0) {
            return bad(format!("c_min = {} must be positive", self.c_min));
        }
        for (name, (lo, hi)) in [("t_range", self.t_range), ("corner_range", self.corner_range)] {
            if !(lo > 2.0 && hi > lo && hi.is_finite()) {
                return bad(format!("{name} = [{lo}, {hi}] must satisfy 2 < lo < hi < inf"));
            }
        }
        if !(self.step > 0.0) || ((self.t_range.1 - self.t_range.0) / self.step).round() < 2.0 {
            return bad(format!("step {} leaves fewer than three grid points", self.step));
        }
        if self.v_samples == 0 {
            return bad("v_samples must be at least 1".into());
        }
        if !(self.v_jitter >= 0.0 && self.v_jitter < 0.25) {
            return bad(format!("v_jitter = {} outside [0, 0.25)", self.v_jitter));
        }
        Ok(())
    }

    /// Halved-spacing grids; the default grid is every other point.
    pub fn fine_grids(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.step / 2.0;
        (
            uniform_grid(self.t_range.0, self.t_range.1, h),
            uniform_grid(self.corner_range.0, self.corner_range.1, h),
        )
    }

    /// The center's `v` followed by seeded jittered copies.
    pub fn bases(&self, ev: &Evaluator) -> Vec<BasePoint> {
        let center = ev.default_base();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = vec![center.clone()];
        for _ in 1..self.v_samples {
            let mut b = center.clone();
            for x in &mut b.v {
                *x += rng.random_range(-self.v_jitter..=self.v_jitter);
            }
            out.push(b);
        }
        out
    }
}

/// Outcome of one estimate line at one `v` sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    /// Line id, suffixed with `@v<k>` for jittered samples.
    pub id: String,
    pub spec: QuantitySpec,
    pub v_sample: usize,
    /// Default-grid values (`T`, or `S = 1/|phi|` for corner lines) and magnitudes.
    pub grid_values: Vec<f64>,
    pub quantities: Vec<f64>,
    pub check: HalvingCheck,
}

impl EstimateResult {
    pub fn passed(&self) -> bool {
        self.check.coarse.verdict.passed() && self.check.stable
    }

    pub fn verdict_label(&self) -> &'static str {
        match (self.check.coarse.verdict, self.check.stable) {
            (FitVerdict::Fail, _) => "fail",
            (_, false) => "unstable",
            (v, true) => v.label(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub results: Vec<EstimateResult>,
    pub solves: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed())
    }

    /// One line per result: id, n, verdict, slope, R^2 and halving change.
    pub fn summary(&self) -> Vec<String> {
        self.results
            .iter()
            .map(|r| {
                let f = &r.check.coarse;
                format!(
                    "{} n={} {} slope={:.4} r2={:.6} halving_change={:.4}",
                    r.id,
                    r.spec.n,
                    r.verdict_label(),
                    f.slope,
                    f.r2,
                    r.check.slope_change
                )
            })
            .collect()
    }
}

/// Runs every selected line of the standard suite at every `v` sample.
pub fn run_suite(pair: &ChartPair, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut ev = Evaluator::new(pair)?.with_step(cfg.fd_step)?;
    let specs: Vec<QuantitySpec> = standard_suite(&pair.q, cfg.n_max)?
        .into_iter()
        .filter(|s| cfg.estimates.is_empty() || cfg.estimates.contains(&s.kind))
        .collect();
    let (t_fine, s_fine) = cfg.fine_grids();
    let bases = cfg.bases(&ev);
    let mut results = Vec::new();
    for (k, base) in bases.iter().enumerate() {
        for spec in &specs {
            let grid = match spec.grid {
                GridKind::T => &t_fine,
                GridKind::S => &s_fine,
            };
            let rows = sweep(&mut ev, spec, base, grid)?;
            let check = HalvingCheck::new(rows.iter().map(|r| (r.1, r.2)).collect(), cfg.c_min);
            let coarse: Vec<&(f64, f64, f64)> = rows.iter().step_by(2).collect();
            let id = if k == 0 {
                spec.id()
            } else {
                format!("{}@v{k}", spec.id())
            };
            results.push(EstimateResult {
                id,
                spec: spec.clone(),
                v_sample: k,
                grid_values: coarse.iter().map(|r| r.0).collect(),
                quantities: coarse.iter().map(|r| r.2).collect(),
                check,
            });
        }
    }
    Ok(SuiteReport {
        results,
        solves: ev.solves,
    })
}
