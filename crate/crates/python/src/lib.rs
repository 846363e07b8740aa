//! Python module `gluing`: coordinate conversions, rescales, smoothness
//! classification, plumbing, chart transitions and decay verification.

use gluing_core::coords::{
    self, DoubleLogCoords, LogCoords, LogPair, NodeParams, RescaleFactor, SingleLogCoords, DEFAULT_CUTOFF,
};
use gluing_core::estimates::csv::to_csv;
use gluing_core::estimates::{run_suite, EstimateKind, SuiteConfig};
use gluing_core::jet::{classify_smoothness, Tolerances};
use gluing_core::maps::{transition_map, RescaleMap, TransitionSystem};
use gluing_core::plumbing::models::{self, PairSpec};
use gluing_core::plumbing::plumb::chart_map_phi;
use gluing_core::plumbing::transition::chart_transition_log;
use gluing_core::plumbing::tree::StableTree;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: gluing_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn factor(lam: Complex64) -> PyResult<RescaleFactor> {
    RescaleFactor::new(lam).map_err(err)
}

/// Boundary values and interior values; log interiors are `z = T + i theta`, `T = inf` when nodal.
type Tuple = (Vec<f64>, Vec<Complex64>);

fn to_log(system: &str, b: Vec<f64>, i: Vec<Complex64>, cutoff: f64) -> PyResult<LogCoords> {
    let l = match system {
        "raw" => coords::to_log(&NodeParams {
            boundary: b,
            interior: i,
            cutoff,
        }),
        "log" => {
            let interior = i
                .iter()
                .map(|z| LogPair {
                    t: z.re,
                    theta: (z.re != f64::INFINITY).then_some(z.im),
                })
                .collect();
            let l = LogCoords {
                boundary: b,
                interior,
                cutoff,
            };
            l.validate().map(|_| l)
        }
        "single-log" => coords::single_log_to_log(&SingleLogCoords {
            boundary: b,
            interior: i,
            cutoff,
        }),
        "double-log" => coords::double_log_to_log(&DoubleLogCoords {
            boundary: b,
            interior: i,
            cutoff,
        }),
        s => return Err(PyValueError::new_err(format!("unknown system '{s}'"))),
    };
    l.map_err(err)
}

fn from_log(system: &str, l: &LogCoords) -> PyResult<Tuple> {
    Ok(match system {
        "raw" => {
            let p = coords::from_log(l).map_err(err)?;
            (p.boundary, p.interior)
        }
        "log" => (
            l.boundary.clone(),
            l.interior
                .iter()
                .map(|p| p.z().unwrap_or(Complex64::new(f64::INFINITY, 0.0)))
                .collect(),
        ),
        "single-log" => {
            let s = coords::log_to_single_log(l).map_err(err)?;
            (s.boundary, s.interior)
        }
        "double-log" => {
            let d = coords::log_to_double_log(l).map_err(err)?;
            (d.boundary, d.interior)
        }
        s => return Err(PyValueError::new_err(format!("unknown system '{s}'"))),
    })
}

/// Converts node coordinates between `raw`, `log`, `single-log` and `double-log`.
#[pyfunction]
#[pyo3(signature = (source, target, boundary=vec![], interior=vec![], cutoff=DEFAULT_CUTOFF))]
fn convert(source: &str, target: &str, boundary: Vec<f64>, interior: Vec<Complex64>, cutoff: f64) -> PyResult<Tuple> {
    from_log(target, &to_log(source, boundary, interior, cutoff)?)
}

/// `rho -> rho / (1 - log(lam) |rho|)`.
#[pyfunction]
fn rescale_single_log(rho: Complex64, lam: Complex64) -> PyResult<Complex64> {
    coords::rescale_single_log(rho, factor(lam)?).map_err(err)
}

/// `phi -> phi / (1 + |phi| log(1 - log(lam) e^{-1/|phi|}))`.
#[pyfunction]
fn rescale_double_log(phi: Complex64, lam: Complex64) -> PyResult<Complex64> {
    coords::rescale_double_log(phi, factor(lam)?).map_err(err)
}

/// `t -> t / (1 - log(lam) t)`.
#[pyfunction]
fn rescale_corner(t: f64, lam: Complex64) -> PyResult<f64> {
    coords::rescale_corner(t, factor(lam)?).map_err(err)
}

/// `s -> s / (1 + s log(1 - log(lam) e^{-1/s}))`.
#[pyfunction]
fn rescale_corner_double(s: f64, lam: Complex64) -> PyResult<f64> {
    coords::rescale_corner_double(s, factor(lam)?).map_err(err)
}

#[pyclass(frozen)]
struct SmoothnessReport(gluing_core::jet::SmoothnessReport);

#[pymethods]
impl SmoothnessReport {
    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    #[getter]
    fn is_smooth(&self) -> bool {
        self.0.verdict.is_smooth()
    }

    #[getter]
    fn max_verified_order(&self) -> usize {
        self.0.max_verified_order
    }

    /// Largest certified jump at `order` along directions whose label contains `pattern`.
    #[pyo3(signature = (order, pattern=""))]
    fn jump(&self, order: usize, pattern: &str) -> Option<f64> {
        self.0.jump(order, pattern).filter(|c| c.certified).map(|c| c.mismatch)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("SmoothnessReport({})", self.0.label)
    }
}

fn tolerances(radius: Option<f64>) -> Tolerances {
    let d = Tolerances::default();
    Tolerances {
        radius: radius.unwrap_or(d.radius),
        ..d
    }
}

/// Classifies a named rescale map at the origin up to `order`.
#[pyfunction]
#[pyo3(signature = (map, lam, order=4, radius=None))]
fn classify(map: &str, lam: Complex64, order: usize, radius: Option<f64>) -> PyResult<SmoothnessReport> {
    let lam = factor(lam)?;
    let (f, x0) = RescaleMap::from_name(map).and_then(|m| m.build(lam)).map_err(err)?;
    classify_smoothness(&*f, &x0, order, tolerances(radius))
        .map(SmoothnessReport)
        .map_err(err)
}

#[pyclass(frozen)]
struct ModuliCoords(gluing_core::plumbing::plumb::ModuliCoords);

#[pymethods]
impl ModuliCoords {
    /// Original indices of the nodes still present.
    #[getter]
    fn nodes(&self) -> Vec<usize> {
        self.0.nodes.clone()
    }

    fn to_vec(&self) -> Vec<f64> {
        self.0.to_vec()
    }

    /// Max-norm distance; `None` when the combinatorial types differ.
    fn distance(&self, other: &ModuliCoords) -> Option<f64> {
        self.0.distance(&other.0)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }
}

#[pyclass(frozen)]
#[derive(Clone)]
struct Tree(StableTree);

#[pymethods]
impl Tree {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Tree> {
        StableTree::from_json(s).map(Tree).map_err(err)
    }

    /// A built-in tree: two-sphere, disk-boundary-pair, disk-sphere-bubble or chain.
    #[staticmethod]
    fn model(name: &str) -> PyResult<Tree> {
        models::model(name).map(Tree).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }

    #[getter]
    fn cutoff(&self) -> f64 {
        self.0.cutoff
    }

    /// `(boundary, interior)` node counts.
    #[getter]
    fn node_counts(&self) -> (usize, usize) {
        let t = self.0.topology();
        (t.m_d, t.m_s)
    }

    /// Marked-point positions.
    fn v(&self) -> Vec<f64> {
        self.0.v()
    }

    /// Plumbs with raw parameters (zero when omitted) and gauge-fixes the result.
    #[pyo3(signature = (r=None, sigma=None, v=None))]
    fn plumb(&self, r: Option<Vec<f64>>, sigma: Option<Vec<Complex64>>, v: Option<Vec<f64>>) -> PyResult<ModuliCoords> {
        let (m_d, m_s) = self.node_counts();
        let params = NodeParams::new(
            r.unwrap_or_else(|| vec![0.0; m_d]),
            sigma.unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); m_s]),
            self.0.cutoff,
        )
        .map_err(err)?;
        if params.boundary.len() != m_d || params.interior.len() != m_s {
            return Err(PyValueError::new_err(format!(
                "expected {m_d} boundary and {m_s} interior parameters"
            )));
        }
        let v = v.unwrap_or_else(|| self.0.v());
        chart_map_phi(&self.0, &v, &params).map(ModuliCoords).map_err(err)
    }
}

#[pyclass(frozen)]
struct SuiteReport(gluing_core::estimates::SuiteReport);

#[pymethods]
impl SuiteReport {
    #[getter]
    fn all_passed(&self) -> bool {
        self.0.all_passed()
    }

    /// `(id, n, verdict, slope, r2, passed)` per estimate line.
    fn results(&self) -> Vec<(String, usize, String, f64, f64, bool)> {
        self.0
            .results
            .iter()
            .map(|r| {
                let f = &r.check.coarse;
                (
                    r.id.clone(),
                    r.spec.n,
                    r.verdict_label().to_string(),
                    f.slope,
                    f.r2,
                    r.passed(),
                )
            })
            .collect()
    }

    fn summary(&self) -> Vec<String> {
        self.0.summary()
    }

    fn to_csv(&self) -> String {
        to_csv(&self.0.results)
    }
}

fn transition_system(s: &str) -> PyResult<TransitionSystem> {
    match s {
        "single-log" => Ok(TransitionSystem::SingleLog),
        "double-log" => Ok(TransitionSystem::DoubleLog),
        _ => Err(PyValueError::new_err(format!("unknown transition system '{s}'"))),
    }
}

#[pyclass(frozen)]
struct ChartPair(models::ChartPair);

#[pymethods]
impl ChartPair {
    /// From a pair description such as `{"kind": "rescale", "model": "chain", "lambda": 2.0}`.
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<ChartPair> {
        PairSpec::from_json(s)
            .and_then(|p| p.build())
            .map(ChartPair)
            .map_err(err)
    }

    #[staticmethod]
    fn rescale(tree: &Tree, lam: Complex64) -> PyResult<ChartPair> {
        models::rescale_pair(&tree.0, lam).map(ChartPair).map_err(err)
    }

    #[staticmethod]
    fn nonlinear(tree: &Tree, a1: f64) -> ChartPair {
        ChartPair(models::nonlinear_pair(&tree.0, a1))
    }

    #[staticmethod]
    fn identical(tree: &Tree) -> ChartPair {
        ChartPair(models::identical_pair(&tree.0))
    }

    #[getter]
    fn p(&self) -> Tree {
        Tree(self.0.p.clone())
    }

    #[getter]
    fn q(&self) -> Tree {
        Tree(self.0.q.clone())
    }

    /// Maps a point of q's chart to p's chart in `log`, `single-log` or `double-log` coordinates.
    #[pyo3(signature = (system="double-log", boundary=vec![], interior=vec![], v=None))]
    fn transition(
        &self,
        system: &str,
        boundary: Vec<f64>,
        interior: Vec<Complex64>,
        v: Option<Vec<f64>>,
    ) -> PyResult<Tuple> {
        if system == "raw" {
            return Err(PyValueError::new_err(
                "transitions are evaluated in log-type coordinates",
            ));
        }
        let l = to_log(system, boundary, interior, self.0.q.cutoff)?;
        let v = v.unwrap_or_else(|| self.0.q.v());
        let (lp, _) = chart_transition_log(&self.0.p, &self.0.q, &v, &l).map_err(err)?;
        from_log(system, &lp)
    }

    /// Classifies the transition map at the deepest corner.
    #[pyo3(signature = (system="double-log", order=4, radius=None))]
    fn classify(&self, system: &str, order: usize, radius: Option<f64>) -> PyResult<SmoothnessReport> {
        let (f, x0) = transition_map(&self.0, transition_system(system)?).map_err(err)?;
        classify_smoothness(&*f, &x0, order, tolerances(radius))
            .map(SmoothnessReport)
            .map_err(err)
    }

    /// Runs the decay-estimate suite; `estimates` selects families by id.
    #[pyo3(signature = (n_max=2, estimates=None, seed=0, v_samples=1))]
    fn verify_decay(
        &self,
        n_max: usize,
        estimates: Option<Vec<String>>,
        seed: u64,
        v_samples: usize,
    ) -> PyResult<SuiteReport> {
        let estimates = estimates
            .unwrap_or_default()
            .iter()
            .map(|s| EstimateKind::from_id(s))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let cfg = SuiteConfig {
            n_max,
            estimates,
            seed,
            v_samples,
            ..SuiteConfig::default()
        };
        run_suite(&self.0, &cfg).map(SuiteReport).map_err(err)
    }
}

#[pymodule]
pub fn gluing(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_CUTOFF", DEFAULT_CUTOFF)?;
    m.add_function(wrap_pyfunction!(convert, m)?)?;
    m.add_function(wrap_pyfunction!(rescale_single_log, m)?)?;
    m.add_function(wrap_pyfunction!(rescale_double_log, m)?)?;
    m.add_function(wrap_pyfunction!(rescale_corner, m)?)?;
    m.add_function(wrap_pyfunction!(rescale_corner_double, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_class::<Tree>()?;
    m.add_class::<ModuliCoords>()?;
    m.add_class::<ChartPair>()?;
    m.add_class::<SmoothnessReport>()?;
    m.add_class::<SuiteReport>()?;
    Ok(())
}
