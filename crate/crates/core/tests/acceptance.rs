//! Acceptance criteria 1-8, one PASS/FAIL line each.

use std::f64::consts::E;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gluing_core::coords::{
    double_log_to_log, from_double_log, from_single_log, log_to_double_log, log_to_single_log, rescale_corner,
    rescale_corner_dd, rescale_corner_double, rescale_double_log, rescale_log, rescale_single_log, single_log_to_log,
    to_double_log, to_single_log, LogCoords, LogPair, NodeParams, NodeRef, RescaleFactor, DEFAULT_CUTOFF,
};
use gluing_core::estimates::{default_grid, estimate_angular_offset, run_suite, Evaluator, SuiteConfig, SuiteReport};
use gluing_core::jet::{classify_smoothness, flatness_test, one_sided_1d_dd, Ladder, Tolerances, Verdict};
use gluing_core::maps::{transition_map, RescaleMap, TransitionSystem};
use gluing_core::plumbing::models::{chain, disk_sphere_bubble, nonlinear_pair, rescale_pair, two_sphere};
use gluing_core::plumbing::plumb::plumb_normalized;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn single_log_failure() -> Outcome {
    let mut worst = 0.0_f64;
    for lam in [E, E * E, 2.0] {
        let a = lam.ln();
        let (f, x0) = RescaleMap::SingleLog
            .build(RescaleFactor::real(lam).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let rep = classify_smoothness(&*f, &x0, 3, Tolerances::default()).map_err(|e| e.to_string())?;
        ensure(rep.verdict == Verdict::NotSmooth { k: 1 }, || {
            format!("lambda = {lam}: verdict {}", rep.label)
        })?;
        let jump = rep
            .jump(2, "ray 0pi/4")
            .ok_or("no order-2 evidence along the real ray")?;
        let err = rel(jump.mismatch, 4.0 * a);
        ensure(err <= 1e-3, || {
            format!("lambda = {lam}: jump {} vs {}", jump.mismatch, 4.0 * a)
        })?;
        worst = worst.max(err);
    }
    Ok(format!("C1-not-C2 for e, e^2, 2; worst jump error {worst:.1e}"))
}

fn double_log_smoothness() -> Outcome {
    let lam = RescaleFactor::real(E).map_err(|e| e.to_string())?;
    let (f, x0) = RescaleMap::DoubleLog.build(lam).map_err(|e| e.to_string())?;
    let rep = classify_smoothness(&*f, &x0, 6, Tolerances::default()).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::ConsistentUpTo { order: 6 }, || {
        format!("verdict {}", rep.label)
    })?;
    let radii: Vec<f64> = (0..6).map(|k| 0.2 * 0.5f64.powi(k)).collect();
    let gap = |z: Complex64| (rescale_double_log(z, lam).unwrap() - z).norm();
    let (flat, ev) = flatness_test(gap, 6, &radii);
    ensure(flat, || format!("flatness fails at order {:?}", ev.failed_order))?;
    let mut samples = 0;
    for &r in &radii {
        for k in 0..64 {
            let z = Complex64::from_polar(r * (1.0 - k as f64 / 64.0).max(0.01), k as f64 * 0.37);
            let bound = (-1.0 / (2.0 * z.norm())).exp();
            ensure(gap(z) <= bound, || {
                format!("|phi' - phi| = {:e} > {bound:e} at {z}", gap(z))
            })?;
            samples += 1;
        }
    }
    Ok(format!(
        "consistent to order 6, flat to N = 6, bound holds at {samples} samples"
    ))
}

fn corner_smoothness() -> Outcome {
    let mut worst = 0.0_f64;
    for lam in [2.0, E, 0.5] {
        let a = lam.ln();
        let lf = RescaleFactor::real(lam).map_err(|e| e.to_string())?;
        let mut fact = 1.0;
        for n in 1..=5usize {
            fact *= n as f64;
            let jet = one_sided_1d_dd(|t| rescale_corner_dd(t, lf), n, Ladder::halving(0.2 / n as f64, 10))
                .map_err(|e| e.to_string())?;
            let want = fact * a.powi(n as i32 - 1);
            let err = rel(jet.value, want);
            ensure(err <= 1e-6, || {
                format!("lambda = {lam}, n = {n}: {} vs {want}", jet.value)
            })?;
            worst = worst.max(err);
        }
    }
    Ok(format!(
        "n!a^(n-1) for n <= 5 at lambda in {{2, e, 1/2}}; worst {worst:.1e}"
    ))
}

fn pipeline_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = DEFAULT_CUTOFF;
    let mut worst_map = 0.0_f64;
    for _ in 0..1000 {
        let lam_re: f64 = rng.random_range(0.3..3.0);
        let lam = RescaleFactor::real(lam_re).map_err(|e| e.to_string())?;
        let a = lam_re.ln();
        let t: f64 = rng.random_range(3.0 + a.max(0.0)..60.0);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let l = LogCoords {
            boundary: vec![t],
            interior: vec![LogPair { t, theta: Some(theta) }],
            cutoff: c,
        };
        let err = |e: gluing_core::Error| e.to_string();
        let via = |l: &LogCoords| -> Result<LogCoords, String> {
            let l = rescale_log(l, NodeRef::Boundary(0), lam).map_err(err)?;
            rescale_log(&l, NodeRef::Interior(0), lam).map_err(err)
        };
        let lp = via(&l)?;
        let sl = log_to_single_log(&l).map_err(err)?;
        let slp = log_to_single_log(&lp).map_err(err)?;
        let dl = log_to_double_log(&l).map_err(err)?;
        let dlp = log_to_double_log(&lp).map_err(err)?;
        let errs = [
            crel(rescale_single_log(sl.interior[0], lam).map_err(err)?, slp.interior[0]),
            crel(rescale_double_log(dl.interior[0], lam).map_err(err)?, dlp.interior[0]),
            rel(rescale_corner(sl.boundary[0], lam).map_err(err)?, slp.boundary[0]),
            rel(
                rescale_corner_double(dl.boundary[0], lam).map_err(err)?,
                dlp.boundary[0],
            ),
        ];
        let e = errs.into_iter().fold(0.0, f64::max);
        ensure(e <= 1e-12, || {
            format!("closed form vs composition: {e:e} at lambda = {lam_re}, T = {t}")
        })?;
        worst_map = worst_map.max(e);
    }
    let mut worst_trip = 0.0_f64;
    for _ in 0..1000 {
        let lr: f64 = rng.random_range(3.0..100.0);
        let ls: f64 = rng.random_range(3.0..100.0);
        let arg: f64 = rng.random_range(-3.0..3.0);
        let raw = NodeParams::new(vec![(-lr).exp()], vec![Complex64::from_polar((-ls).exp(), arg)], c)
            .map_err(|e| e.to_string())?;
        let err = |e: gluing_core::Error| e.to_string();
        let sl = to_single_log(&raw).map_err(err)?;
        let dl = to_double_log(&raw).map_err(err)?;
        let back_sl = from_single_log(&sl).map_err(err)?;
        let back_dl = from_double_log(&dl).map_err(err)?;
        let sl_dl = log_to_double_log(&single_log_to_log(&sl).map_err(err)?).map_err(err)?;
        let dl_sl = log_to_single_log(&double_log_to_log(&dl).map_err(err)?).map_err(err)?;
        let errs = [
            rel(back_sl.boundary[0], raw.boundary[0]),
            crel(back_sl.interior[0], raw.interior[0]),
            rel(back_dl.boundary[0], raw.boundary[0]),
            crel(back_dl.interior[0], raw.interior[0]),
            rel(sl_dl.boundary[0], dl.boundary[0]),
            crel(sl_dl.interior[0], dl.interior[0]),
            rel(dl_sl.boundary[0], sl.boundary[0]),
            crel(dl_sl.interior[0], sl.interior[0]),
        ];
        let e = errs.into_iter().fold(0.0, f64::max);
        ensure(e <= 1e-12, || {
            format!("round trip error {e:e} at -log r = {lr}, -log|sigma| = {ls}")
        })?;
        worst_trip = worst_trip.max(e);
    }
    Ok(format!(
        "1000 rescale inputs worst {worst_map:.1e}; 1000 round trips worst {worst_trip:.1e}"
    ))
}

fn plumbing_oracle() -> Outcome {
    let t = two_sphere();
    let coord = |s: Complex64| -> Result<Complex64, String> {
        let p = NodeParams::new(vec![], vec![s], t.cutoff).map_err(|e| e.to_string())?;
        let m = plumb_normalized(&t, &p).map_err(|e| e.to_string())?;
        Ok(m.components[0].points[0].position)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let s = Complex64::from_polar(rng.random_range(1e-6..t.cutoff), rng.random_range(-3.1..3.1));
        let want = ((1.0 - s) / (1.0 + s)).powi(2);
        let e = (coord(s)? - want).norm();
        ensure(e <= 1e-12, || format!("sigma = {s}: error {e:e}"))?;
        worst = worst.max(e);
    }
    let x = coord(Complex64::new(0.1, 0.0))?;
    ensure((x.re - 0.669421).abs() < 5e-7 && x.im == 0.0, || {
        format!("sigma = 0.1 gives {x}")
    })?;
    Ok(format!("100 samples worst {worst:.1e}; sigma = 0.1 -> {:.6}", x.re))
}

fn suite_summary(name: &str, rep: &SuiteReport) -> Result<(), String> {
    let bad: Vec<String> = rep
        .summary()
        .into_iter()
        .zip(&rep.results)
        .filter(|(_, r)| !r.passed())
        .map(|(l, _)| l)
        .collect();
    ensure(bad.is_empty(), || format!("{name}: {}", bad.join("; ")))
}

fn estimate_suite() -> Outcome {
    let cfg = SuiteConfig {
        n_max: 2,
        v_samples: 3,
        ..Default::default()
    };
    let rescale = rescale_pair(&chain(), Complex64::new(E, 0.0)).map_err(|e| e.to_string())?;
    let nonlinear = nonlinear_pair(&chain(), 0.3);
    let mut lines = 0;
    let mut fitted = 0;
    let mut worst_change = 0.0_f64;
    for (name, pair) in [("rescale", &rescale), ("nonlinear", &nonlinear)] {
        let rep = run_suite(pair, &cfg).map_err(|e| e.to_string())?;
        suite_summary(name, &rep)?;
        for r in &rep.results {
            let f = &r.check.coarse;
            if f.verdict == gluing_core::estimates::FitVerdict::Pass {
                ensure(f.slope <= -cfg.c_min && f.r2 >= 0.99, || {
                    format!("{name} {}: slope {} r2 {}", r.id, f.slope, f.r2)
                })?;
                worst_change = worst_change.max(r.check.slope_change);
                fitted += 1;
            }
        }
        lines += rep.results.len();
        if name == "rescale" {
            for r in rep
                .results
                .iter()
                .filter(|r| r.spec.kind == gluing_core::estimates::EstimateKind::CornerGap)
            {
                let rate = -r.check.coarse.slope;
                ensure(rate >= 0.5, || {
                    format!("corner rate {rate} below the closed-form 1/2 for {}", r.id)
                })?;
            }
        }
    }
    Ok(format!(
        "{lines} lines pass ({fitted} fitted, rest vacuous); worst halving change {:.1}%",
        100.0 * worst_change
    ))
}

fn transition_classification() -> Outcome {
    let pair = rescale_pair(&chain(), Complex64::new(E, 0.0)).map_err(|e| e.to_string())?;
    let (f, x0) = transition_map(&pair, TransitionSystem::DoubleLog).map_err(|e| e.to_string())?;
    let rep = classify_smoothness(&*f, &x0, 4, Tolerances::default()).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::ConsistentUpTo { order: 4 }, || {
        format!("double-log verdict {}", rep.label)
    })?;
    let dirs = rep
        .evidence
        .iter()
        .map(|c| c.direction.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    ensure(rep.evidence.iter().all(|c| !c.certified), || {
        "certified mismatch in double-log coordinates".into()
    })?;
    let (f, x0) = transition_map(&pair, TransitionSystem::SingleLog).map_err(|e| e.to_string())?;
    let rep = classify_smoothness(&*f, &x0, 4, Tolerances::default()).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::NotSmooth { k: 1 }, || {
        format!("single-log verdict {}", rep.label)
    })?;
    Ok(format!(
        "double-log consistent to order 4 over {dirs} directions; single-log C1-not-C2"
    ))
}

fn angular_offset() -> Outcome {
    let bubble = disk_sphere_bubble();
    let mut out = Vec::new();
    for lam in [
        Complex64::new(E, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::from_polar(1.0, 0.7),
    ] {
        let pair = rescale_pair(&bubble, lam).map_err(|e| e.to_string())?;
        let mut ev = Evaluator::new(&pair).map_err(|e| e.to_string())?;
        let base = ev.default_base();
        let node = (0..ev.node_count())
            .find(|&e| pair.q.nodes[e].kind == gluing_core::plumbing::tree::NodeKind::Interior)
            .ok_or("no interior node")?;
        let a =
            estimate_angular_offset(&mut ev, node, &base, 10.0, &default_grid(), 1e-9).map_err(|e| e.to_string())?;
        ensure(a.converged, || {
            format!("lambda = {lam}: not converged, gap {:e}", a.cauchy_gap)
        })?;
        if lam.im == 0.0 {
            ensure(a.estimate == 0.0 && a.raw.iter().all(|r| r.1 == 0.0), || {
                format!("lambda = {lam}: offset {:e}", a.estimate)
            })?;
        } else {
            let alpha = lam.arg();
            let err = (a.estimate.abs() - alpha).abs();
            ensure(err <= 1e-9, || {
                format!("lambda = {lam}: offset {} vs +-{alpha}", a.estimate)
            })?;
        }
        out.push(format!("{:.12}", a.estimate));
    }
    Ok(format!("offsets for e, 2, e^(0.7i): {}", out.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "single-log rescale is C1-not-C2 with jump 4 log lambda",
            single_log_failure,
            Duration::from_secs(1),
        ),
        (
            "double-log rescale is smooth and flat",
            double_log_smoothness,
            Duration::from_secs(2),
        ),
        ("corner rescale derivatives", corner_smoothness, Duration::MAX),
        (
            "closed forms match compositions and round trips",
            pipeline_consistency,
            Duration::from_secs(1),
        ),
        ("two-sphere plumbing oracle", plumbing_oracle, Duration::from_secs(1)),
        ("decay estimate suite, n <= 2", estimate_suite, Duration::from_secs(60)),
        (
            "rescaled-twin transition smoothness",
            transition_classification,
            Duration::from_secs(120),
        ),
        ("angular offset", angular_offset, Duration::MAX),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let res = run();
        let dt = t0.elapsed();
        let res = res.and_then(|m| {
            if dt <= limit {
                Ok(m)
            } else {
                Err(format!("took {dt:.2?}, limit {limit:?}"))
            }
        });
        match res {
            Ok(m) => println!("PASS criterion {}: {name} ({dt:.2?}): {m}", k + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({dt:.2?}): {m}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
