use std::f64::consts::{E, PI};

use gluing_core::coords::DoubleLogCoords;
use gluing_core::coords::{
    from_double_log, from_log, from_single_log, log_to_double_log, log_to_single_log, rescale_corner,
    rescale_corner_double, rescale_double_log, rescale_log, rescale_single_log, to_double_log, to_log, to_single_log,
    LogCoords, LogPair, NodeParams, NodeRef, RescaleFactor, DEFAULT_CUTOFF,
};
use gluing_core::estimates::{run_suite, FitVerdict, SuiteConfig};
use gluing_core::jet::{classify_smoothness, one_sided_1d, CornerPoint, Ladder, Side, Tolerances, Verdict};
use gluing_core::plumbing::mobius::{Ext, Mobius};
use gluing_core::plumbing::models::{
    chain, disk_boundary_pair, disk_sphere_bubble, identical_pair, nonlinear_pair, rescale_pair, two_sphere,
};
use gluing_core::plumbing::plumb::{chart_map_phi, normalize, plumb, plumb_normalized};
use gluing_core::plumbing::transition::chart_transition;
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn raw(neg_log_r: f64, neg_log_s: f64, arg: f64) -> NodeParams {
    NodeParams::new(
        vec![(-neg_log_r).exp()],
        vec![Complex64::from_polar((-neg_log_s).exp(), arg)],
        DEFAULT_CUTOFF,
    )
    .unwrap()
}

fn params_close(a: &NodeParams, b: &NodeParams) -> bool {
    a.boundary.iter().zip(&b.boundary).all(|(x, y)| rel(*x, *y) <= 1e-12)
        && a.interior.iter().zip(&b.interior).all(|(x, y)| crel(*x, *y) <= 1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coordinate_round_trips(lr in 2.0f64..100.0, ls in 2.0f64..100.0, arg in -3.1f64..3.1) {
        let p = raw(lr, ls, arg);
        prop_assert!(params_close(&from_log(&to_log(&p).unwrap()).unwrap(), &p));
        prop_assert!(params_close(&from_single_log(&to_single_log(&p).unwrap()).unwrap(), &p));
        prop_assert!(params_close(&from_double_log(&to_double_log(&p).unwrap()).unwrap(), &p));
    }

    #[test]
    fn corner_coordinates_increase_with_r(a in 2.0f64..200.0, b in 2.0f64..200.0) {
        prop_assume!(a != b);
        let (near, far) = if a > b { (a, b) } else { (b, a) };
        let (pn, pf) = (raw(near, 5.0, 0.0), raw(far, 5.0, 0.0));
        let (tn, tf) = (to_single_log(&pn).unwrap().boundary[0], to_single_log(&pf).unwrap().boundary[0]);
        let (sn, sf) = (to_double_log(&pn).unwrap().boundary[0], to_double_log(&pf).unwrap().boundary[0]);
        prop_assert!(tn < tf && sn < sf);
    }

    #[test]
    fn closed_forms_match_log_composition(lam in 0.3f64..3.0, t in 5.0f64..80.0, theta in 0.0f64..std::f64::consts::TAU) {
        let lf = RescaleFactor::real(lam).unwrap();
        let l = LogCoords { boundary: vec![t], interior: vec![LogPair { t, theta: Some(theta) }], cutoff: DEFAULT_CUTOFF };
        let lp = rescale_log(&rescale_log(&l, NodeRef::Boundary(0), lf).unwrap(), NodeRef::Interior(0), lf).unwrap();
        let (sl, slp) = (log_to_single_log(&l).unwrap(), log_to_single_log(&lp).unwrap());
        let (dl, dlp) = (log_to_double_log(&l).unwrap(), log_to_double_log(&lp).unwrap());
        prop_assert!(crel(rescale_single_log(sl.interior[0], lf).unwrap(), slp.interior[0]) <= 1e-12);
        prop_assert!(crel(rescale_double_log(dl.interior[0], lf).unwrap(), dlp.interior[0]) <= 1e-12);
        prop_assert!(rel(rescale_corner(sl.boundary[0], lf).unwrap(), slp.boundary[0]) <= 1e-12);
        prop_assert!(rel(rescale_corner_double(dl.boundary[0], lf).unwrap(), dlp.boundary[0]) <= 1e-12);
    }

    #[test]
    fn rescales_commute_with_rotation(lam in 0.3f64..3.0, r in 0.01f64..0.3, arg in -3.1f64..3.1, alpha in -3.1f64..3.1) {
        let lf = RescaleFactor::real(lam).unwrap();
        let z = Complex64::from_polar(r, arg);
        let rot = Complex64::from_polar(1.0, alpha);
        if let Ok(w) = rescale_single_log(z, lf) {
            prop_assert!(crel(rescale_single_log(rot * z, lf).unwrap(), rot * w) <= 1e-14);
        }
        if let Ok(w) = rescale_double_log(z, lf) {
            prop_assert!(crel(rescale_double_log(rot * z, lf).unwrap(), rot * w) <= 1e-14);
        }
    }

    #[test]
    fn rescales_compose_multiplicatively(l1 in 0.5f64..2.0, l2 in 0.5f64..2.0, r in 0.01f64..0.25, arg in -3.1f64..3.1) {
        let (f1, f2, f12) = (RescaleFactor::real(l1).unwrap(), RescaleFactor::real(l2).unwrap(), RescaleFactor::real(l1 * l2).unwrap());
        let z = Complex64::from_polar(r, arg);
        if let (Ok(a), Ok(b)) = (rescale_single_log(z, f2).and_then(|w| rescale_single_log(w, f1)), rescale_single_log(z, f12)) {
            prop_assert!(crel(a, b) <= 1e-12);
        }
        if let (Ok(a), Ok(b)) = (rescale_double_log(z, f2).and_then(|w| rescale_double_log(w, f1)), rescale_double_log(z, f12)) {
            prop_assert!(crel(a, b) <= 1e-12);
        }
        if let (Ok(a), Ok(b)) = (rescale_corner(r, f2).and_then(|w| rescale_corner(w, f1)), rescale_corner(r, f12)) {
            prop_assert!(rel(a, b) <= 1e-12);
        }
        if let (Ok(a), Ok(b)) = (rescale_corner_double(r, f2).and_then(|w| rescale_corner_double(w, f1)), rescale_corner_double(r, f12)) {
            prop_assert!(rel(a, b) <= 1e-12);
        }
    }

    #[test]
    fn polynomial_jets_are_exact(n in 1usize..=5, coeffs in prop::collection::vec(-2.0f64..2.0, 9)) {
        let deg = n + 3;
        let p = |x: f64| Ok(coeffs[..=deg].iter().rev().fold(0.0, |acc, c| acc * x + c));
        let want = coeffs[n] * (1..=n).map(|k| k as f64).product::<f64>();
        prop_assume!(coeffs[n].abs() > 0.25);
        for side in [Side::Plus, Side::Minus] {
            let j = one_sided_1d(p, n, side, Ladder::halving(1.0, 6)).unwrap();
            prop_assert!((j.value - want).abs() <= 1e-8 * want.abs(), "n={} {:?}: {} vs {}", n, side, j.value, want);
        }
    }

    #[test]
    fn analytic_functions_have_matching_sides(n in 1usize..=4, k in 0.2f64..1.5, x0 in -1.0f64..1.0) {
        let g = |x: f64| Ok((k * (x0 + x)).exp() * (x0 + x).sin());
        let lad = Ladder::for_order(n, 0.2);
        let p = one_sided_1d(g, n, Side::Plus, lad).unwrap();
        let m = one_sided_1d(g, n, Side::Minus, lad).unwrap();
        let slack = (10.0 * (p.error_estimate + m.error_estimate)).max(1e-6 * p.value.abs().max(1.0));
        prop_assert!((p.value - m.value).abs() <= slack, "{} vs {}", p.value, m.value);
    }

    #[test]
    fn single_log_jump_is_four_log_lambda(lam in 0.3f64..8.0) {
        prop_assume!((lam - 1.0).abs() > 0.2);
        let lf = RescaleFactor::real(lam).unwrap();
        let f = move |x: &[f64]| rescale_single_log(Complex64::new(x[0], x[1]), lf).map(|w| vec![w.re, w.im]);
        let x0 = CornerPoint::new(vec![], vec![Complex64::new(0.0, 0.0)], vec![]).unwrap();
        let tol = Tolerances { radius: 0.2f64.min(0.5 / lam.ln().abs()), ..Tolerances::default() };
        let rep = classify_smoothness(&f, &x0, 3, tol).unwrap();
        prop_assert_eq!(&rep.verdict, &Verdict::NotSmooth { k: 1 });
        let j = rep.jump(2, "ray 0pi/4").unwrap();
        prop_assert!(rel(j.mismatch, 4.0 * lam.ln().abs()) <= 1e-3, "{} vs {}", j.mismatch, 4.0 * lam.ln());
    }

    #[test]
    fn classification_ignores_rotation_of_equivariant_maps(alpha in -3.1f64..3.1) {
        let lf = RescaleFactor::real(E).unwrap();
        let rot = Complex64::from_polar(1.0, alpha);
        let x0 = CornerPoint::new(vec![], vec![Complex64::new(0.0, 0.0)], vec![]).unwrap();
        for single in [true, false] {
            let f = move |x: &[f64]| {
                let z = rot * Complex64::new(x[0], x[1]);
                let w = if single { rescale_single_log(z, lf)? } else { rescale_double_log(z, lf)? };
                let w = w / rot;
                Ok(vec![w.re, w.im])
            };
            let rep = classify_smoothness(&f, &x0, 3, Tolerances::default()).unwrap();
            let want = if single { Verdict::NotSmooth { k: 1 } } else { Verdict::ConsistentUpTo { order: 3 } };
            prop_assert_eq!(rep.verdict, want);
        }
    }

    #[test]
    fn two_sphere_coordinate_is_closed_form(r in 1e-6f64..0.13, arg in -3.1f64..3.1) {
        let t = two_sphere();
        let s = Complex64::from_polar(r, arg);
        let m = plumb_normalized(&t, &NodeParams::new(vec![], vec![s], t.cutoff).unwrap()).unwrap();
        let want = ((1.0 - s) / (1.0 + s)).powi(2);
        prop_assert!((m.components[0].points[0].position - want).norm() <= 1e-12);
    }

    #[test]
    fn moduli_coordinates_are_gauge_independent(r in 1e-4f64..0.13, a in 0.5f64..2.0, b in -1.0f64..1.0, c in -0.2f64..0.2) {
        let t = disk_boundary_pair();
        let smoothed = plumb(&t, &NodeParams::new(vec![r], vec![], t.cutoff).unwrap()).unwrap().tree;
        // Upper-half-plane automorphism with positive determinant, finite on the sampled points.
        let m = Mobius::real(a, b, c, 1.0 + c * b / a);
        prop_assume!((m.det().re - 1.0).abs() < 10.0 && m.det().re > 0.1);
        let mut moved = smoothed.clone();
        for p in &mut moved.marked {
            match m.apply(Ext::Finite(p.position)) {
                Ext::Finite(z) => p.position = Complex64::new(z.re, 0.0),
                Ext::Infinity => return Ok(()),
            }
        }
        let (x, y) = match (normalize(&smoothed), normalize(&moved)) {
            (Ok(x), Ok(y)) => (x, y),
            _ => return Ok(()),
        };
        prop_assert!(x.distance(&y).unwrap() <= 1e-12, "{:?}", x.distance(&y));
    }

    #[test]
    fn center_is_family_independent(a1 in -0.5f64..0.5) {
        for t in [chain(), disk_sphere_bubble(), disk_boundary_pair(), two_sphere()] {
            let pair = nonlinear_pair(&t, a1);
            let topo = t.topology();
            let zero = NodeParams::zeros(topo.m_d, topo.m_s, t.cutoff);
            prop_assert_eq!(chart_map_phi(&pair.p, &t.v(), &zero).unwrap(), chart_map_phi(&pair.q, &t.v(), &zero).unwrap());
        }
    }

    #[test]
    fn transitions_preserve_strata(s in 0.05f64..0.6, r in 0.05f64..0.6, arg in -3.1f64..3.1, a1 in -0.4f64..0.4) {
        let t = chain();
        let pair = nonlinear_pair(&t, a1);
        let phi = Complex64::from_polar(r, arg);
        let d = DoubleLogCoords { boundary: vec![0.0], interior: vec![phi], cutoff: t.cutoff };
        let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
        prop_assert_eq!(dp.boundary[0], 0.0);
        prop_assert!(dp.interior[0].norm() > 0.0);
        let d = DoubleLogCoords { boundary: vec![s], interior: vec![Complex64::new(0.0, 0.0)], cutoff: t.cutoff };
        let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &t.v()).unwrap();
        prop_assert_eq!(dp.interior[0], Complex64::new(0.0, 0.0));
        prop_assert!(dp.boundary[0] > 0.0);
    }
}

#[test]
fn rescales_fix_the_corner() {
    let lf = RescaleFactor::real(PI).unwrap();
    let zero = Complex64::new(0.0, 0.0);
    assert_eq!(rescale_single_log(zero, lf).unwrap(), zero);
    assert_eq!(rescale_double_log(zero, lf).unwrap(), zero);
    assert_eq!(rescale_corner(0.0, lf).unwrap(), 0.0);
    assert_eq!(rescale_corner_double(0.0, lf).unwrap(), 0.0);
}

#[test]
fn identical_pair_suite_is_vacuous() {
    let rep = run_suite(
        &identical_pair(&chain()),
        &SuiteConfig {
            n_max: 1,
            ..Default::default()
        },
    )
    .unwrap();
    for r in &rep.results {
        assert_eq!(r.check.coarse.verdict, FitVerdict::VacuousPass, "{}", r.id);
        assert!(r.quantities.iter().all(|&q| q == 0.0), "{}", r.id);
    }
}

#[test]
fn rescale_transition_is_family_composition() {
    let pair = rescale_pair(&disk_sphere_bubble(), Complex64::new(2.0, 0.0)).unwrap();
    let lf = RescaleFactor::real(2.0).unwrap();
    for k in 1..20 {
        let phi = Complex64::from_polar(0.03 * k as f64, 0.4 * k as f64);
        let d = DoubleLogCoords {
            boundary: vec![],
            interior: vec![phi],
            cutoff: pair.q.cutoff,
        };
        let (_, dp) = chart_transition(&pair.p, &pair.q, &d, &pair.q.v()).unwrap();
        assert!(crel(dp.interior[0], rescale_double_log(phi, lf).unwrap()) <= 1e-9);
    }
}
