//! End-to-end checks on the benchmark systems.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use randcm_core::cocycle::{self, constant_scalar, Cocycle, LinearCocycle, LinearSystem, Modulus, StationaryPoint};
use randcm_core::driver::{DriverKind, DrivingSystem, Realization};
use randcm_core::lp::{self, weighted_norm, LpConfig, LpProblem, SequenceWindow};
use randcm_core::manifold::{
    chart, default_grid_radius, modified_step, sample_manifold, taylor_fit, verify_chart_regularity, verify_invariance,
    GridSpec,
};
use randcm_core::met::{lyapunov_spectrum, oseledets_split, SplitSettings, Subspace};
use randcm_core::systems::{build_benchmark, Params, Prepared, CATALOG};
use randcm_core::Error;

fn prepare(name: &str, lp: LpConfig) -> Prepared {
    let b = build_benchmark(name, &Params::new(), 42).unwrap();
    b.prepare(2_000, 0.05, &SplitSettings::default(), lp).unwrap()
}

fn wide() -> LpConfig {
    LpConfig { cutoff_override: Some(0.05), ..Default::default() }
}

fn e1(d: usize, x: f64) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[0] = x;
    v
}

/// LP problem for a constant linear map (remainder identically zero).
fn linear_problem(a: DMatrix<f64>, cfg: LpConfig) -> LpProblem {
    let d = a.ncols();
    let lin = Arc::new(LinearSystem::constant(a));
    let drv = DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, 0).unwrap();
    let w = drv.realization();
    let s = lyapunov_spectrum(lin.as_ref(), &w, d, 200, 0.05).unwrap();
    let settings = SplitSettings { forward_margin: cfg.n_f, ..Default::default() };
    let split = oseledets_split(lin.as_ref(), &w, &s, &settings).unwrap();
    let modulus = Modulus::new(constant_scalar(1.0), 1.0).unwrap();
    LpProblem::new(lin, StationaryPoint::zero(d), w, split, modulus, constant_scalar(f64::INFINITY), cfg).unwrap()
}

fn diag3() -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 1.0, 0.5]))
}

#[test]
fn weighted_norm_examples() {
    let nu = 0.2;
    assert_eq!(weighted_norm(&SequenceWindow::zeros(0, -5, 5, nu, 2)), 0.0);
    let unit = SequenceWindow::from_fn(0, -5, 5, nu, |n| e1(2, if n == 0 { 1.0 } else { 0.0 }));
    assert_eq!(weighted_norm(&unit), 1.0);
    let grow = SequenceWindow::from_fn(0, -5, 5, nu, |n| e1(2, (nu * n.abs() as f64 / 2.0).exp()));
    assert!((weighted_norm(&grow) - 1.0).abs() < 1e-15);
}

#[test]
fn shift_window_moves_entries() {
    let g = SequenceWindow::from_fn(3, -6, 6, 0.2, |n| e1(2, n as f64));
    let s = lp::shift_window(&g);
    assert_eq!((s.base, s.lo, s.hi), (4, -7, 5));
    assert_eq!(s.entry(3).unwrap(), g.entry(4).unwrap());
    assert!(s.entry(6).is_none());
    let z = lp::shift_window(&SequenceWindow::zeros(0, -3, 3, 0.2, 2));
    assert_eq!(weighted_norm(&z), 0.0);
}

#[test]
fn linear_system_operator_and_solver() {
    let p = linear_problem(diag3(), LpConfig::default());
    let v = DVector::from_column_slice(&[0.0, 0.3, 0.0]);
    let anything = SequenceWindow::from_fn(0, -40, 40, 0.2, |n| DVector::from_element(3, (n as f64).sin()));
    let out = p.apply_i(&v, &anything).unwrap();
    for n in -40..=40 {
        assert!((out.entry(n).unwrap() - &v).norm() < 1e-15);
    }
    let fp = p.solve_fixed_point(0, &v).unwrap();
    assert_eq!(fp.iterations, 1);
    assert!(fp.apriori_ok);
    assert!((p.recover_center(&fp.gamma).unwrap() - &v).norm() < 1e-15);
    let zero = p.solve_fixed_point(0, &DVector::zeros(3)).unwrap();
    assert_eq!(zero.iterations, 0);
    assert_eq!(weighted_norm(&zero.gamma), 0.0);
}

#[test]
fn linear_chart_is_identity() {
    let p = linear_problem(diag3(), LpConfig::default());
    let c = sample_manifold(&p, 0, &GridSpec { radius: 0.01, points: 9 }).unwrap();
    let r = verify_chart_regularity(&p, &c).unwrap();
    assert!((r.lipschitz - 1.0).abs() < 1e-12);
    assert!(r.tangency_order.is_infinite());
    let fit = taylor_fit(&c, 4).unwrap();
    assert!(fit.coefficients.iter().flatten().all(|x| x.abs() < 1e-10));
    let single = sample_manifold(&p, 0, &GridSpec { radius: 0.01, points: 1 }).unwrap();
    assert_eq!(single.points.len(), 1);
    assert_eq!(single.points[0].value.norm(), 0.0);
}

#[test]
fn operator_rejects_off_center_vector() {
    let p = linear_problem(diag3(), LpConfig::default());
    let v = DVector::from_column_slice(&[0.1, 0.3, 0.0]);
    assert!(matches!(p.solve_fixed_point(0, &v), Err(Error::NotInCenter(_))));
    let w = p.zero_window(0).unwrap();
    let too_wide = SequenceWindow::zeros(0, -500, 500, 0.2, 3);
    assert!(p.apply_i(&DVector::zeros(3), &too_wide).is_err());
    assert!(w.same_shape(&p.zero_window(0).unwrap()));
}

#[test]
fn det2d_two_picard_steps_by_hand() {
    let p = prepare("det-2d", wide()).problem;
    let v = e1(2, 0.01);
    let zero = p.zero_window(0).unwrap();
    assert_eq!(weighted_norm(&p.apply_i(&DVector::zeros(2), &zero).unwrap()), 0.0);
    let g1 = p.apply_i(&v, &zero).unwrap();
    assert!((g1.entry(0).unwrap() - &v).norm() < 1e-16);
    assert!(g1.entries.iter().all(|e| (e - &v).norm() < 1e-16));
    // every forcing term is P(0.01, 0) = (0, 1e-4); the stable sum at 0 is
    // 1e-4 · Σ_{k=0}^{N-1} 2^{-k} over the truncated window
    let g2 = p.apply_i(&v, &g1).unwrap();
    let e = g2.entry(0).unwrap();
    let expect = 1e-4 * (0..40).map(|k| 0.5f64.powi(k)).sum::<f64>();
    assert!((e[0] - 0.01).abs() < 1e-16);
    assert!((e[1] - expect).abs() < 1e-17);
}

#[test]
fn det2d_solver_contracts_and_round_trips() {
    for cfg in [LpConfig::default(), wide()] {
        let p = prepare("det-2d", cfg).problem;
        let rho = p.rho(0).unwrap().min(p.rho(1).unwrap());
        for x in [0.01, 0.5 * rho] {
            let v = e1(2, x);
            let fp = p.solve_fixed_point(0, &v).unwrap();
            assert!(fp.residual < 1e-12 && fp.iterations <= 60);
            assert!(fp.apriori_ok);
            if p.config().cutoff_override.is_none() {
                assert!(fp.contraction_ratio <= 5.0 * p.certificate().l_eps);
            }
            let back = p.recover_center(&fp.gamma).unwrap();
            assert!((back - &v).norm() < 1e-10);
        }
    }
}

#[test]
fn certificate_auto_constants() {
    let p = prepare("det-2d", LpConfig::default()).problem;
    let c = p.certificate();
    assert!(c.holds());
    assert!((5.0 * c.l_eps - 0.5).abs() < 1e-12);
    assert!((5.0 * c.l_tilde - 1.0).abs() < 1e-12);
    assert!((c.eps - 0.05).abs() < 1e-12);
}

#[test]
fn truncation_decay() {
    let b = build_benchmark("det-2d", &Params::new(), 42).unwrap();
    let v = e1(2, 0.01);
    let mut pi0 = Vec::new();
    for n in [20usize, 40] {
        let cfg = LpConfig { half_width: n, ..wide() };
        let p = b.prepare(2_000, 0.05, &SplitSettings::default(), cfg).unwrap().problem;
        pi0.push(chart(&p, 0, &v).unwrap());
    }
    let ln2 = std::f64::consts::LN_2;
    let bound = (-(ln2 - 0.2) * 20.0 / 2.0).exp() * v.norm();
    assert!((&pi0[0] - &pi0[1]).norm() < bound);
}

#[test]
fn modified_step_matches_original_near_y() {
    let p = prepare("det-2d", LpConfig::default()).problem;
    let w = p.omega().clone();
    let rho = p.rho(1).unwrap();
    let y0 = p.y(0).unwrap().clone();
    assert!((modified_step(&p, 0, &y0).unwrap() - p.y(1).unwrap()).norm() == 0.0);
    let near = &y0 + e1(2, 0.5 * rho);
    let orig = p.cocycle().step(&w, &near);
    assert!((modified_step(&p, 0, &near).unwrap() - orig).norm() < 1e-18);
    let far = &y0 + e1(2, 3.0 * rho) + DVector::from_column_slice(&[0.0, rho]);
    let lin = p.y(1).unwrap() + p.splitting().psi(0).unwrap() * (&far - &y0);
    assert_eq!(modified_step(&p, 0, &far).unwrap(), lin);
}

#[test]
fn symmetric_grid_gives_even_second_coordinate() {
    let p = prepare("det-2d", wide()).problem;
    let c = sample_manifold(&p, 0, &GridSpec { radius: 0.02, points: 21 }).unwrap();
    assert!(c.failures.is_empty() && c.points.len() == 21);
    for pt in &c.points {
        assert!(pt.fixed.residual < 1e-12);
    }
    for i in 0..10 {
        let (a, b) = (&c.points[i], &c.points[20 - i]);
        assert_eq!(a.coords[0], -b.coords[0]);
        assert!((a.value[1] - b.value[1]).abs() < 1e-10);
    }
}

fn oracle_fit(name: &str) -> randcm_core::manifold::TaylorFit {
    let p = prepare(name, wide()).problem;
    let chart = sample_manifold(&p, 0, &GridSpec { radius: 0.02, points: 21 }).unwrap();
    assert!(chart.failures.is_empty());
    taylor_fit(&chart, 6).unwrap()
}

#[test]
fn det2d_chart_matches_series() {
    let fit = oracle_fit("det-2d");
    let y = &fit.coefficients[1];
    assert!((y[2] - 2.0).abs() < 1e-2, "quadratic {}", y[2]);
    assert!((y[4] + 16.0).abs() < 2.0, "quartic {}", y[4]);
    assert!(fit.coefficients[0].iter().all(|c| c.abs() < 1e-6));
}

#[test]
fn det3d_chart_matches_series() {
    let fit = oracle_fit("det-3d");
    assert!((fit.coefficients[0][2] + 1.0).abs() < 1e-2);
    assert!((fit.coefficients[2][2] - 2.0).abs() < 1e-2);
}

#[test]
fn taylor_fit_rejects_bad_grids() {
    let p = prepare("det-2d", wide()).problem;
    let c = sample_manifold(&p, 0, &GridSpec { radius: 0.02, points: 5 }).unwrap();
    assert!(matches!(taylor_fit(&c, 5), Err(Error::FitFailure(_))));
    let mut lopsided = c.clone();
    lopsided.points.pop();
    assert!(taylor_fit(&lopsided, 2).is_err());
    let p3 = linear_problem(diag3(), LpConfig::default());
    let c3 = sample_manifold(&p3, 0, &GridSpec { radius: 0.01, points: 3 }).unwrap();
    assert!(taylor_fit(&c3, 1).is_ok());
}

#[test]
fn invariance_on_deterministic_benchmarks() {
    for name in ["det-2d", "det-3d"] {
        let p = prepare(name, LpConfig::default()).problem;
        let r = default_grid_radius(&p, 0).unwrap();
        let c = sample_manifold(&p, 0, &GridSpec { radius: r, points: 11 }).unwrap();
        for steps in [1, 5] {
            let rep = verify_invariance(&p, &c, steps, 1e-6).unwrap();
            assert!(rep.passed, "{name} n={steps}: {rep:?}");
            assert_eq!(rep.out_of_domain, 0);
            assert!(rep.transport_residual < 10.0 * p.config().tolerance);
            assert_eq!(rep.passed, rep.recompute_pass());
        }
        let reg = verify_chart_regularity(&p, &c).unwrap();
        assert!(reg.passed, "{name}: {reg:?}");
    }
}

#[test]
fn far_points_are_out_of_domain() {
    let p = prepare("det-2d", LpConfig::default()).problem;
    let r = 4.0 * p.rho(1).unwrap();
    let c = sample_manifold(&p, 0, &GridSpec { radius: r, points: 5 }).unwrap();
    let rep = verify_invariance(&p, &c, 1, 1e-6).unwrap();
    assert!(rep.out_of_domain >= 2);
    assert_eq!(rep.in_domain + rep.out_of_domain, 5);
    assert!(rep.distances[2].unwrap() == 0.0);
}

#[test]
fn det2d_tangency_is_quadratic() {
    let p = prepare("det-2d", LpConfig::default()).problem;
    let c = sample_manifold(&p, 0, &GridSpec { radius: default_grid_radius(&p, 0).unwrap(), points: 9 }).unwrap();
    let reg = verify_chart_regularity(&p, &c).unwrap();
    assert!((reg.tangency_order - 1.0).abs() < 0.05);
    for (s, t) in &reg.ladder {
        assert!((t / s - 2.0).abs() < 0.1);
    }
    assert!(reg.inverse_lipschitz <= 2.0 + 1e-6);
}

#[test]
fn every_benchmark_prepares_and_solves() {
    for name in CATALOG {
        let p = prepare(name, LpConfig::default()).problem;
        let (lo, hi) = p.base_range();
        assert!(lo <= 0 && hi >= 1, "{name}");
        let r = default_grid_radius(&p, 0).unwrap();
        assert!(r > 0.0);
        let c = sample_manifold(&p, 0, &GridSpec { radius: r, points: 5 }).unwrap();
        assert!(c.failures.is_empty(), "{name}");
        for pt in &c.points {
            assert!(pt.fixed.residual < 1e-12 && pt.fixed.apriori_ok);
            let back = p.recover_center(&pt.fixed.gamma).unwrap();
            assert!((back - &pt.v).norm() < 1e-10);
        }
    }
}

#[test]
fn growth_constants_monotone_in_eps() {
    let p = prepare("random-diag", LpConfig::default()).problem;
    let s = p.splitting();
    let a = s.growth_constants(0.05, 30, 1.0, 0, 20).unwrap();
    let b = s.growth_constants(0.1, 30, 1.0, 0, 20).unwrap();
    for m in 0..=20 {
        assert!(b.f_s(m).unwrap() <= a.f_s(m).unwrap());
        assert!(b.f_u(m).unwrap() <= a.f_u(m).unwrap());
        assert!(b.f_c_fwd(m).unwrap() <= a.f_c_fwd(m).unwrap());
        assert!(b.f_c_bwd(m).unwrap() <= a.f_c_bwd(m).unwrap());
    }
}

#[test]
fn backward_unstable_decay_rate() {
    let b = build_benchmark("random-diag", &Params::new(), 42).unwrap();
    let w = b.realization();
    let lin = b.linearization();
    let spec = lyapunov_spectrum(&lin, &w, 3, 20_000, 0.05).unwrap();
    let settings = SplitSettings { half_width: 1_000, ..Default::default() };
    let split = oseledets_split(&lin, &w, &spec, &settings).unwrap();
    let u = split.basis(Subspace::Unstable, 1_000).unwrap().column(0).into_owned();
    // e^{-800} underflows, so chain 100-step pulls and renormalize
    let (mut x, mut log) = (u, 0.0);
    for k in 0..10 {
        x = split.restricted_inverse(1_000 - 100 * k, 100, &x).unwrap();
        log += x.norm().ln();
        x = x.normalize();
    }
    let rate = log / 1_000.0;
    assert!((rate + spec.mu_plus()).abs() < 0.1);
}

#[test]
fn exponent_consistency_from_random_vector() {
    for name in CATALOG {
        let b = build_benchmark(name, &Params::new(), 7).unwrap();
        let w = b.realization();
        let lin = b.linearization();
        let d = b.spec.fiber.dim();
        let spec = lyapunov_spectrum(&lin, &w, d, 10_000, 0.05).unwrap();
        let mut v = DVector::from_fn(d, |i, _| 0.3 + 0.17 * i as f64).normalize();
        let mut log = 0.0;
        for n in 0..10_000 {
            v = lin.matrix(&w.shift(n)).unwrap() * v;
            let r = v.norm();
            log += r.ln();
            v /= r;
        }
        assert!((log / 1e4 - spec.exponents[0]).abs() < 5e-2, "{name}");
    }
}

#[test]
fn wrong_differential_fails_linearization() {
    struct Lying;
    impl Cocycle for Lying {
        fn dim(&self, _: &Realization) -> usize {
            2
        }
        fn step(&self, _: &Realization, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_column_slice(&[x[0] + x[0] * x[1], 0.5 * x[1]])
        }
        fn differential(&self, _: &Realization, _: &DVector<f64>) -> Option<DMatrix<f64>> {
            Some(DMatrix::identity(2, 2))
        }
    }
    let w = DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, 0).unwrap().realization();
    let r = cocycle::linearize(&Lying, &StationaryPoint::zero(2), &w);
    assert!(matches!(r, Err(Error::LinearizationFailure(_))));
}

#[test]
fn no_center_exponent_is_reported() {
    let lin = LinearSystem::constant(DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 0.5])));
    let w = DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, 0).unwrap().realization();
    let s = lyapunov_spectrum(&lin, &w, 2, 100, 0.05).unwrap();
    assert_eq!(s.zero_index(), None);
    assert!(matches!(oseledets_split(&lin, &w, &s, &SplitSettings::default()), Err(Error::NoCenterExponent)));
}

#[test]
fn catalog_errors() {
    assert!(build_benchmark("nope", &Params::new(), 0).is_err());
    let mut p = Params::new();
    p.insert("sigmaa".into(), 1.0);
    assert!(build_benchmark("additive-noise", &p, 0).is_err());
    p.clear();
    p.insert("sigma".into(), 0.25);
    assert!(build_benchmark("additive-noise", &p, 0).is_ok());
}
