//! Independent oracles for the benchmark systems and closed-form constants.

use nalgebra::{DMatrix, DVector};
use randcm_core::cocycle::{self, iterate, remainder, LinearSystem, Modulus, StationaryPoint};
use randcm_core::driver::{birkhoff_average, DriverKind, DrivingSystem, NoiseLaw};
use randcm_core::field::FiberVector;
use randcm_core::lp::{contraction_bound, radius, RadiusInputs};
use randcm_core::met::{lyapunov_spectrum, oseledets_split, SplitSettings, Subspace};
use randcm_core::systems::{build_benchmark, Params};

const DEG: usize = 8;

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; DEG + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= DEG {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// p(q(x)) truncated at degree DEG.
fn compose(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; DEG + 1];
    let mut pow = vec![0.0; DEG + 1];
    pow[0] = 1.0;
    for c in p {
        for k in 0..=DEG {
            out[k] += c * pow[k];
        }
        pow = mul(&pow, q);
    }
    out
}

/// Solve h(g(x)) = λ h(x) + x² order by order, where the center map is
/// g(x) = x + x·s(x) and `s` is the stable graph (or zero).
fn invariance_series(lambda: f64, s: Option<&[f64]>) -> Vec<f64> {
    let mut h = vec![0.0; DEG + 1];
    for k in 2..=DEG {
        // g depends on h itself when s is None (the 2D case g = x + x h)
        let own = h.clone();
        let graph = s.unwrap_or(&own);
        let mut g = mul(&[0.0, 1.0], graph);
        g[1] += 1.0;
        let lhs = compose(&h, &g);
        let resid = lhs[k] - lambda * h[k] - if k == 2 { 1.0 } else { 0.0 };
        h[k] = -resid / (1.0 - lambda);
    }
    h
}

#[test]
fn det2d_series_oracle_matches_catalog() {
    let y = invariance_series(0.5, None);
    assert!((y[2] - 2.0).abs() < 1e-12);
    assert!((y[4] + 16.0).abs() < 1e-12);
    assert!((y[6] - 368.0).abs() < 1e-9);
    assert!(y[3].abs() < 1e-15 && y[5].abs() < 1e-15);
    let b = build_benchmark("det-2d", &Params::new(), 1).unwrap();
    for (p, c) in &b.spec.oracle.series[0].terms {
        assert!((y[*p as usize] - c).abs() < 1e-9, "power {p}");
    }
}

#[test]
fn det3d_series_oracle_matches_catalog() {
    let y = invariance_series(0.5, None);
    let u = invariance_series(2.0, Some(&y));
    assert!((u[2] + 1.0).abs() < 1e-12);
    assert!((u[4] + 4.0).abs() < 1e-12);
    let b = build_benchmark("det-3d", &Params::new(), 1).unwrap();
    for s in &b.spec.oracle.series {
        let series = if s.coordinate == 0 { &u } else { &y };
        for (p, c) in &s.terms {
            assert!((series[*p as usize] - c).abs() < 1e-9);
        }
    }
}

#[test]
fn series_satisfies_invariance_numerically() {
    // plug the truncated series into the det-2d map at small x
    let y = invariance_series(0.5, None);
    let h = |x: f64| y.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum::<f64>();
    for x in [1e-2, -1e-2, 5e-3] {
        let xn = x + x * h(x);
        let yn = 0.5 * h(x) + x * x;
        assert!((h(xn) - yn).abs() < 1e-14, "x = {x}");
    }
}

/// Contraction constant by summing the geometric tails term by term.
fn l_by_summation(mu_p: f64, mu_m: f64, nu: f64, eps: f64, m: f64) -> f64 {
    let sum = |rate: f64, from: i32| (from..20_000).map(|k| (rate * k as f64).exp()).sum::<f64>();
    m * nu.exp() * (sum(eps - nu, 0) + sum(-mu_p + eps + nu, 1) + sum(mu_m + eps + nu, 0))
}

#[test]
fn contraction_bound_matches_summation() {
    let ln2 = std::f64::consts::LN_2;
    let oracle = l_by_summation(ln2, -ln2, 0.2, 0.05, 1.0);
    assert!((oracle - 14.37).abs() < 5e-3);
    let (l, lt) = contraction_bound(0.2, 0.05, ln2, -ln2, 1.0).unwrap();
    assert!((l - oracle).abs() < 1e-9);
    let center = (0..20_000).map(|k| ((0.05 - 0.2) * k as f64).exp()).sum::<f64>();
    assert!((lt - (oracle - 0.2f64.exp() * center)).abs() < 1e-9);
    let (l2, _) = contraction_bound(0.2, 0.05, ln2, -ln2, 0.00696).unwrap();
    assert!((5.0 * l2 - 0.5).abs() < 2e-3);
    assert_eq!(contraction_bound(0.2, 0.05, ln2, -ln2, 0.0).unwrap(), (0.0, 0.0));
}

#[test]
fn contraction_bound_rejects_infeasible() {
    let ln2 = std::f64::consts::LN_2;
    assert!(contraction_bound(0.2, 0.3, ln2, -ln2, 1.0).is_err());
    assert!(contraction_bound(0.6, 0.2, ln2, -ln2, 1.0).is_err());
    assert!(contraction_bound(0.2, 0.05, 0.1, -ln2, 1.0).is_err());
}

fn unit_inputs(m: f64, f: f64) -> RadiusInputs {
    RadiusInputs { m_eps: m, m_tilde: m, f, f_eps: [1.0; 4], f_c_nu: 1.0, proj: [1.0; 3], validity: f64::INFINITY }
}

#[test]
fn radius_plug_in() {
    let id = Modulus::new(cocycle::constant_scalar(1.0), 1.0).unwrap();
    let r = radius(&unit_inputs(0.00696, 1.0), &id).unwrap();
    assert!((r.t - 0.00696).abs() < 1e-15);
    assert!((r.t_tilde - 0.00174).abs() < 1e-15);
    assert!((r.rho - 4.35e-4).abs() < 1e-15);
    assert_eq!(r.rho, 0.25 * r.t.min(r.t_tilde));
    let r2 = radius(&unit_inputs(0.00696, 2.0), &id).unwrap();
    assert!((r2.rho - 0.5 * r.rho).abs() < 1e-18);
    assert!((r2.t - 0.5 * r.t).abs() < 1e-18);
}

#[test]
fn radius_uses_inverse_modulus_and_cap() {
    let sq = Modulus::new(cocycle::constant_scalar(1.0), 2.0).unwrap();
    let r = radius(&unit_inputs(0.00696, 1.0), &sq).unwrap();
    assert!((r.rho - 0.25 * 0.00174f64.sqrt()).abs() < 1e-15);
    let mut capped = unit_inputs(0.00696, 1.0);
    capped.validity = 1e-4;
    let id = Modulus::new(cocycle::constant_scalar(1.0), 1.0).unwrap();
    assert_eq!(radius(&capped, &id).unwrap().rho, 5e-5);
    assert!(radius(&unit_inputs(0.0, 1.0), &id).is_err());
}

#[test]
fn birkhoff_of_signs_is_small() {
    let d = DrivingSystem::new(DriverKind::IidSequence { laws: vec![NoiseLaw::Sign { scale: 1.0 }] }, 0).unwrap();
    let avg = birkhoff_average(|s| s[0], &d.realization(), 100_000).unwrap();
    assert!(avg.abs() < 0.02);
    // regression value from the reference run
    assert_eq!(avg, BIRKHOFF_SIGNS_SEED0);
}

const BIRKHOFF_SIGNS_SEED0: f64 = 0.00556;

#[test]
fn det2d_one_step_and_remainder() {
    let b = build_benchmark("det-2d", &Params::new(), 1).unwrap();
    let w = b.realization();
    let out = iterate(b.cocycle.as_ref(), &w, &FiberVector::from_slice(&[0.1, 0.0], 0), 1).unwrap();
    assert!((out.coords[0] - 0.1).abs() < 1e-17 && (out.coords[1] - 0.01).abs() < 1e-17);
    let psi = cocycle::linearize(b.cocycle.as_ref(), &b.stationary, &w).unwrap();
    assert_eq!(psi, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]));
    for (x, y) in [(0.3, -0.2), (1e-3, 1e-3), (-2.0, 0.5)] {
        let xi = DVector::from_column_slice(&[x, y]);
        let p = remainder(b.cocycle.as_ref(), &b.stationary, &psi, &w, &xi, f64::INFINITY).unwrap();
        assert!((p[0] - x * y).abs() < 1e-15 && (p[1] - x * x).abs() < 1e-15);
    }
    let xi = DVector::from_column_slice(&[1e-3, 1e-3]);
    let p = remainder(b.cocycle.as_ref(), &b.stationary, &psi, &w, &xi, f64::INFINITY).unwrap();
    assert!(p.norm() <= 2e-6);
}

#[test]
fn hand_jacobians() {
    let b = build_benchmark("det-3d", &Params::new(), 1).unwrap();
    let psi = cocycle::linearize(b.cocycle.as_ref(), &b.stationary, &b.realization()).unwrap();
    assert_eq!(psi, DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 1.0, 0.5])));
    // affine map x -> A x + b(omega) at its stationary point
    let a = DMatrix::from_row_slice(2, 2, &[0.3, 1.0, -0.2, 0.9]);
    let drv = DrivingSystem::new(DriverKind::IidSequence { laws: vec![NoiseLaw::Uniform { lo: -1.0, hi: 1.0 }] }, 3).unwrap();
    let affine = Affine { a: a.clone() };
    let y = StationaryPoint::new(|_| DVector::zeros(2), 0.0);
    let psi = cocycle::linearize(&affine, &y, &drv.realization()).unwrap();
    assert!((psi - a).norm() < 1e-9);
}

struct Affine {
    a: DMatrix<f64>,
}

impl cocycle::Cocycle for Affine {
    fn dim(&self, _: &randcm_core::driver::Realization) -> usize {
        2
    }
    fn step(&self, _: &randcm_core::driver::Realization, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + DVector::from_element(2, 0.25)
    }
}

#[test]
fn constant_diag_spectrum_is_exact() {
    let a = DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 1.0, 0.5]));
    let lin = LinearSystem::constant(a);
    let d = DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, 0).unwrap();
    let s = lyapunov_spectrum(&lin, &d.realization(), 3, 50, 0.05).unwrap();
    let ln2 = std::f64::consts::LN_2;
    assert_eq!(s.multiplicities, vec![1, 1, 1]);
    for (got, want) in s.exponents.iter().zip([ln2, 0.0, -ln2]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn delay_companion_spectrum() {
    let b = build_benchmark("delay-companion", &Params::new(), 42).unwrap();
    let s = lyapunov_spectrum(&b.linearization(), &b.realization(), 2, 10_000, 0.05).unwrap();
    assert!((s.exponents[0] - 0.0).abs() < 1e-3);
    assert!((s.exponents[1] - 0.5f64.ln()).abs() < 1e-3);
}

#[test]
fn random_diag_spectrum_against_birkhoff() {
    let b = build_benchmark("random-diag", &Params::new(), 42).unwrap();
    let w = b.realization();
    let n = 100_000;
    let s = lyapunov_spectrum(&b.linearization(), &w, 3, n, 0.05).unwrap();
    let mean_a = birkhoff_average(|x| x[0], &w, n).unwrap();
    let mean_c = birkhoff_average(|x| x[1], &w, n).unwrap();
    let se = 0.6 / 12f64.sqrt() / (n as f64).sqrt();
    assert!((s.exponents[0] - mean_a).abs() < 3.0 * se);
    assert!(s.exponents[1].abs() < 3.0 * se);
    assert!((s.exponents[2] - mean_c).abs() < 3.0 * se);
    // and the law means
    assert!((s.exponents[0] - 0.8).abs() < 3.0 * se);
    assert!((s.exponents[2] + 0.8).abs() < 3.0 * se);
}

fn constant_split(a: DMatrix<f64>) -> randcm_core::met::OseledetsSplitting {
    let d = a.ncols();
    let lin = LinearSystem::constant(a);
    let drv = DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, 0).unwrap();
    let w = drv.realization();
    let s = lyapunov_spectrum(&lin, &w, d, 200, 0.05).unwrap();
    oseledets_split(&lin, &w, &s, &SplitSettings { half_width: 10, forward_margin: 10, ..Default::default() }).unwrap()
}

fn spans(basis: &DMatrix<f64>, dir: &[f64]) -> bool {
    let v = DVector::from_column_slice(dir).normalize();
    (&v - basis * (basis.transpose() * &v)).norm() < 1e-9
}

#[test]
fn triangular_splitting_by_hand() {
    let sp = constant_split(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]));
    for n in [-10, 0, 10] {
        assert!(spans(sp.basis(Subspace::Unstable, n).unwrap(), &[1.0, 0.0]));
        assert!(spans(sp.basis(Subspace::Center, n).unwrap(), &[1.0, -1.0]));
        assert_eq!(sp.basis(Subspace::Stable, n).unwrap().ncols(), 0);
    }
}

#[test]
fn oblique_projection_by_hand() {
    // eigenvalue 1 on (1, 0), eigenvalue 1/2 on (1, 1)
    let sp = constant_split(DMatrix::from_row_slice(2, 2, &[1.0, -0.5, 0.0, 0.5]));
    let v = DVector::from_column_slice(&[0.0, 1.0]);
    let pc = sp.project(Subspace::Center, 0, &v).unwrap();
    assert!((pc - DVector::from_column_slice(&[-1.0, 0.0])).norm() < 1e-12);
}

#[test]
fn diagonal_growth_constants() {
    let sp = constant_split(DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 1.0, 0.5])));
    let g = sp.growth_constants(0.05, 5, 1.0, -5, 5).unwrap();
    for m in -5..=5 {
        assert!((g.f_s(m).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.f_c_fwd(m).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.f_c_bwd(m).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.f_u(m).unwrap() - 1.0).abs() < 1e-12);
    }
    let x = sp.restricted_inverse(0, 3, &DVector::from_column_slice(&[1.0, 0.0, 0.0])).unwrap();
    assert!((x - DVector::from_column_slice(&[0.125, 0.0, 0.0])).norm() < 1e-15);
    let e2 = DVector::from_column_slice(&[0.0, 1.0, 0.0]);
    assert!((sp.restricted_inverse(5, 7, &e2).unwrap() - &e2).norm() < 1e-15);
}
