//! Command implementations. Each returns its artifacts in memory; the caller
//! writes them.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use randcm_core::driver::DriverKind;
use randcm_core::lp::{self, Certificate, ContractionProbe, LpConfig, LpProblem, RadiusTerms};
use randcm_core::manifold::{
    self, assemble_chart, center_vector, CenterChart, GridSpec, InvarianceReport, RegularityReport, TaylorFit,
};
use randcm_core::met::{lyapunov_spectrum, oseledets_split, LyapunovSpectrum, OseledetsSplitting, SplitSettings, Subspace};
use randcm_core::systems::{build_benchmark, Benchmark, CATALOG};
use randcm_core::Error;

use crate::config::{ConfigError, RunConfig};
use crate::export::{json, num, Csv};

/// Recovery error allowed between v and Π_C h(v).
pub const RECOVERY_TOL: f64 = 1e-10;
/// Slope allowed for log‖Π‖ against the orbit index.
pub const SLOPE_TOL: f64 = 1e-2;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(Error),
    Verification(String),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(Error::ParametersInfeasible(_)) => 2,
            RunError::Numerical(_) => 3,
            RunError::Verification(_) => 4,
            RunError::Io(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Numerical(e) => write!(f, "{}: {e}", e.name()),
            RunError::Verification(s) => write!(f, "verification failed: {s}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn artifact(name: &str, bytes: Vec<u8>) -> Artifact {
    Artifact { name: name.to_string(), bytes }
}

pub fn benchmark(cfg: &RunConfig) -> Result<Benchmark, RunError> {
    Ok(build_benchmark(&cfg.system, &cfg.params, cfg.seed)?)
}

pub fn split_settings(cfg: &RunConfig) -> SplitSettings {
    SplitSettings {
        half_width: cfg.met.orbit_half_width,
        forward_margin: SplitSettings::default().forward_margin.max(cfg.met.growth_horizon),
        seed: cfg.seed,
        ..SplitSettings::default()
    }
}

pub fn lp_config(cfg: &RunConfig) -> LpConfig {
    LpConfig {
        nu: cfg.lp.nu,
        eps: cfg.lp.epsilon,
        half_width: cfg.lp.half_width,
        tolerance: cfg.lp.tolerance,
        max_iterations: cfg.lp.max_iterations,
        m_eps: None,
        m_tilde: None,
        n_f: cfg.met.growth_horizon,
        safety: cfg.met.safety_factor,
        cutoff_override: cfg.lp.cutoff_radius,
    }
}

fn full_spectrum(b: &Benchmark, cfg: &RunConfig) -> Result<LyapunovSpectrum, RunError> {
    let d = b.spec.fiber.dim();
    if let Some(k) = cfg.met.k {
        if k != d {
            return Err(RunError::Config(ConfigError {
                line: 0,
                message: format!("met.k = {k}: splitting needs the full spectrum (k = {d})"),
            }));
        }
    }
    Ok(lyapunov_spectrum(&b.linearization(), &b.realization(), d, cfg.met.steps, cfg.met.gap_threshold)?)
}

pub fn prepare(cfg: &RunConfig) -> Result<(Benchmark, LyapunovSpectrum, LpProblem), RunError> {
    let b = benchmark(cfg)?;
    let spectrum = full_spectrum(&b, cfg)?;
    let p = b.prepare(cfg.met.steps, cfg.met.gap_threshold, &split_settings(cfg), lp_config(cfg))?;
    // prepare recomputes the spectrum; both runs are deterministic
    debug_assert_eq!(p.spectrum, spectrum);
    Ok((b, spectrum, p.problem))
}

pub fn catalog() -> Result<String, RunError> {
    let mut out = String::new();
    for name in CATALOG {
        let b = build_benchmark(name, &Default::default(), 0)?;
        out.push_str(&format!("{name:<16} {}\n", b.spec.description));
    }
    Ok(out)
}

// ---------------------------------------------------------------- spectrum

pub fn spectrum(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let b = benchmark(cfg)?;
    let d = b.spec.fiber.dim();
    let k = cfg.met.k.unwrap_or(d);
    if k > d {
        return Err(RunError::Config(ConfigError { line: 0, message: format!("met.k = {k} exceeds fiber dimension {d}") }));
    }
    let s = lyapunov_spectrum(&b.linearization(), &b.realization(), k, cfg.met.steps, cfg.met.gap_threshold)?;
    let mut clustered = Csv::new(["index", "exponent", "multiplicity"]);
    for (i, (mu, m)) in s.exponents.iter().zip(&s.multiplicities).enumerate() {
        clustered.row([i.to_string(), num(*mu), m.to_string()]);
    }
    let mut raw = Csv::new(["index", "exponent"]);
    for (i, mu) in s.raw.iter().enumerate() {
        raw.row([i.to_string(), num(*mu)]);
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        system: &'a str,
        seed: u64,
        spectrum: &'a LyapunovSpectrum,
        zero_index: Option<usize>,
        oracle_exponents: &'a [f64],
    }
    let summary = Summary {
        system: &cfg.system,
        seed: cfg.seed,
        spectrum: &s,
        zero_index: s.zero_index(),
        oracle_exponents: &b.spec.oracle.exponents,
    };
    Ok(vec![
        artifact("spectrum.csv", clustered.finish()),
        artifact("spectrum_raw.csv", raw.finish()),
        artifact("spectrum.json", json(&summary)),
    ])
}

// ---------------------------------------------------------------- split

#[derive(Clone, Debug, Serialize)]
pub struct SplitSummary {
    pub window: (i64, i64),
    pub dims: [usize; 3],
    pub horizons: (usize, usize),
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// Max sine of the principal angle between ψX_m and X_{m+1} for U, C, S, U⊕C.
    pub max_angles: [f64; 4],
    pub angle_tolerance: f64,
    /// Least-squares slopes of log‖Π‖ against the orbit index (U, C, S).
    pub projection_slopes: [f64; 3],
    pub slope_tolerance: f64,
    pub equivariance_ok: bool,
    pub slopes_ok: bool,
}

/// Constant drivers get the tight angle tolerance.
pub fn angle_tolerance(b: &Benchmark) -> f64 {
    match b.driver.kind() {
        DriverKind::DeterministicPoint { .. } => 1e-6,
        _ => 1e-3,
    }
}

pub fn split_summary(b: &Benchmark, s: &OseledetsSplitting) -> SplitSummary {
    let mut max_angles = [0.0f64; 4];
    for (_, a) in s.equivariance_angles() {
        for i in 0..4 {
            max_angles[i] = max_angles[i].max(a[i]);
        }
    }
    let (k_u, k_c) = s.dims();
    let d = s.frames(0).map(|f| f.proj_u.nrows()).unwrap_or(0);
    let slopes = s.projection_slopes();
    let tol = angle_tolerance(b);
    SplitSummary {
        window: s.window(),
        dims: [k_u, k_c, d - k_u - k_c],
        horizons: s.horizons(),
        mu_plus: s.mu_plus(),
        mu_minus: s.mu_minus(),
        max_angles,
        angle_tolerance: tol,
        projection_slopes: slopes,
        slope_tolerance: SLOPE_TOL,
        equivariance_ok: max_angles.iter().all(|a| *a < tol),
        slopes_ok: slopes.iter().all(|x| x.abs() < SLOPE_TOL),
    }
}

pub fn split(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let b = benchmark(cfg)?;
    let spectrum = full_spectrum(&b, cfg)?;
    let s = oseledets_split(&b.linearization(), &b.realization(), &spectrum, &split_settings(cfg))?;
    let d = spectrum.dim;
    let (lo, hi) = s.window();

    let mut header = vec!["n".to_string(), "subspace".into(), "column".into()];
    header.extend((0..d).map(|i| format!("x{i}")));
    let mut bases = Csv::new(header);
    let mut norms = Csv::new(["n", "norm_pu", "norm_pc", "norm_ps"]);
    for n in lo..=hi {
        for (name, sub) in [("U", Subspace::Unstable), ("C", Subspace::Center), ("S", Subspace::Stable)] {
            let m = s.basis(sub, n)?;
            for j in 0..m.ncols() {
                let mut row = vec![n.to_string(), name.to_string(), j.to_string()];
                row.extend(m.column(j).iter().map(|x| num(*x)));
                bases.row(row);
            }
        }
    }
    for (n, [u, c, st]) in s.projection_norms() {
        norms.row([n.to_string(), num(u), num(c), num(st)]);
    }
    let mut angles = Csv::new(["n", "sin_u", "sin_c", "sin_s", "sin_uc"]);
    for (n, a) in s.equivariance_angles() {
        angles.row([n.to_string(), num(a[0]), num(a[1]), num(a[2]), num(a[3])]);
    }
    let summary = split_summary(&b, &s);
    Ok(vec![
        artifact("split_bases.csv", bases.finish()),
        artifact("split_projection_norms.csv", norms.finish()),
        artifact("split_equivariance.csv", angles.finish()),
        artifact("split.json", json(&summary)),
    ])
}

// ---------------------------------------------------------------- manifold

pub fn grid(cfg: &RunConfig, p: &LpProblem, base: i64) -> Result<GridSpec, RunError> {
    let radius = match cfg.grid.radius {
        Some(r) => r,
        None => manifold::default_grid_radius(p, base)?,
    };
    Ok(GridSpec { radius, points: cfg.grid.points })
}

/// Chart on the configured grid at `base`, solving grid points in parallel.
pub fn chart(p: &LpProblem, base: i64, grid: &GridSpec) -> Result<CenterChart, RunError> {
    let (_, k_c) = p.splitting().dims();
    let inputs = grid
        .coords(k_c)
        .into_iter()
        .map(|c| center_vector(p, base, &c).map(|v| (c, v)))
        .collect::<Result<Vec<_>, _>>()?;
    let results = inputs
        .into_par_iter()
        .map(|(c, v)| {
            let r = p.solve_fixed_point(base, &v);
            (c, v, r)
        })
        .collect();
    Ok(assemble_chart(base, grid.radius, results))
}

#[derive(Clone, Debug, Serialize)]
pub struct PointDiagnostics {
    pub coords: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub contraction_ratio: f64,
    pub norm: f64,
    pub apriori_bound: f64,
    pub apriori_ok: bool,
    pub recovery_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailedPoint {
    pub coords: Vec<f64>,
    pub error: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverReport {
    pub base: i64,
    pub certificate: Certificate,
    /// Certified terms at the base (also reported when a cutoff override is active).
    pub certified: RadiusTerms,
    pub cutoff_override: Option<f64>,
    pub rho_base: f64,
    pub rho_next: f64,
    pub grid_radius: f64,
    pub grid_points: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub max_iterations_used: usize,
    pub max_contraction_ratio: f64,
    pub max_recovery_error: f64,
    pub all_apriori_ok: bool,
    pub points: Vec<PointDiagnostics>,
    pub failures: Vec<FailedPoint>,
    pub fit: Option<TaylorFit>,
}

pub fn solver_report(p: &LpProblem, chart: &CenterChart) -> Result<SolverReport, RunError> {
    let b = chart.base;
    let mut points = Vec::with_capacity(chart.points.len());
    for pt in &chart.points {
        let back = p.recover_center(&pt.fixed.gamma)?;
        points.push(PointDiagnostics {
            coords: pt.coords.clone(),
            iterations: pt.fixed.iterations,
            residual: pt.fixed.residual,
            contraction_ratio: pt.fixed.contraction_ratio,
            norm: pt.fixed.norm,
            apriori_bound: pt.fixed.apriori_bound,
            apriori_ok: pt.fixed.apriori_ok,
            recovery_error: (back - &pt.v).norm(),
        });
    }
    let failures = chart
        .failures
        .iter()
        .map(|(c, e)| FailedPoint { coords: c.clone(), error: e.name().into(), message: e.to_string() })
        .collect();
    let (_, k_c) = p.splitting().dims();
    let fit = if k_c == 1 && chart.points.len() >= 3 {
        manifold::taylor_fit(chart, 6.min(chart.points.len() - 1)).ok()
    } else {
        None
    };
    Ok(SolverReport {
        base: b,
        certificate: *p.certificate(),
        certified: p.certified_radius(b)?,
        cutoff_override: p.config().cutoff_override,
        rho_base: p.rho(b)?,
        rho_next: p.rho(b + 1)?,
        grid_radius: chart.radius,
        grid_points: chart.points.len() + chart.failures.len(),
        tolerance: p.config().tolerance,
        max_residual: points.iter().map(|x| x.residual).fold(0.0, f64::max),
        max_iterations_used: points.iter().map(|x| x.iterations).max().unwrap_or(0),
        max_contraction_ratio: points.iter().map(|x| x.contraction_ratio).fold(0.0, f64::max),
        max_recovery_error: points.iter().map(|x| x.recovery_error).fold(0.0, f64::max),
        all_apriori_ok: points.iter().all(|x| x.apriori_ok),
        points,
        failures,
        fit,
    })
}

pub fn chart_csv(chart: &CenterChart) -> Vec<u8> {
    let k_c = chart.points.first().map_or(0, |p| p.coords.len());
    let d = chart.points.first().map_or(0, |p| p.value.len());
    let mut header = vec!["point".to_string()];
    header.extend((0..k_c).map(|i| format!("c{i}")));
    header.extend((0..d).map(|i| format!("v{i}")));
    header.extend((0..d).map(|i| format!("h{i}")));
    header.extend(["residual".to_string(), "iterations".into()]);
    let mut out = Csv::new(header);
    for (i, pt) in chart.points.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(pt.coords.iter().map(|x| num(*x)));
        row.extend(pt.v.iter().map(|x| num(*x)));
        row.extend(pt.value.iter().map(|x| num(*x)));
        row.extend([num(pt.fixed.residual), pt.fixed.iterations.to_string()]);
        out.row(row);
    }
    out.finish()
}

pub fn manifold(cfg: &RunConfig) -> Result<Vec<Artifact>, RunError> {
    let (_, _, p) = prepare(cfg)?;
    let g = grid(cfg, &p, 0)?;
    let c = chart(&p, 0, &g)?;
    let report = solver_report(&p, &c)?;
    Ok(vec![artifact("chart.csv", chart_csv(&c)), artifact("solver.json", json(&report))])
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub check: &'static str,
    pub passed: bool,
    /// "<=", ">=" or "holds" (boolean checks carry no numbers).
    pub relation: &'static str,
    pub observed: Option<f64>,
    pub bound: Option<f64>,
}

fn at_most(check: &'static str, observed: f64, bound: f64) -> Verdict {
    Verdict { check, passed: observed <= bound, relation: "<=", observed: Some(observed), bound: Some(bound) }
}

fn at_least(check: &'static str, observed: f64, bound: f64) -> Verdict {
    Verdict { check, passed: observed >= bound, relation: ">=", observed: Some(observed), bound: Some(bound) }
}

fn holds(check: &'static str, ok: bool) -> Verdict {
    Verdict { check, passed: ok, relation: "holds", observed: None, bound: None }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub system: String,
    pub seed: u64,
    pub spectrum: LyapunovSpectrum,
    pub splitting: SplitSummary,
    pub contraction: ContractionProbe,
    pub solver: SolverReport,
    pub invariance_one_step: InvarianceReport,
    pub invariance_multi_step: InvarianceReport,
    pub regularity: RegularityReport,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

pub fn verification(cfg: &RunConfig) -> Result<VerificationReport, RunError> {
    let (b, spectrum, p) = prepare(cfg)?;
    let splitting = split_summary(&b, p.splitting());
    let contraction = lp::contraction_probe(&p, 0, cfg.verify.pairs, cfg.seed)?;
    let g = grid(cfg, &p, 0)?;
    let c = chart(&p, 0, &g)?;
    let solver = solver_report(&p, &c)?;
    let inv1 = manifold::verify_invariance(&p, &c, 1, cfg.verify.tolerance)?;
    let invn = manifold::verify_invariance(&p, &c, cfg.verify.steps, cfg.verify.tolerance)?;
    let regularity = manifold::verify_chart_regularity(&p, &c)?;

    let verdicts = vec![
        at_most("equivariance", splitting.max_angles.iter().fold(0.0, |a: f64, b| a.max(*b)), splitting.angle_tolerance),
        at_most("projection-slopes", splitting.projection_slopes.iter().fold(0.0, |a: f64, b| a.max(b.abs())), SLOPE_TOL),
        at_most("contraction", contraction.max_ratio, contraction.bound),
        holds("certificate", p.certificate().holds() && contraction.bound <= 0.5 + 1e-12),
        holds("all-points-solved", solver.failures.is_empty()),
        at_most("fixed-point-residual", solver.max_residual, cfg.lp.tolerance),
        holds("a-priori-bound", solver.all_apriori_ok),
        at_most("center-recovery", solver.max_recovery_error, RECOVERY_TOL),
        at_most("invariance-one-step", inv1.max_distance(), cfg.verify.tolerance),
        holds("invariance-one-step-domain", inv1.out_of_domain == 0),
        at_most("invariance-multi-step", invn.max_distance(), cfg.verify.tolerance),
        at_most("modified-invariance", invn.max_modified_distance(), cfg.verify.tolerance),
        at_most("orbit-identity", invn.orbit_identity_error, cfg.verify.tolerance),
        at_most("transport", inv1.transport_residual, inv1.transport_tolerance),
        at_most("lipschitz", regularity.lipschitz.max(regularity.gamma_lipschitz), regularity.lipschitz_ceiling),
        at_most("injectivity", regularity.inverse_lipschitz, regularity.inverse_ceiling),
        at_least("tangency-order", regularity.tangency_order, regularity.tangency_floor),
    ];
    let passed = verdicts.iter().all(|v| v.passed);
    Ok(VerificationReport {
        system: cfg.system.clone(),
        seed: cfg.seed,
        spectrum,
        splitting,
        contraction,
        solver,
        invariance_one_step: inv1,
        invariance_multi_step: invn,
        regularity,
        verdicts,
        passed,
    })
}

/// The report is written even when a check fails; the failure is signalled
/// separately so the caller can still export it.
pub fn verify(cfg: &RunConfig) -> Result<(Vec<Artifact>, Option<RunError>), RunError> {
    let r = verification(cfg)?;
    let failed: Vec<&str> = r.verdicts.iter().filter(|v| !v.passed).map(|v| v.check).collect();
    let status = if failed.is_empty() { None } else { Some(RunError::Verification(failed.join(", "))) };
    Ok((vec![artifact("verify.json", json(&r))], status))
}
