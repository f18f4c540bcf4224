//! The modified cocycle, center charts h^c, and their verification.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::lp::{self, FixedPoint, LpProblem};
use crate::math;
use crate::met::Subspace;

/// φ̃¹ at orbit index m: Y_{m+1} + ψ_m ξ + P_{m,ρ}(ξ) with ξ = x − Y_m.
pub fn modified_step(p: &LpProblem, m: i64, x: &DVector<f64>) -> Result<DVector<f64>> {
    let xi = x - p.y(m)?;
    let lin = p.splitting().psi(m)? * &xi;
    Ok(p.y(m + 1)? + lin + p.cutoff_p(m, &xi)?)
}

/// h^c(v) = Π⁰[Γ_v] at base `base`.
pub fn chart(p: &LpProblem, base: i64, v: &DVector<f64>) -> Result<DVector<f64>> {
    let fp = p.solve_fixed_point(base, v)?;
    Ok(fp.gamma.entry(0).expect("window contains 0").clone())
}

#[derive(Clone, Debug)]
pub struct ChartPoint {
    /// Coordinates of v in the orthonormal center basis.
    pub coords: Vec<f64>,
    pub v: DVector<f64>,
    /// h^c(v), a displacement from Y.
    pub value: DVector<f64>,
    pub fixed: FixedPoint,
}

#[derive(Clone, Debug)]
pub struct CenterChart {
    pub base: i64,
    pub radius: f64,
    pub points: Vec<ChartPoint>,
    pub failures: Vec<(Vec<f64>, Error)>,
}

/// Symmetric tensor grid in center coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub radius: f64,
    /// Points per axis.
    pub points: usize,
}

impl GridSpec {
    pub fn axis(&self) -> Vec<f64> {
        let n = self.points;
        if n <= 1 {
            return vec![0.0; n];
        }
        // build the left half and mirror it so the grid is exactly symmetric
        let mut out = vec![0.0; n];
        for i in 0..n / 2 {
            let x = -self.radius + 2.0 * self.radius * i as f64 / (n - 1) as f64;
            out[i] = x;
            out[n - 1 - i] = -x;
        }
        out
    }

    pub fn coords(&self, k_c: usize) -> Vec<Vec<f64>> {
        let axis = self.axis();
        let mut out: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..k_c {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for prefix in &out {
                for a in &axis {
                    let mut c = prefix.clone();
                    c.push(*a);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }
}

/// v = C_base · coords.
pub fn center_vector(p: &LpProblem, base: i64, coords: &[f64]) -> Result<DVector<f64>> {
    let c = p.splitting().basis(Subspace::Center, base)?;
    if c.ncols() != coords.len() {
        return Err(invalid("center coordinate count does not match dim C"));
    }
    Ok(c * DVector::from_column_slice(coords))
}

/// Default grid radius min{ρ(θ^b ω), ρ(θ^{b+1} ω)}/2.
pub fn default_grid_radius(p: &LpProblem, base: i64) -> Result<f64> {
    Ok(0.5 * p.rho(base)?.min(p.rho(base + 1)?))
}

/// Assemble a chart from per-point solver outcomes (in grid order).
pub fn assemble_chart(base: i64, radius: f64, results: Vec<(Vec<f64>, DVector<f64>, Result<FixedPoint>)>) -> CenterChart {
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (coords, v, r) in results {
        match r {
            Ok(fixed) => {
                let value = fixed.gamma.entry(0).expect("window contains 0").clone();
                points.push(ChartPoint { coords, v, value, fixed });
            }
            Err(e) => failures.push((coords, e)),
        }
    }
    CenterChart { base, radius, points, failures }
}

/// Chart values on the grid; failures are collected, not fatal.
pub fn sample_manifold(p: &LpProblem, base: i64, grid: &GridSpec) -> Result<CenterChart> {
    let (_, k_c) = p.splitting().dims();
    let mut results = Vec::new();
    for coords in grid.coords(k_c) {
        let v = center_vector(p, base, &coords)?;
        let r = p.solve_fixed_point(base, &v);
        results.push((coords, v, r));
    }
    Ok(assemble_chart(base, grid.radius, results))
}

/// Distance from the fiber point Y_m + ξ to the chart graph at base m,
/// measured at the projected center coordinate Π_C ξ.
pub fn graph_distance(p: &LpProblem, m: i64, xi: &DVector<f64>) -> Result<f64> {
    let v = p.splitting().project(Subspace::Center, m, xi)?;
    Ok((chart(p, m, &v)? - xi).norm())
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvarianceReport {
    pub base: i64,
    pub steps: usize,
    pub tolerance: f64,
    /// Per chart point: distance of φⁿ(Y+h(v)) to the chart at base+n, or
    /// `None` when the point leaves Dⁿ.
    pub distances: Vec<Option<f64>>,
    /// Per chart point: distance of φ̃ⁿ(Y+h(v)) to the chart at base+n.
    pub modified_distances: Vec<f64>,
    pub in_domain: usize,
    pub out_of_domain: usize,
    /// max ‖φ̃ᵐ(Y+Π⁰Γ) − Y_m − Πᵐ[Γ]‖ over m ≤ n.
    pub orbit_identity_error: f64,
    /// max error of the variation-of-constants form of φ̃ⁿ.
    pub variation_error: f64,
    /// max ‖I(ṽ, Γ̃) − Γ̃‖ for Γ̃ = shift_window(Γ).
    pub transport_residual: f64,
    pub transport_tolerance: f64,
    pub passed: bool,
}

impl InvarianceReport {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().flatten().fold(0.0, |m, d| m.max(*d))
    }

    pub fn max_modified_distance(&self) -> f64 {
        self.modified_distances.iter().fold(0.0, |m, d| m.max(*d))
    }

    /// Verdict recomputed from the stored raw values.
    pub fn recompute_pass(&self) -> bool {
        self.max_distance() < self.tolerance
            && self.max_modified_distance() < self.tolerance
            && self.orbit_identity_error < self.tolerance
            && self.variation_error < self.tolerance
            && self.transport_residual < self.transport_tolerance
    }
}

/// n-step invariance of the chart under φ (inside Dⁿ) and φ̃ (everywhere).
pub fn verify_invariance(p: &LpProblem, chart: &CenterChart, n: usize, tolerance: f64) -> Result<InvarianceReport> {
    if n == 0 {
        return Err(invalid("invariance needs n >= 1"));
    }
    let b = chart.base;
    let nn = n as i64;
    let c = p.cocycle();
    let mut distances = Vec::with_capacity(chart.points.len());
    let mut modified_distances = Vec::with_capacity(chart.points.len());
    let (mut in_domain, mut out_of_domain) = (0, 0);
    let mut orbit_identity_error: f64 = 0.0;
    let mut variation_error: f64 = 0.0;
    let mut transport_residual: f64 = 0.0;

    for pt in &chart.points {
        let x0 = p.y(b)? + &pt.value;

        // original cocycle, with the Dⁿ membership test
        let mut x = x0.clone();
        let mut inside = true;
        for j in 0..nn {
            if (&x - p.y(b + j)?).norm() > p.rho(b + j + 1)? {
                inside = false;
                break;
            }
            x = c.step(&p.omega().shift(b + j), &x);
        }
        if inside {
            in_domain += 1;
            distances.push(Some(graph_distance(p, b + nn, &(&x - p.y(b + nn)?))?));
        } else {
            out_of_domain += 1;
            distances.push(None);
        }

        // modified cocycle: orbit identity and variation of constants
        let xi0 = &pt.value;
        let mut z = x0.clone();
        let mut voc = xi0.clone();
        for j in 0..nn {
            let xi_j = &z - p.y(b + j)?;
            voc = p.splitting().psi(b + j)? * voc + p.cutoff_p(b + j, &xi_j)?;
            z = modified_step(p, b + j, &z)?;
            if let Some(gm) = pt.fixed.gamma.entry(j + 1) {
                orbit_identity_error = orbit_identity_error.max((&z - p.y(b + j + 1)? - gm).norm());
            }
        }
        variation_error = variation_error.max((&z - p.y(b + nn)? - &voc).norm());
        modified_distances.push(graph_distance(p, b + nn, &(&z - p.y(b + nn)?))?);

        // fixed-point transport, one shift
        let shifted = lp::shift_window(&pt.fixed.gamma);
        let v1 = p.recover_center(&shifted)?;
        let image = p.apply_i(&v1, &shifted)?;
        transport_residual = transport_residual.max(lp::weighted_distance(&image, &shifted)?);
    }

    let mut report = InvarianceReport {
        base: b,
        steps: n,
        tolerance,
        distances,
        modified_distances,
        in_domain,
        out_of_domain,
        orbit_identity_error,
        variation_error,
        transport_residual,
        transport_tolerance: 10.0 * p.config().tolerance,
        passed: false,
    };
    report.passed = report.recompute_pass();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularityReport {
    pub base: i64,
    /// max ‖h(v)−h(ṽ)‖/‖v−ṽ‖ over grid pairs.
    pub lipschitz: f64,
    /// max ‖Γ_v−Γ_ṽ‖/‖v−ṽ‖ (weighted norm) over grid pairs.
    pub gamma_lipschitz: f64,
    /// 2 max{F^{C,1}_ν, F^{C,−1}_ν} at the base.
    pub lipschitz_ceiling: f64,
    /// max ‖v−ṽ‖/‖h(v)−h(ṽ)‖ over grid pairs.
    pub inverse_lipschitz: f64,
    pub inverse_ceiling: f64,
    /// Ladder radii s and sup_{‖v‖=s} ‖h(v)−v‖/s.
    pub ladder: Vec<(f64, f64)>,
    /// Slope of log ratio against log s (+∞ when h is exactly linear).
    pub tangency_order: f64,
    pub tangency_floor: f64,
    pub passed: bool,
}

impl RegularityReport {
    pub fn recompute_pass(&self) -> bool {
        self.lipschitz <= self.lipschitz_ceiling
            && self.gamma_lipschitz <= self.lipschitz_ceiling
            && self.inverse_lipschitz <= self.inverse_ceiling
            && self.tangency_order >= self.tangency_floor
    }
}

/// Lipschitz, inverse-Lipschitz and tangency checks on a chart.
pub fn verify_chart_regularity(p: &LpProblem, chart: &CenterChart) -> Result<RegularityReport> {
    if chart.points.len() < 3 {
        return Err(invalid("regularity checks need at least 3 chart points"));
    }
    let b = chart.base;
    let mut lipschitz: f64 = 0.0;
    let mut gamma_lipschitz: f64 = 0.0;
    let mut inverse_lipschitz: f64 = 0.0;
    for (i, a) in chart.points.iter().enumerate() {
        for q in &chart.points[i + 1..] {
            let dv = (&a.v - &q.v).norm();
            if dv == 0.0 {
                continue;
            }
            let dh = (&a.value - &q.value).norm();
            lipschitz = lipschitz.max(dh / dv);
            gamma_lipschitz = gamma_lipschitz.max(lp::weighted_distance(&a.fixed.gamma, &q.fixed.gamma)? / dv);
            inverse_lipschitz = inverse_lipschitz.max(if dh > 0.0 { dv / dh } else { f64::INFINITY });
        }
    }
    let lipschitz_ceiling = 2.0 * p.constants_nu().f_c_max(b)?;

    // tangency ladder s = 2^{-k}, starting at the largest power of two within the chart radius
    let (_, k_c) = p.splitting().dims();
    let k0 = math::floor(-libm::log2(chart.radius)) as i32 + 1;
    let mut ladder = Vec::new();
    for k in k0..k0 + 6 {
        let s = libm::ldexp(1.0, -k);
        let mut worst: f64 = 0.0;
        for axis in 0..k_c {
            for sign in [-1.0, 1.0] {
                let mut coords = vec![0.0; k_c];
                coords[axis] = sign * s;
                let v = center_vector(p, b, &coords)?;
                let h = chart_value(p, b, &v)?;
                worst = worst.max((h - &v).norm() / s);
            }
        }
        ladder.push((s, worst));
    }
    let tangency_order = if ladder.iter().all(|(_, t)| *t == 0.0) {
        f64::INFINITY
    } else if ladder.iter().any(|(_, t)| *t == 0.0) {
        0.0
    } else {
        let xs: Vec<f64> = ladder.iter().map(|(s, _)| math::ln(*s)).collect();
        let ys: Vec<f64> = ladder.iter().map(|(_, t)| math::ln(*t)).collect();
        math::ls_slope(&xs, &ys)
    };
    let mut report = RegularityReport {
        base: b,
        lipschitz,
        gamma_lipschitz,
        lipschitz_ceiling,
        inverse_lipschitz,
        inverse_ceiling: 2.0 + 1e-6,
        ladder,
        tangency_order,
        tangency_floor: 0.95,
        passed: false,
    };
    report.passed = report.recompute_pass();
    Ok(report)
}

fn chart_value(p: &LpProblem, base: i64, v: &DVector<f64>) -> Result<DVector<f64>> {
    chart(p, base, v)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaylorFit {
    pub degree: usize,
    /// `coefficients[i][k]`: coefficient of t^k in ambient coordinate i of
    /// h^c(v) − v, with t the center coordinate.
    pub coefficients: Vec<Vec<f64>>,
    /// RMS residual per coordinate.
    pub residuals: Vec<f64>,
}

/// Least-squares polynomial fit of h^c(v) − v against the center coordinate
/// (one-dimensional center only).
pub fn taylor_fit(chart: &CenterChart, degree: usize) -> Result<TaylorFit> {
    let n = chart.points.len();
    if n == 0 || chart.points[0].coords.len() != 1 {
        return Err(Error::FitFailure("polynomial fit needs a one-dimensional center".into()));
    }
    if degree + 1 > n {
        return Err(Error::FitFailure(format!("degree {degree} needs more than {n} grid points")));
    }
    let mut ts: Vec<f64> = chart.points.iter().map(|p| p.coords[0]).collect();
    let scale = ts.iter().fold(0.0f64, |m, t| m.max(math::abs(*t)));
    let mut sorted = ts.clone();
    sorted.sort_by(f64::total_cmp);
    let symmetric = sorted.iter().zip(sorted.iter().rev()).all(|(a, b)| math::abs(a + b) <= 1e-12 * scale.max(1e-300));
    if !symmetric {
        return Err(invalid("taylor_fit needs a grid symmetric about 0"));
    }
    if scale == 0.0 {
        return Err(Error::FitFailure("degenerate grid".into()));
    }
    for t in ts.iter_mut() {
        *t /= scale;
    }
    let vander = DMatrix::from_fn(n, degree + 1, |i, k| math::powf(ts[i], k as f64));
    let svd = vander.clone().svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    if !(smin > 1e-12 * smax) {
        return Err(Error::FitFailure(format!("ill-conditioned fit (sigma ratio {:e})", smin / smax)));
    }
    let d = chart.points[0].value.len();
    let mut coefficients = Vec::with_capacity(d);
    let mut residuals = Vec::with_capacity(d);
    for i in 0..d {
        let rhs = DVector::from_fn(n, |r, _| chart.points[r].value[i] - chart.points[r].v[i]);
        let sol = svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::FitFailure(format!("least-squares solve failed: {e}")))?;
        let resid = (&vander * &sol - &rhs).norm() / math::sqrt(n as f64);
        coefficients.push((0..=degree).map(|k| sol[k] / math::powf(scale, k as f64)).collect());
        residuals.push(resid);
    }
    Ok(TaylorFit { degree, coefficients, residuals })
}
