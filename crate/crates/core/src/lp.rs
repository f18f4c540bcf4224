//! Truncated weighted sequence spaces, the Lyapunov–Perron operator and its
//! Picard solver.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{self, Cocycle, CutoffSpec, Modulus, RandomScalar, StationaryPoint};
use crate::driver::Realization;
use crate::error::{invalid, Error, Result};
use crate::met::{GrowthConstants, OseledetsSplitting, Subspace};
use crate::linalg;
use crate::math;

/// Γ restricted to n ∈ [lo, hi], based at orbit index `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceWindow {
    pub base: i64,
    pub lo: i64,
    pub hi: i64,
    pub nu: f64,
    pub entries: Vec<DVector<f64>>,
}

impl SequenceWindow {
    pub fn from_fn(base: i64, lo: i64, hi: i64, nu: f64, f: impl FnMut(i64) -> DVector<f64>) -> Self {
        SequenceWindow { base, lo, hi, nu, entries: (lo..=hi).map(f).collect() }
    }

    pub fn zeros(base: i64, lo: i64, hi: i64, nu: f64, dim: usize) -> Self {
        Self::from_fn(base, lo, hi, nu, |_| DVector::zeros(dim))
    }

    /// Π^n[Γ], if n is inside the window.
    pub fn entry(&self, n: i64) -> Option<&DVector<f64>> {
        if n < self.lo || n > self.hi {
            None
        } else {
            Some(&self.entries[(n - self.lo) as usize])
        }
    }

    pub fn same_shape(&self, other: &SequenceWindow) -> bool {
        self.base == other.base && self.lo == other.lo && self.hi == other.hi
    }
}

/// sup_n ‖Πⁿ[Γ]‖ e^{−ν|n|}.
pub fn weighted_norm(g: &SequenceWindow) -> f64 {
    (g.lo..=g.hi)
        .zip(&g.entries)
        .map(|(n, e)| e.norm() * math::exp(-g.nu * math::abs(n as f64)))
        .fold(0.0, f64::max)
}

/// Weighted distance between two windows of identical shape.
pub fn weighted_distance(a: &SequenceWindow, b: &SequenceWindow) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(invalid("sequence windows differ in base or range"));
    }
    Ok((a.lo..=a.hi)
        .zip(a.entries.iter().zip(&b.entries))
        .map(|(n, (x, y))| (x - y).norm() * math::exp(-a.nu * math::abs(n as f64)))
        .fold(0.0, f64::max))
}

/// Γ̃ based at θω with Πⁿ[Γ̃] = Π^{n+1}[Γ]; the index range moves down by one.
pub fn shift_window(g: &SequenceWindow) -> SequenceWindow {
    SequenceWindow { base: g.base + 1, lo: g.lo - 1, hi: g.hi - 1, nu: g.nu, entries: g.entries.clone() }
}

/// L_ε and L̃_ε for a given M (the same M is used for both).
pub fn contraction_bound(nu: f64, eps: f64, mu_plus: f64, mu_minus: f64, m: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < nu) {
        return Err(Error::ParametersInfeasible(format!("need 0 < epsilon < nu, got epsilon = {eps}, nu = {nu}")));
    }
    let a_u = -mu_plus + eps + nu;
    let a_s = mu_minus + eps + nu;
    if !(a_u < 0.0) || !(a_s < 0.0) {
        return Err(Error::ParametersInfeasible(format!(
            "need -mu+ + eps + nu < 0 and mu- + eps + nu < 0 (got {a_u:.6}, {a_s:.6})"
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::ParametersInfeasible("M must be non-negative".into()));
    }
    let center = 1.0 / (1.0 - math::exp(eps - nu));
    let unstable = math::exp(a_u) / (1.0 - math::exp(a_u));
    let stable = 1.0 / (1.0 - math::exp(a_s));
    let scale = m * math::exp(nu);
    Ok((scale * (center + unstable + stable), scale * (unstable + stable)))
}

/// min{ν, μ⁺−ν, −μ⁻−ν}/4.
pub fn default_epsilon(nu: f64, mu_plus: f64, mu_minus: f64) -> f64 {
    nu.min(mu_plus - nu).min(-mu_minus - nu) / 4.0
}

/// Largest M with 5L_ε ≤ ½ and largest M̃ with 5L̃_ε ≤ 1.
pub fn auto_constants(nu: f64, eps: f64, mu_plus: f64, mu_minus: f64) -> Result<(f64, f64)> {
    let (k, kt) = contraction_bound(nu, eps, mu_plus, mu_minus, 1.0)?;
    let m = 0.1 / k;
    let mt = if kt > 0.0 { 0.2 / kt } else { f64::INFINITY };
    Ok((m, mt))
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadiusTerms {
    pub t: f64,
    pub t_tilde: f64,
    pub rho: f64,
}

/// Inputs to the radius formulas at one orbit index.
#[derive(Clone, Copy, Debug)]
pub struct RadiusInputs {
    pub m_eps: f64,
    pub m_tilde: f64,
    pub f: f64,
    /// F^S_ε, F^U_ε, F^{C,1}_ε, F^{C,−1}_ε.
    pub f_eps: [f64; 4],
    /// max{F^{C,1}_ν, F^{C,−1}_ν}.
    pub f_c_nu: f64,
    /// ‖Π_U‖, ‖Π_C‖, ‖Π_S‖.
    pub proj: [f64; 3],
    /// Validity radius R at the preceding index (ρ is capped at R/2).
    pub validity: f64,
}

/// T, T̃ and ρ = ¼ min{h⁻¹(T), h⁻¹(T̃)}, capped at R/2.
pub fn radius(inp: &RadiusInputs, modulus: &Modulus) -> Result<RadiusTerms> {
    let inv = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
    let [fs, fu, fc1, fcm1] = inp.f_eps;
    let [pu, pc, ps] = inp.proj;
    let t = inp.m_eps / inp.f * inv(fc1 * pc).min(inv(fcm1 * pc)).min(inv(fu * pu)).min(inv(fs * ps));
    let t_tilde = inp.m_tilde / (4.0 * inp.f * inp.f_c_nu) * inv(fu * pu).min(inv(fs * ps));
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::RadiusFailure(format!("T = {t} is not a positive finite number")));
    }
    if !(t_tilde > 0.0) {
        return Err(Error::RadiusFailure(format!("T~ = {t_tilde} is not positive")));
    }
    let rho = 0.25 * modulus.h_inv(t).min(modulus.h_inv(t_tilde));
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::RadiusFailure(format!("h^-1 undefined at T = {t}, T~ = {t_tilde}")));
    }
    Ok(RadiusTerms { t, t_tilde, rho: rho.min(0.5 * inp.validity) })
}

#[derive(Clone, Debug)]
pub struct LpConfig {
    pub nu: f64,
    /// `None` selects min{ν, μ⁺−ν, −μ⁻−ν}/4.
    pub eps: Option<f64>,
    pub half_width: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `None` selects the largest admissible constants.
    pub m_eps: Option<f64>,
    pub m_tilde: Option<f64>,
    pub n_f: usize,
    pub safety: f64,
    /// Replace the certified ρ by a constant cutoff radius.
    pub cutoff_override: Option<f64>,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            nu: 0.2,
            eps: None,
            half_width: 40,
            tolerance: 1e-12,
            max_iterations: 200,
            m_eps: None,
            m_tilde: None,
            n_f: 40,
            safety: 1.25,
            cutoff_override: None,
        }
    }
}

/// Resolved constants of the contraction certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub nu: f64,
    pub eps: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub m_eps: f64,
    pub m_tilde: f64,
    pub l_eps: f64,
    pub l_tilde: f64,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        5.0 * self.l_eps < 1.0 && 5.0 * self.l_tilde <= 1.0 + 1e-12
    }
}

/// Everything the LP operator needs along one driving orbit.
pub struct LpProblem {
    cocycle: Arc<dyn Cocycle>,
    stationary: StationaryPoint,
    omega: Realization,
    split: OseledetsSplitting,
    cutoff: CutoffSpec,
    cfg: LpConfig,
    cert: Certificate,
    consts_eps: GrowthConstants,
    consts_nu: GrowthConstants,
    /// Certified radius terms on [consts.lo, consts.hi].
    certified: Vec<RadiusTerms>,
    /// Y_m on [split.lo, split.hi + 1].
    y: Vec<DVector<f64>>,
    y_lo: i64,
}

#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub gamma: SequenceWindow,
    pub v: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub contraction_ratio: f64,
    pub norm: f64,
    pub apriori_bound: f64,
    pub apriori_ok: bool,
}

impl LpProblem {
    pub fn new(
        cocycle: Arc<dyn Cocycle>,
        stationary: StationaryPoint,
        omega: Realization,
        split: OseledetsSplitting,
        modulus: Modulus,
        validity: RandomScalar,
        cfg: LpConfig,
    ) -> Result<Self> {
        let (mu_plus, mu_minus) = (split.mu_plus(), split.mu_minus());
        let nu = cfg.nu;
        if !(nu > 0.0 && nu < mu_plus.min(-mu_minus)) {
            return Err(Error::ParametersInfeasible(format!(
                "need 0 < nu < min(mu+, -mu-) = {}, got nu = {nu}",
                mu_plus.min(-mu_minus)
            )));
        }
        let eps = cfg.eps.unwrap_or_else(|| default_epsilon(nu, mu_plus, mu_minus));
        let (auto_m, auto_mt) = auto_constants(nu, eps, mu_plus, mu_minus)?;
        let m_eps = cfg.m_eps.unwrap_or(auto_m);
        let m_tilde = cfg.m_tilde.unwrap_or(auto_mt);
        let (l_eps, _) = contraction_bound(nu, eps, mu_plus, mu_minus, m_eps)?;
        let (_, l_tilde) = contraction_bound(nu, eps, mu_plus, mu_minus, m_tilde)?;
        let cert = Certificate { nu, eps, mu_plus, mu_minus, m_eps, m_tilde, l_eps, l_tilde };
        if !cert.holds() {
            return Err(Error::ParametersInfeasible(format!(
                "contraction certificate fails: 5L = {}, 5L~ = {}",
                5.0 * l_eps,
                5.0 * l_tilde
            )));
        }
        if cfg.half_width == 0 || !(cfg.tolerance > 0.0) || cfg.max_iterations == 0 {
            return Err(invalid("LP window, tolerance and iteration cap must be positive"));
        }
        if let Some(r) = cfg.cutoff_override {
            if !(r > 0.0) || !r.is_finite() {
                return Err(invalid("cutoff radius override must be positive and finite"));
            }
        }
        let (lo, hi) = split.window();
        let nf = cfg.n_f as i64;
        let a = lo + nf;
        let b = hi.min(split.psi_hi() - nf + 1);
        let consts_eps = split.growth_constants(eps, cfg.n_f, cfg.safety, a, b)?;
        let consts_nu = split.growth_constants(nu, cfg.n_f, cfg.safety, a, b)?;
        let mut certified = Vec::with_capacity((b - a + 1) as usize);
        for m in a..=b {
            let pn = |s| linalg::spectral_norm(split.projection(s, m).expect("index inside window"));
            let inp = RadiusInputs {
                m_eps,
                m_tilde,
                f: (modulus.f)(&omega.shift(m)),
                f_eps: [consts_eps.f_s(m)?, consts_eps.f_u(m)?, consts_eps.f_c_fwd(m)?, consts_eps.f_c_bwd(m)?],
                f_c_nu: consts_nu.f_c_max(m)?,
                proj: [pn(Subspace::Unstable), pn(Subspace::Center), pn(Subspace::Stable)],
                validity: validity(&omega.shift(m - 1)),
            };
            certified.push(radius(&inp, &modulus)?);
        }
        let y_lo = lo;
        let y = (lo..=hi + 1).map(|m| stationary.at(&omega.shift(m))).collect();

        let rho_lo = a;
        let table: Vec<f64> = match cfg.cutoff_override {
            Some(r) => alloc::vec![r; certified.len()],
            None => certified.iter().map(|t| t.rho).collect(),
        };
        let base_offset = omega.offset();
        let rho: RandomScalar = Arc::new(move |w: &Realization| {
            let m = w.offset() - base_offset - rho_lo;
            if m < 0 || m as usize >= table.len() {
                f64::NAN
            } else {
                table[m as usize]
            }
        });
        let cutoff = CutoffSpec { rho, validity, modulus };
        Ok(LpProblem { cocycle, stationary, omega, split, cutoff, cfg, cert, consts_eps, consts_nu, certified, y, y_lo })
    }

    pub fn cocycle(&self) -> &dyn Cocycle {
        self.cocycle.as_ref()
    }

    pub fn stationary(&self) -> &StationaryPoint {
        &self.stationary
    }

    pub fn omega(&self) -> &Realization {
        &self.omega
    }

    pub fn splitting(&self) -> &OseledetsSplitting {
        &self.split
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }

    pub fn config(&self) -> &LpConfig {
        &self.cfg
    }

    pub fn certificate(&self) -> &Certificate {
        &self.cert
    }

    pub fn constants_eps(&self) -> &GrowthConstants {
        &self.consts_eps
    }

    pub fn constants_nu(&self) -> &GrowthConstants {
        &self.consts_nu
    }

    /// Orbit indices where ρ is available.
    pub fn radius_range(&self) -> (i64, i64) {
        (self.consts_eps.lo, self.consts_eps.hi())
    }

    /// Certified T, T̃, ρ at orbit index m (ignores any override).
    pub fn certified_radius(&self, m: i64) -> Result<RadiusTerms> {
        let (a, b) = self.radius_range();
        if m < a || m > b {
            return Err(invalid(format!("no radius at orbit index {m}")));
        }
        Ok(self.certified[(m - a) as usize])
    }

    /// Cutoff radius ρ(θ^m ω) in use.
    pub fn rho(&self, m: i64) -> Result<f64> {
        let r = (self.cutoff.rho)(&self.omega.shift(m));
        if r.is_nan() {
            return Err(invalid(format!("no radius at orbit index {m}")));
        }
        Ok(r)
    }

    pub fn f(&self, m: i64) -> f64 {
        (self.cutoff.modulus.f)(&self.omega.shift(m))
    }

    /// Y at orbit index m.
    pub fn y(&self, m: i64) -> Result<&DVector<f64>> {
        let i = m - self.y_lo;
        if i < 0 || i as usize >= self.y.len() {
            return Err(invalid(format!("no stationary value cached at orbit index {m}")));
        }
        Ok(&self.y[i as usize])
    }

    /// P_{θ^m ω, ρ}(ξ).
    pub fn cutoff_p(&self, m: i64, xi: &DVector<f64>) -> Result<DVector<f64>> {
        let w = self.omega.shift(m);
        let psi = self.split.psi(m)?;
        let r = (self.cutoff.validity)(&w);
        cocycle::cutoff_remainder(
            |x| cocycle::remainder(self.cocycle.as_ref(), &self.stationary, psi, &w, x, r),
            &self.cutoff,
            &w,
            xi,
        )
    }

    /// Bases b for which a [−N, N] window is fully supported.
    pub fn base_range(&self) -> (i64, i64) {
        let n = self.cfg.half_width as i64;
        let (a, b) = self.radius_range();
        let (_, shi) = self.split.window();
        (a - 1 + n, (b - 1).min(shi - 1) - n)
    }

    fn check_window(&self, base: i64, lo: i64, hi: i64) -> Result<()> {
        let (a, b) = self.radius_range();
        let (slo, shi) = self.split.window();
        if lo > 0 || hi < 0 || base + lo + 1 < a || base + hi + 1 > b || base + lo < slo || base + hi + 1 > shi {
            return Err(invalid(format!(
                "window [{lo}, {hi}] at base {base} is not covered by the splitting/radius range"
            )));
        }
        Ok(())
    }

    fn check_center(&self, base: i64, v: &DVector<f64>) -> Result<()> {
        let pc = self.split.project(Subspace::Center, base, v)?;
        let off = (v - &pc).norm();
        if off > 1e-8 * v.norm().max(1e-6) {
            return Err(Error::NotInCenter(off));
        }
        Ok(())
    }

    pub fn zero_window(&self, base: i64) -> Result<SequenceWindow> {
        let n = self.cfg.half_width as i64;
        self.check_window(base, -n, n)?;
        let y = &self.y;
        let y_lo = self.y_lo;
        Ok(SequenceWindow::from_fn(base, -n, n, self.cfg.nu, |k| {
            DVector::zeros(y[(base + k - y_lo) as usize].len())
        }))
    }

    /// I(v, Γ) on Γ's window, by forward/backward recursions.
    pub fn apply_i(&self, v: &DVector<f64>, g: &SequenceWindow) -> Result<SequenceWindow> {
        let (b, lo, hi) = (g.base, g.lo, g.hi);
        self.check_window(b, lo, hi)?;
        self.check_center(b, v)?;
        let len = (hi - lo + 1) as usize;
        // forcing terms g_j, j ∈ [lo+1, hi+1], stored at j − lo − 1
        let mut forcing = Vec::with_capacity(len);
        for j in lo + 1..=hi + 1 {
            forcing.push(self.cutoff_p(b + j - 1, &g.entries[(j - 1 - lo) as usize])?);
        }
        let gj = |j: i64| &forcing[(j - lo - 1) as usize];
        let proj = |s, n: i64| self.split.projection(s, b + n);

        let mut out: Vec<DVector<f64>> = Vec::with_capacity(len);
        // Each recursion re-projects onto its subspace: ψ preserves U, C and S,
        // but without this roundoff in the wrong subspace is amplified along the window.
        // stable part
        let mut s = DVector::zeros(g.entries[0].len());
        out.push(s.clone());
        for n in lo + 1..=hi {
            let ps = proj(Subspace::Stable, n)?;
            s = ps * (self.split.psi(b + n - 1)? * s + gj(n));
            out.push(s.clone());
        }
        // unstable part
        let (k_u, _) = self.split.dims();
        if k_u > 0 {
            let mut u = DVector::zeros(gj(hi + 1).len());
            for n in (lo..=hi).rev() {
                u = proj(Subspace::Unstable, n)? * (self.split.rinv(b + n)? * (u - proj(Subspace::Unstable, n + 1)? * gj(n + 1)));
                out[(n - lo) as usize] += &u;
            }
        }
        // center part
        let mut c = v.clone();
        out[(-lo) as usize] += &c;
        for n in 1..=hi {
            c = proj(Subspace::Center, n)? * (self.split.psi(b + n - 1)? * c + gj(n));
            out[(n - lo) as usize] += &c;
        }
        c = v.clone();
        for n in (lo..0).rev() {
            c = proj(Subspace::Center, n)? * (self.split.rinv(b + n)? * (c - proj(Subspace::Center, n + 1)? * gj(n + 1)));
            out[(n - lo) as usize] += &c;
        }
        for e in &out {
            if !linalg::vec_finite(e) {
                return Err(Error::NumericalFailure("LP operator produced non-finite entries".into()));
            }
        }
        Ok(SequenceWindow { base: b, lo, hi, nu: g.nu, entries: out })
    }

    /// Picard iteration from Γ = 0 at base `base`.
    pub fn solve_fixed_point(&self, base: i64, v: &DVector<f64>) -> Result<FixedPoint> {
        let start = self.zero_window(base)?;
        self.solve_from(v, start)
    }

    /// Picard iteration from the given window.
    pub fn solve_from(&self, v: &DVector<f64>, start: SequenceWindow) -> Result<FixedPoint> {
        let tol = self.cfg.tolerance;
        let mut gamma = start;
        let mut prev_res = f64::NAN;
        let mut ratio: f64 = 0.0;
        for k in 0..self.cfg.max_iterations {
            let next = self.apply_i(v, &gamma)?;
            let res = weighted_distance(&next, &gamma)?;
            if res < tol {
                return Ok(self.finish(gamma, v, k, res, ratio));
            }
            let floor = 64.0 * f64::EPSILON * weighted_norm(&next).max(1e-300);
            if prev_res > floor && res > floor {
                ratio = ratio.max(res / prev_res);
            }
            prev_res = res;
            gamma = next;
        }
        let res = weighted_distance(&self.apply_i(v, &gamma)?, &gamma)?;
        if res < tol {
            return Ok(self.finish(gamma, v, self.cfg.max_iterations, res, ratio));
        }
        Err(Error::FixedPointNotConverged { iterations: self.cfg.max_iterations, residual: res, contraction_ratio: ratio })
    }

    fn finish(&self, gamma: SequenceWindow, v: &DVector<f64>, iterations: usize, residual: f64, ratio: f64) -> FixedPoint {
        let norm = weighted_norm(&gamma);
        let fc = self.consts_eps.f_c_max(gamma.base).unwrap_or(f64::INFINITY);
        let apriori_bound = fc * v.norm() / (1.0 - self.cert.l_eps);
        FixedPoint {
            v: v.clone(),
            iterations,
            residual,
            contraction_ratio: ratio,
            norm,
            apriori_bound,
            apriori_ok: norm <= apriori_bound * (1.0 + 1e-12) + 1e-300,
            gamma,
        }
    }

    /// v recovered from a fixed point: Π_C(Π⁰Γ).
    pub fn recover_center(&self, g: &SequenceWindow) -> Result<DVector<f64>> {
        let e0 = g.entry(0).ok_or_else(|| invalid("window does not contain index 0"))?;
        self.split.project(Subspace::Center, g.base, e0)
    }
}

/// Empirical contraction of I over random window pairs.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContractionProbe {
    pub base: i64,
    pub pairs: usize,
    /// max ‖I(v,Γ)−I(v,Γ̃)‖/‖Γ−Γ̃‖.
    pub max_ratio: f64,
    /// 5L_ε.
    pub bound: f64,
    pub passed: bool,
}

/// Random pairs Γ, Γ̃ of weighted norm ≤ 1 on the full window at `base`.
/// Scales cycle through 1, ρ and ρ/4 so the cutoff region is exercised;
/// v is a center vector of norm ρ/2.
pub fn contraction_probe(p: &LpProblem, base: i64, pairs: usize, seed: u64) -> Result<ContractionProbe> {
    let n = p.config().half_width as i64;
    let nu = p.config().nu;
    let rho = p.rho(base)?;
    let d = p.y(base)?.len();
    let c = p.splitting().basis(Subspace::Center, base)?;
    let v = c.column(0) * (0.5 * rho);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut window = |scale: f64| {
        let w = scale / math::sqrt(d as f64);
        SequenceWindow::from_fn(base, -n, n, nu, |k| {
            let wk = w * math::exp(nu * math::abs(k as f64));
            DVector::from_fn(d, |_, _| wk * rng.random_range(-1.0..1.0))
        })
    };
    let mut max_ratio: f64 = 0.0;
    for i in 0..pairs {
        let scale = [1.0, rho, 0.25 * rho][i % 3];
        let (a, b) = (window(scale), window(scale));
        let din = weighted_distance(&a, &b)?;
        if din == 0.0 {
            continue;
        }
        let dout = weighted_distance(&p.apply_i(&v, &a)?, &p.apply_i(&v, &b)?)?;
        max_ratio = max_ratio.max(dout / din);
    }
    let bound = 5.0 * p.certificate().l_eps;
    Ok(ContractionProbe { base, pairs, max_ratio, bound, passed: max_ratio <= bound && bound <= 0.5 + 1e-12 })
}
