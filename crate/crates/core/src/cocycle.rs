//! Nonlinear cocycles, stationary points, linearization, remainder and cutoff.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::driver::Realization;
use crate::error::{invalid, Error, Result};
use crate::field::{FiberSpec, FiberVector};
use crate::linalg;
use crate::math;

/// A positive random variable ω ↦ X(ω).
pub type RandomScalar = Arc<dyn Fn(&Realization) -> f64 + Send + Sync>;

pub fn constant_scalar(c: f64) -> RandomScalar {
    Arc::new(move |_| c)
}

/// One-step maps φ¹_ω : E_ω → E_{θω}.
pub trait Cocycle: Send + Sync {
    fn dim(&self, omega: &Realization) -> usize;

    fn fiber(&self, omega: &Realization) -> FiberSpec {
        FiberSpec::euclidean(self.dim(omega))
    }

    fn step(&self, omega: &Realization, x: &DVector<f64>) -> DVector<f64>;

    /// Analytic differential of φ¹_ω at `x`, when available.
    fn differential(&self, _omega: &Realization, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }

    /// Differentiability order m.
    fn order(&self) -> u32 {
        2
    }
}

/// Matrix generator ω ↦ ψ¹_ω : E_ω → E_{θω}.
pub trait LinearCocycle: Send + Sync {
    fn matrix(&self, omega: &Realization) -> Result<DMatrix<f64>>;
}

/// Linear cocycle given by a matrix generator; also usable as a (linear)
/// nonlinear cocycle.
#[derive(Clone)]
pub struct LinearSystem {
    gen: Arc<dyn Fn(&Realization) -> DMatrix<f64> + Send + Sync>,
}

impl LinearSystem {
    pub fn new(gen: impl Fn(&Realization) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        LinearSystem { gen: Arc::new(gen) }
    }

    pub fn constant(a: DMatrix<f64>) -> Self {
        LinearSystem::new(move |_| a.clone())
    }
}

impl LinearCocycle for LinearSystem {
    fn matrix(&self, omega: &Realization) -> Result<DMatrix<f64>> {
        let m = (self.gen)(omega);
        if !linalg::all_finite(&m) {
            return Err(Error::NumericalFailure(format!(
                "non-finite matrix at orbit offset {}",
                omega.offset()
            )));
        }
        Ok(m)
    }
}

impl Cocycle for LinearSystem {
    fn dim(&self, omega: &Realization) -> usize {
        (self.gen)(omega).ncols()
    }

    fn step(&self, omega: &Realization, x: &DVector<f64>) -> DVector<f64> {
        (self.gen)(omega) * x
    }

    fn differential(&self, omega: &Realization, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some((self.gen)(omega))
    }
}

/// φⁿ_ω(x). The result is tagged `x.tag + n`.
pub fn iterate(c: &dyn Cocycle, omega: &Realization, x: &FiberVector, n: usize) -> Result<FiberVector> {
    let d = c.dim(omega);
    if x.dim() != d {
        return Err(invalid(format!("vector of length {} not in fiber of dimension {d}", x.dim())));
    }
    let mut z = x.coords.clone();
    for j in 0..n {
        z = c.step(&omega.shift(j as i64), &z);
    }
    Ok(FiberVector::new(z, x.tag + n as i64))
}

/// Random fixed trajectory Y_ω with φ¹_ω(Y_ω) = Y_{θω}.
#[derive(Clone)]
pub struct StationaryPoint {
    eval: Arc<dyn Fn(&Realization) -> DVector<f64> + Send + Sync>,
    tolerance: f64,
}

impl StationaryPoint {
    pub fn new(
        eval: impl Fn(&Realization) -> DVector<f64> + Send + Sync + 'static,
        tolerance: f64,
    ) -> Self {
        StationaryPoint { eval: Arc::new(eval), tolerance }
    }

    /// Y ≡ 0 in a fiber of dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        StationaryPoint::new(move |_| DVector::zeros(dim), 0.0)
    }

    pub fn at(&self, omega: &Realization) -> DVector<f64> {
        (self.eval)(omega)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// ‖φ¹_ω(Y_ω) − Y_{θω}‖.
    pub fn residual(&self, c: &dyn Cocycle, omega: &Realization) -> f64 {
        (c.step(omega, &self.at(omega)) - self.at(&omega.shift(1))).norm()
    }
}

/// Central-difference Jacobian of φ¹_ω at `x`.
pub fn finite_difference_jacobian(c: &dyn Cocycle, omega: &Realization, x: &DVector<f64>) -> DMatrix<f64> {
    let d = x.len();
    let h = 1e-6f64.max(1e-6 * x.norm());
    let mut out: Option<DMatrix<f64>> = None;
    for i in 0..d {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let col = (c.step(omega, &xp) - c.step(omega, &xm)) / (2.0 * h);
        let m = out.get_or_insert_with(|| DMatrix::zeros(col.len(), d));
        m.set_column(i, &col);
    }
    out.unwrap_or_else(|| DMatrix::zeros(0, 0))
}

/// ψ¹_ω without the consistency ladder.
pub fn jacobian_at(c: &dyn Cocycle, y: &StationaryPoint, omega: &Realization) -> Result<DMatrix<f64>> {
    let base = y.at(omega);
    let m = match c.differential(omega, &base) {
        Some(m) => m,
        None => finite_difference_jacobian(c, omega, &base),
    };
    if !linalg::all_finite(&m) {
        return Err(Error::NumericalFailure(format!(
            "non-finite linearization at orbit offset {}",
            omega.offset()
        )));
    }
    Ok(m)
}

/// Largest ratio ‖φ(Y+ξ) − φ(Y) − ψξ‖/‖ξ‖ at the first and last rung of the
/// ladder ‖ξ‖ = 2^{-k}, k = 3..=12, over coordinate and diagonal directions.
pub fn linearization_ladder(
    c: &dyn Cocycle,
    y: &StationaryPoint,
    psi: &DMatrix<f64>,
    omega: &Realization,
) -> (f64, f64) {
    let base = y.at(omega);
    let d = base.len();
    let fy = c.step(omega, &base);
    let mut dirs: Vec<DVector<f64>> = (0..d)
        .map(|i| {
            let mut e = DVector::zeros(d);
            e[i] = 1.0;
            e
        })
        .collect();
    dirs.push(DVector::from_element(d, 1.0 / math::sqrt(d as f64)));
    let ratio = |s: f64| -> f64 {
        dirs.iter()
            .map(|u| {
                let xi = u * s;
                (c.step(omega, &(&base + &xi)) - &fy - psi * &xi).norm() / s
            })
            .fold(0.0, f64::max)
    };
    (ratio(libm::ldexp(1.0, -3)), ratio(libm::ldexp(1.0, -12)))
}

/// ψ¹_ω = D_{Y_ω}φ¹_ω, checked for consistency with φ on a shrinking ladder.
pub fn linearize(c: &dyn Cocycle, y: &StationaryPoint, omega: &Realization) -> Result<DMatrix<f64>> {
    let psi = jacobian_at(c, y, omega)?;
    let (first, last) = linearization_ladder(c, y, &psi, omega);
    let scale = 1.0 + linalg::spectral_norm(&psi);
    if !(last <= 1e-6 * scale || last <= 0.25 * first) {
        return Err(Error::LinearizationFailure(format!(
            "remainder ratio does not vanish: {first:e} at 2^-3, {last:e} at 2^-12"
        )));
    }
    Ok(psi)
}

/// The linearized cocycle ψ along Y (no per-step ladder check).
#[derive(Clone)]
pub struct Linearization {
    pub cocycle: Arc<dyn Cocycle>,
    pub stationary: StationaryPoint,
}

impl LinearCocycle for Linearization {
    fn matrix(&self, omega: &Realization) -> Result<DMatrix<f64>> {
        jacobian_at(self.cocycle.as_ref(), &self.stationary, omega)
    }
}

/// P_ω(ξ) = φ¹_ω(Y_ω+ξ) − φ¹_ω(Y_ω) − ψ¹_ω ξ for ‖ξ‖ < R(ω).
pub fn remainder(
    c: &dyn Cocycle,
    y: &StationaryPoint,
    psi: &DMatrix<f64>,
    omega: &Realization,
    xi: &DVector<f64>,
    validity: f64,
) -> Result<DVector<f64>> {
    let norm = xi.norm();
    if !(norm < validity) {
        return Err(Error::OutsideValidityRadius { norm, radius: validity });
    }
    let base = y.at(omega);
    Ok(c.step(omega, &(&base + xi)) - c.step(omega, &base) - psi * xi)
}

/// Bump δ: 1 on [−1,1], 0 outside [−2,2], quintic smoothstep in between.
pub fn bump(x: f64) -> f64 {
    let a = math::abs(x);
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let t = a - 1.0;
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// h(x) = x^r together with the growth factor f.
#[derive(Clone)]
pub struct Modulus {
    pub f: RandomScalar,
    pub exponent: f64,
}

impl Modulus {
    pub fn new(f: RandomScalar, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(invalid("modulus exponent r must be positive"));
        }
        Ok(Modulus { f, exponent })
    }

    pub fn h(&self, x: f64) -> f64 {
        math::powf(x, self.exponent)
    }

    pub fn h_inv(&self, y: f64) -> f64 {
        math::powf(y, 1.0 / self.exponent)
    }
}

/// Cutoff data (δ is fixed to [`bump`]).
#[derive(Clone)]
pub struct CutoffSpec {
    pub rho: RandomScalar,
    pub validity: RandomScalar,
    pub modulus: Modulus,
}

/// P_{ω,ρ}(ξ) = δ(‖ξ‖/ρ(θω)) P_ω(ξ). `p` is only evaluated inside the
/// 2ρ-ball.
pub fn cutoff_remainder<P>(p: P, spec: &CutoffSpec, omega: &Realization, xi: &DVector<f64>) -> Result<DVector<f64>>
where
    P: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let rho = (spec.rho)(&omega.shift(1));
    let w = bump(xi.norm() / rho);
    if w == 0.0 {
        return Ok(DVector::zeros(xi.len()));
    }
    let v = p(xi)?;
    Ok(if w == 1.0 { v } else { v * w })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssumptionReport {
    pub samples: usize,
    /// Mean of log⁺‖ψ¹‖ over the sampled orbit.
    pub mean_log_plus_psi: f64,
    /// max ‖P(ξ)−P(ξ̃)‖ / (‖ξ−ξ̃‖ f(θω) h(‖ξ‖+‖ξ̃‖)) over sampled pairs.
    pub violation_ratio: f64,
    /// (1/n) log⁺ f(θⁿω) at n = samples.
    pub f_slope: f64,
    /// (1/n) log ρ(θⁿω) at n = samples.
    pub rho_slope: f64,
    pub slope_tolerance: f64,
    pub flagged: bool,
}

/// Sampled-orbit diagnostics for the standing assumption on ψ, P, f and ρ.
/// Pairs are drawn uniformly from the ball of radius `min(ball, R(ω)/2)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_assumption(
    c: &dyn Cocycle,
    y: &StationaryPoint,
    psi: &dyn LinearCocycle,
    spec: &CutoffSpec,
    omega: &Realization,
    samples: usize,
    ball: f64,
    seed: u64,
) -> Result<AssumptionReport> {
    if samples == 0 {
        return Err(invalid("verify_assumption needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_acc = 0.0;
    let mut worst: f64 = 0.0;
    for j in 0..samples {
        let w = omega.shift(j as i64);
        let m = psi.matrix(&w)?;
        log_acc += math::log_plus(linalg::spectral_norm(&m));
        let radius = ball.min((spec.validity)(&w) * 0.5);
        let d = m.ncols();
        let draw = |rng: &mut ChaCha8Rng| -> DVector<f64> {
            let dir = DVector::from_fn(d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let r = radius * math::powf(rng.random::<f64>(), 1.0 / d as f64);
            let n = dir.norm();
            if n == 0.0 {
                dir
            } else {
                dir * (r / n)
            }
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let valid = (spec.validity)(&w);
        let pa = remainder(c, y, &m, &w, &a, valid)?;
        let pb = remainder(c, y, &m, &w, &b, valid)?;
        let f = (spec.modulus.f)(&w.shift(1));
        let denom = (&a - &b).norm() * f * spec.modulus.h(a.norm() + b.norm());
        if denom > 0.0 {
            worst = worst.max((pa - pb).norm() / denom);
        }
    }
    let n = samples as f64;
    let tail = omega.shift(samples as i64);
    let f_slope = math::log_plus((spec.modulus.f)(&tail)) / n;
    let rho_slope = math::ln((spec.rho)(&tail)) / n;
    let slope_tolerance = 0.05;
    Ok(AssumptionReport {
        samples,
        mean_log_plus_psi: log_acc / n,
        violation_ratio: worst,
        f_slope,
        rho_slope,
        slope_tolerance,
        flagged: !(log_acc / n).is_finite()
            || worst > 1.0
            || math::abs(f_slope) > slope_tolerance
            || math::abs(rho_slope) > slope_tolerance,
    })
}
