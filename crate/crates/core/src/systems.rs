//! Benchmark cocycles with known oracles.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::cocycle::{constant_scalar, Cocycle, Linearization, Modulus, RandomScalar, StationaryPoint};
use crate::driver::{DriverKind, DrivingSystem, NoiseLaw, Realization};
use crate::error::{invalid, Result};
use crate::field::FiberSpec;
use crate::lp::{LpConfig, LpProblem};
use crate::math;
use crate::met::{lyapunov_spectrum, oseledets_split, LyapunovSpectrum, SplitSettings};

pub const CATALOG: [&str; 6] = ["det-2d", "det-3d", "random-diag", "additive-noise", "delay-companion", "driven-ode"];

/// Terms Σ c_k x^k of one ambient coordinate of the center manifold graph,
/// in the center coordinate x.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SeriesOracle {
    pub coordinate: usize,
    pub terms: Vec<(u32, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Oracle {
    /// Expected exponents, decreasing (law means for random cocycles).
    pub exponents: Vec<f64>,
    /// True when the linearization is constant, so the exponents are exact.
    pub exact_exponents: bool,
    pub series: Vec<SeriesOracle>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub description: String,
    pub fiber: FiberSpec,
    /// Which application class this system stands in for.
    pub instantiates: &'static str,
    pub oracle: Oracle,
}

/// A ready-to-analyze system.
#[derive(Clone)]
pub struct Benchmark {
    pub driver: DrivingSystem,
    pub cocycle: Arc<dyn Cocycle>,
    pub stationary: StationaryPoint,
    pub spec: SystemSpec,
    pub modulus: Modulus,
    pub validity: RandomScalar,
}

impl Benchmark {
    pub fn realization(&self) -> Realization {
        self.driver.realization()
    }

    pub fn linearization(&self) -> Linearization {
        Linearization { cocycle: Arc::clone(&self.cocycle), stationary: self.stationary.clone() }
    }

    /// Full-dimension spectrum over `steps`, then the splitting and the LP
    /// problem at the base realization.
    pub fn prepare(&self, steps: usize, gap: f64, split: &SplitSettings, lp: LpConfig) -> Result<Prepared> {
        let omega = self.realization();
        let lin = self.linearization();
        let spectrum = lyapunov_spectrum(&lin, &omega, self.spec.fiber.dim(), steps, gap)?;
        let mut settings = split.clone();
        settings.forward_margin = settings.forward_margin.max(lp.n_f);
        let splitting = oseledets_split(&lin, &omega, &spectrum, &settings)?;
        let problem = LpProblem::new(
            Arc::clone(&self.cocycle),
            self.stationary.clone(),
            omega,
            splitting,
            self.modulus.clone(),
            self.validity.clone(),
            lp,
        )?;
        Ok(Prepared { spectrum, problem })
    }
}

pub struct Prepared {
    pub spectrum: LyapunovSpectrum,
    pub problem: LpProblem,
}

pub type Params = BTreeMap<String, f64>;

fn take(params: &Params, allowed: &[(&str, f64)]) -> Result<Vec<f64>> {
    for k in params.keys() {
        if !allowed.iter().any(|(a, _)| a == k) {
            return Err(invalid(format!("unknown system parameter '{k}'")));
        }
    }
    let mut out = Vec::with_capacity(allowed.len());
    for (k, d) in allowed {
        let v = params.get(*k).copied().unwrap_or(*d);
        if !v.is_finite() {
            return Err(invalid(format!("system parameter '{k}' must be finite")));
        }
        out.push(v);
    }
    Ok(out)
}

fn v2(a: f64, b: f64) -> DVector<f64> {
    DVector::from_column_slice(&[a, b])
}

fn v3(a: f64, b: f64, c: f64) -> DVector<f64> {
    DVector::from_column_slice(&[a, b, c])
}

/// (x, y) ↦ (x + xy, y/2 + x²).
struct Det2d;

impl Cocycle for Det2d {
    fn dim(&self, _: &Realization) -> usize {
        2
    }
    fn step(&self, _: &Realization, z: &DVector<f64>) -> DVector<f64> {
        let (x, y) = (z[0], z[1]);
        v2(x + x * y, 0.5 * y + x * x)
    }
    fn differential(&self, _: &Realization, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let (x, y) = (z[0], z[1]);
        Some(DMatrix::from_row_slice(2, 2, &[1.0 + y, x, 2.0 * x, 0.5]))
    }
}

/// (u, x, y) ↦ (2u + x², x + xy, y/2 + x²).
struct Det3d;

impl Cocycle for Det3d {
    fn dim(&self, _: &Realization) -> usize {
        3
    }
    fn step(&self, _: &Realization, z: &DVector<f64>) -> DVector<f64> {
        let (u, x, y) = (z[0], z[1], z[2]);
        v3(2.0 * u + x * x, x + x * y, 0.5 * y + x * x)
    }
    fn differential(&self, _: &Realization, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let (x, y) = (z[1], z[2]);
        Some(DMatrix::from_row_slice(3, 3, &[2.0, 2.0 * x, 0.0, 0.0, 1.0 + y, x, 0.0, 2.0 * x, 0.5]))
    }
}

/// (u, x, y) ↦ (e^{a(ω)}u + x², x − x³, e^{c(ω)}y + x²).
struct RandomDiag;

impl Cocycle for RandomDiag {
    fn dim(&self, _: &Realization) -> usize {
        3
    }
    fn step(&self, w: &Realization, z: &DVector<f64>) -> DVector<f64> {
        let (u, x, y) = (z[0], z[1], z[2]);
        let (ea, ec) = (math::exp(w.component(0, 0)), math::exp(w.component(0, 1)));
        v3(ea * u + x * x, x - x * x * x, ec * y + x * x)
    }
    fn differential(&self, w: &Realization, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let x = z[1];
        let (ea, ec) = (math::exp(w.component(0, 0)), math::exp(w.component(0, 1)));
        Some(DMatrix::from_row_slice(3, 3, &[ea, 2.0 * x, 0.0, 0.0, 1.0 - 3.0 * x * x, 0.0, 0.0, 2.0 * x, ec]))
    }
}

/// (x, y) ↦ (x − x³, y/2 + ξ(ω) + x²).
struct AdditiveNoise;

impl Cocycle for AdditiveNoise {
    fn dim(&self, _: &Realization) -> usize {
        2
    }
    fn step(&self, w: &Realization, z: &DVector<f64>) -> DVector<f64> {
        let (x, y) = (z[0], z[1]);
        v2(x - x * x * x, 0.5 * y + w.component(0, 0) + x * x)
    }
    fn differential(&self, _: &Realization, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let x = z[0];
        Some(DMatrix::from_row_slice(2, 2, &[1.0 - 3.0 * x * x, 0.0, 2.0 * x, 0.5]))
    }
}

/// Segment (a, b) = (x_n, x_{n−1}) of x_{n+1} = 1.5x_n − 0.5x_{n−1} − γx_n² + σξ_n x_n x_{n−1}.
struct DelayCompanion {
    gamma: f64,
    sigma: f64,
}

impl Cocycle for DelayCompanion {
    fn dim(&self, _: &Realization) -> usize {
        2
    }
    fn step(&self, w: &Realization, z: &DVector<f64>) -> DVector<f64> {
        let (a, b) = (z[0], z[1]);
        let s = self.sigma * w.component(0, 0);
        v2(1.5 * a - 0.5 * b - self.gamma * a * a + s * a * b, a)
    }
    fn differential(&self, w: &Realization, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let (a, b) = (z[0], z[1]);
        let s = self.sigma * w.component(0, 0);
        Some(DMatrix::from_row_slice(2, 2, &[1.5 - 2.0 * self.gamma * a + s * b, -0.5 + s * a, 1.0, 0.0]))
    }
}

/// Explicit step x + t₀V₀(x) + V(x)ΔX of a smoothly driven ODE, with
/// V₀(x) = (x₁x₂, −x₂ + x₁²), V(x) = (x₁², x₁x₂) and ΔX the increment of
/// A sin(2π·phase) along a rotation.
struct DrivenOde {
    t0: f64,
    amplitude: f64,
}

impl DrivenOde {
    fn increment(&self, w: &Realization) -> f64 {
        let tau = 2.0 * core::f64::consts::PI;
        self.amplitude * (math::sin(tau * w.component(1, 0)) - math::sin(tau * w.component(0, 0)))
    }
}

impl Cocycle for DrivenOde {
    fn dim(&self, _: &Realization) -> usize {
        2
    }
    fn step(&self, w: &Realization, z: &DVector<f64>) -> DVector<f64> {
        let (x1, x2) = (z[0], z[1]);
        let dx = self.increment(w);
        v2(
            x1 + self.t0 * x1 * x2 + dx * x1 * x1,
            x2 + self.t0 * (-x2 + x1 * x1) + dx * x1 * x2,
        )
    }
    fn differential(&self, w: &Realization, z: &DVector<f64>) -> Option<DMatrix<f64>> {
        let (x1, x2) = (z[0], z[1]);
        let dx = self.increment(w);
        let t = self.t0;
        Some(DMatrix::from_row_slice(
            2,
            2,
            &[1.0 + t * x2 + 2.0 * dx * x1, t * x1, 2.0 * t * x1 + dx * x2, 1.0 - t + dx * x1],
        ))
    }
}

const LN2: f64 = core::f64::consts::LN_2;

/// Build one of the [`CATALOG`] systems.
pub fn build_benchmark(name: &str, params: &Params, seed: u64) -> Result<Benchmark> {
    let infinite = constant_scalar(f64::INFINITY);
    match name {
        "det-2d" => {
            take(params, &[])?;
            Ok(Benchmark {
                driver: DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, seed)?,
                cocycle: Arc::new(Det2d),
                stationary: StationaryPoint::zero(2),
                spec: SystemSpec {
                    name: name.into(),
                    description: "(x, y) -> (x + xy, y/2 + x^2)".into(),
                    fiber: FiberSpec::euclidean(2),
                    instantiates: "deterministic planar map with a neutral direction",
                    oracle: Oracle {
                        exponents: vec![0.0, -LN2],
                        exact_exponents: true,
                        series: vec![SeriesOracle { coordinate: 1, terms: vec![(2, 2.0), (4, -16.0), (6, 368.0)] }],
                    },
                },
                modulus: Modulus::new(constant_scalar(1.0), 1.0)?,
                validity: infinite,
            })
        }
        "det-3d" => {
            take(params, &[])?;
            Ok(Benchmark {
                driver: DrivingSystem::new(DriverKind::DeterministicPoint { value: vec![0.0] }, seed)?,
                cocycle: Arc::new(Det3d),
                stationary: StationaryPoint::zero(3),
                spec: SystemSpec {
                    name: name.into(),
                    description: "(u, x, y) -> (2u + x^2, x + xy, y/2 + x^2)".into(),
                    fiber: FiberSpec::euclidean(3),
                    instantiates: "deterministic map with unstable, neutral and stable directions",
                    oracle: Oracle {
                        exponents: vec![LN2, 0.0, -LN2],
                        exact_exponents: true,
                        series: vec![
                            SeriesOracle { coordinate: 0, terms: vec![(2, -1.0), (4, -4.0)] },
                            SeriesOracle { coordinate: 2, terms: vec![(2, 2.0), (4, -16.0)] },
                        ],
                    },
                },
                modulus: Modulus::new(constant_scalar(1.5), 1.0)?,
                validity: infinite,
            })
        }
        "random-diag" => {
            let p = take(params, &[("a_lo", 0.5), ("a_hi", 1.1), ("c_lo", -1.1), ("c_hi", -0.5)])?;
            let (a, c) = (NoiseLaw::Uniform { lo: p[0], hi: p[1] }, NoiseLaw::Uniform { lo: p[2], hi: p[3] });
            if !(a.mean() > 0.0 && c.mean() < 0.0) {
                return Err(invalid("random-diag needs mean(a) > 0 > mean(c)"));
            }
            Ok(Benchmark {
                spec: SystemSpec {
                    name: name.into(),
                    description: "(u, x, y) -> (e^a u + x^2, x - x^3, e^c y + x^2), a, c iid uniform".into(),
                    fiber: FiberSpec::euclidean(3),
                    instantiates: "random linear part with iid hyperbolic rates",
                    oracle: Oracle { exponents: vec![a.mean(), 0.0, c.mean()], exact_exponents: false, series: vec![] },
                },
                driver: DrivingSystem::new(DriverKind::IidSequence { laws: vec![a, c] }, seed)?,
                cocycle: Arc::new(RandomDiag),
                stationary: StationaryPoint::zero(3),
                modulus: Modulus::new(constant_scalar(2.1), 1.0)?,
                validity: constant_scalar(1.0),
            })
        }
        "additive-noise" => {
            let p = take(params, &[("sigma", 0.5)])?;
            let sigma = p[0];
            let stationary = StationaryPoint::new(
                |w: &Realization| {
                    let mut eta = 0.0;
                    for j in (0..60).rev() {
                        eta += libm::ldexp(w.component(-(j as i64) - 1, 0), -j);
                    }
                    v2(0.0, eta)
                },
                1e-12,
            );
            Ok(Benchmark {
                driver: DrivingSystem::new(
                    DriverKind::IidSequence { laws: vec![NoiseLaw::Uniform { lo: -sigma, hi: sigma }] },
                    seed,
                )?,
                cocycle: Arc::new(AdditiveNoise),
                stationary,
                spec: SystemSpec {
                    name: name.into(),
                    description: "(x, y) -> (x - x^3, y/2 + xi + x^2), xi iid uniform".into(),
                    fiber: FiberSpec::euclidean(2),
                    instantiates: "additive noise around a random stationary point",
                    oracle: Oracle {
                        exponents: vec![0.0, -LN2],
                        exact_exponents: true,
                        series: vec![SeriesOracle { coordinate: 1, terms: vec![(2, 2.0)] }],
                    },
                },
                modulus: Modulus::new(constant_scalar(1.85), 1.0)?,
                validity: constant_scalar(1.0),
            })
        }
        "delay-companion" => {
            let p = take(params, &[("gamma", 0.5), ("sigma", 0.4)])?;
            let (gamma, sigma) = (p[0], p[1]);
            let f: RandomScalar = Arc::new(move |w: &Realization| {
                math::abs(gamma) + 0.5 * math::abs(sigma * w.component(-1, 0))
            });
            Ok(Benchmark {
                driver: DrivingSystem::new(
                    DriverKind::IidSequence { laws: vec![NoiseLaw::Uniform { lo: -1.0, hi: 1.0 }] },
                    seed,
                )?,
                cocycle: Arc::new(DelayCompanion { gamma, sigma }),
                stationary: StationaryPoint::zero(2),
                spec: SystemSpec {
                    name: name.into(),
                    description: "segment map of x' = 1.5x - 0.5x_prev - gamma x^2 + sigma xi x x_prev".into(),
                    fiber: FiberSpec::euclidean(2),
                    instantiates: "stochastic delay equation in companion (segment) form",
                    oracle: Oracle { exponents: vec![0.0, -LN2], exact_exponents: true, series: vec![] },
                },
                modulus: Modulus::new(f.clone(), 1.0)?,
                validity: infinite,
            })
        }
        "driven-ode" => {
            let p = take(params, &[("t0", 0.5), ("amplitude", 0.2), ("alpha", 0.618_033_988_749_894_9)])?;
            let (t0, amplitude, alpha) = (p[0], p[1], p[2]);
            if !(t0 > 0.0 && t0 < 1.0) {
                return Err(invalid("driven-ode needs 0 < t0 < 1"));
            }
            let ode = DrivenOde { t0, amplitude };
            let f: RandomScalar = {
                let ode = DrivenOde { t0, amplitude };
                Arc::new(move |w: &Realization| ode.t0 + math::abs(ode.increment(&w.shift(-1))))
            };
            Ok(Benchmark {
                driver: DrivingSystem::new(DriverKind::FiniteRotation { alpha }, seed)?,
                cocycle: Arc::new(ode),
                stationary: StationaryPoint::zero(2),
                spec: SystemSpec {
                    name: name.into(),
                    description: "explicit step of x' = V0(x) + V(x) dX with a smooth quasi-periodic driver".into(),
                    fiber: FiberSpec::euclidean(2),
                    instantiates: "ODE driven by a smooth path, sampled at a fixed time step",
                    oracle: Oracle { exponents: vec![0.0, math::ln(1.0 - t0)], exact_exponents: true, series: vec![] },
                },
                modulus: Modulus::new(f, 1.0)?,
                validity: infinite,
            })
        }
        other => Err(invalid(format!("unknown benchmark '{other}' (known: {})", CATALOG.join(", ")))),
    }
}
