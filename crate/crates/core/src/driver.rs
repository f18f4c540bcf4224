//! Ergodic driving systems realized as seeded bi-infinite symbol sequences.
//!
//! Symbols are produced by a counter-based generator: the value at absolute
//! time `t` and component `k` is a pure function of `(seed, k, t)`, so shifts
//! are integer offsets and negative times need no pre-simulation.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::math;

/// Marginal law of one iid symbol component.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NoiseLaw {
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// `±scale` with probability 1/2 each.
    Sign { scale: f64 },
}

impl NoiseLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            NoiseLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            NoiseLaw::Sign { .. } => 0.0,
        }
    }

    pub fn std_dev(&self) -> f64 {
        match *self {
            NoiseLaw::Uniform { lo, hi } => (hi - lo) / math::sqrt(12.0),
            NoiseLaw::Sign { scale } => math::abs(scale),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            NoiseLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            NoiseLaw::Sign { scale } => {
                if rng.next_u64() >> 63 == 0 {
                    scale
                } else {
                    -scale
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            NoiseLaw::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && lo <= hi => Ok(()),
            NoiseLaw::Sign { scale } if scale.is_finite() => Ok(()),
            _ => Err(invalid("noise law parameters must be finite with lo <= hi")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DriverKind {
    /// Bernoulli shift over iid symbols, one law per component.
    IidSequence { laws: Vec<NoiseLaw> },
    /// Irrational rotation `phase ↦ phase + alpha mod 1`; the initial phase
    /// is drawn from the seed.
    FiniteRotation { alpha: f64 },
    /// One-point probability space; every symbol equals `value`.
    DeterministicPoint { value: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct DrivingSystem {
    kind: DriverKind,
    seed: u64,
    phase0: f64,
    template: ChaCha8Rng,
}

impl PartialEq for DrivingSystem {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.seed == other.seed
    }
}

const PHASE_STREAM: u64 = u64::MAX;

impl DrivingSystem {
    pub fn new(kind: DriverKind, seed: u64) -> Result<Self> {
        match &kind {
            DriverKind::IidSequence { laws } => {
                if laws.is_empty() {
                    return Err(invalid("iid driver needs at least one component"));
                }
                for l in laws {
                    l.validate()?;
                }
            }
            DriverKind::FiniteRotation { alpha } => {
                if !alpha.is_finite() {
                    return Err(invalid("rotation number must be finite"));
                }
            }
            DriverKind::DeterministicPoint { value } => {
                if value.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("deterministic point must be finite"));
                }
            }
        }
        let template = ChaCha8Rng::seed_from_u64(seed);
        let mut rng = template.clone();
        rng.set_stream(PHASE_STREAM);
        let phase0 = rng.random::<f64>();
        Ok(DrivingSystem { kind, seed, phase0, template })
    }

    pub fn kind(&self) -> &DriverKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of real components per symbol.
    pub fn symbol_dim(&self) -> usize {
        match &self.kind {
            DriverKind::IidSequence { laws } => laws.len(),
            DriverKind::FiniteRotation { .. } => 1,
            DriverKind::DeterministicPoint { value } => value.len(),
        }
    }

    /// The base realization ω (offset 0).
    pub fn realization(&self) -> Realization {
        Realization { driver: Arc::new(self.clone()), offset: 0 }
    }

    fn component_at(&self, t: i64, k: usize) -> f64 {
        match &self.kind {
            DriverKind::IidSequence { laws } => {
                let mut rng = self.template.clone();
                rng.set_stream(k as u64);
                rng.set_word_pos(u128::from(zigzag(t)) * 4);
                laws[k].sample(&mut rng)
            }
            DriverKind::FiniteRotation { alpha } => math::frac(self.phase0 + t as f64 * alpha),
            DriverKind::DeterministicPoint { value } => value[k],
        }
    }
}

fn zigzag(t: i64) -> u64 {
    ((t << 1) ^ (t >> 63)) as u64
}

/// A point θ^offset ω of the driving orbit.
#[derive(Clone, Debug)]
pub struct Realization {
    driver: Arc<DrivingSystem>,
    offset: i64,
}

impl PartialEq for Realization {
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset && *self.driver == *other.driver
    }
}

impl Realization {
    /// θ^j applied to this realization.
    pub fn shift(&self, j: i64) -> Realization {
        Realization { driver: Arc::clone(&self.driver), offset: self.offset + j }
    }

    /// Absolute offset from the driver's base point.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn driver(&self) -> &DrivingSystem {
        &self.driver
    }

    pub fn symbol_dim(&self) -> usize {
        self.driver.symbol_dim()
    }

    /// Component `k` of the symbol at relative index `j`.
    pub fn component(&self, j: i64, k: usize) -> f64 {
        assert!(k < self.symbol_dim(), "symbol component out of range");
        self.driver.component_at(self.offset + j, k)
    }

    /// Full symbol at relative index `j`.
    pub fn symbol(&self, j: i64) -> Vec<f64> {
        (0..self.symbol_dim()).map(|k| self.component(j, k)).collect()
    }

    /// Rotation phase of this point; `None` for other driver kinds.
    pub fn phase(&self) -> Option<f64> {
        match self.driver.kind {
            DriverKind::FiniteRotation { .. } => Some(self.component(0, 0)),
            _ => None,
        }
    }
}

/// (1/n) Σ_{j<n} g(symbol_j).
pub fn birkhoff_average<G: Fn(&[f64]) -> f64>(g: G, omega: &Realization, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("birkhoff_average needs n >= 1"));
    }
    let mut buf = Vec::with_capacity(omega.symbol_dim());
    let mut acc = 0.0;
    for j in 0..n {
        buf.clear();
        buf.extend((0..omega.symbol_dim()).map(|k| omega.component(j as i64, k)));
        acc += g(&buf);
    }
    Ok(acc / n as f64)
}

/// Eagerly materialized symbols of one realization, stored as two one-sided
/// arrays so the window can grow in either direction.
#[derive(Clone, Debug)]
pub struct NoiseTape {
    omega: Realization,
    nonneg: Vec<Vec<f64>>,
    neg: Vec<Vec<f64>>,
}

impl NoiseTape {
    pub fn new(omega: &Realization) -> Self {
        NoiseTape { omega: omega.clone(), nonneg: Vec::new(), neg: Vec::new() }
    }

    /// Materialize at least the indices `lo..=hi`.
    pub fn extend(&mut self, lo: i64, hi: i64) {
        while (self.nonneg.len() as i64) <= hi {
            let j = self.nonneg.len() as i64;
            self.nonneg.push(self.omega.symbol(j));
        }
        while -(self.neg.len() as i64) > lo {
            let j = -(self.neg.len() as i64) - 1;
            self.neg.push(self.omega.symbol(j));
        }
    }

    /// Cached symbol at index `j`, if materialized.
    pub fn get(&self, j: i64) -> Option<&[f64]> {
        if j >= 0 {
            self.nonneg.get(j as usize).map(|v| v.as_slice())
        } else {
            self.neg.get((-j - 1) as usize).map(|v| v.as_slice())
        }
    }

    pub fn window(&self) -> (i64, i64) {
        (-(self.neg.len() as i64), self.nonneg.len() as i64 - 1)
    }
}
