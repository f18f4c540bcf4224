//! Numerical multiplicative ergodic theorem: exponents, the U/C/S splitting,
//! oblique projections, restricted inverses and growth constants.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::LinearCocycle;
use crate::driver::Realization;
use crate::error::{invalid, numerical, Error, Result};
use crate::linalg;
use crate::math;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LyapunovSpectrum {
    /// Clustered exponents, strictly decreasing.
    pub exponents: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Unclustered top-k exponents, decreasing.
    pub raw: Vec<f64>,
    pub gap_threshold: f64,
    pub steps: usize,
    /// Fiber dimension at the base point.
    pub dim: usize,
}

impl LyapunovSpectrum {
    /// Cluster decreasing raw exponents: neighbours closer than `gap` merge.
    pub fn from_raw(mut raw: Vec<f64>, gap: f64, steps: usize, dim: usize) -> Self {
        raw.sort_by(|a, b| b.total_cmp(a));
        let mut exponents = Vec::new();
        let mut multiplicities = Vec::new();
        let mut i = 0;
        while i < raw.len() {
            let mut j = i + 1;
            while j < raw.len() && raw[j - 1] - raw[j] < gap {
                j += 1;
            }
            exponents.push(raw[i..j].iter().sum::<f64>() / (j - i) as f64);
            multiplicities.push(j - i);
            i = j;
        }
        LyapunovSpectrum { exponents, multiplicities, raw, gap_threshold: gap, steps, dim }
    }

    /// Cluster index i_c of the zero exponent (|μ| < gap/2).
    pub fn zero_index(&self) -> Option<usize> {
        let half = 0.5 * self.gap_threshold;
        self.exponents
            .iter()
            .enumerate()
            .filter(|(_, m)| math::abs(**m) < half)
            .min_by(|a, b| math::abs(*a.1).total_cmp(&math::abs(*b.1)))
            .map(|(i, _)| i)
    }

    /// μ⁺: smallest exponent above the center cluster, +∞ if U is empty.
    pub fn mu_plus(&self) -> f64 {
        match self.zero_index() {
            Some(ic) if ic > 0 => self.exponents[ic - 1],
            _ => f64::INFINITY,
        }
    }

    /// μ⁻: largest exponent below the center cluster, −∞ if none was computed.
    pub fn mu_minus(&self) -> f64 {
        match self.zero_index() {
            Some(ic) if ic + 1 < self.exponents.len() => self.exponents[ic + 1],
            _ => f64::NEG_INFINITY,
        }
    }

    /// (dim U, dim C).
    pub fn center_dims(&self) -> Result<(usize, usize)> {
        let ic = self.zero_index().ok_or(Error::NoCenterExponent)?;
        Ok((self.multiplicities[..ic].iter().sum(), self.multiplicities[ic]))
    }
}

/// Top-k exponents by pushing the first k identity columns forward with a
/// QR re-orthonormalization at every step.
pub fn lyapunov_spectrum(
    psi: &dyn LinearCocycle,
    omega: &Realization,
    k: usize,
    n: usize,
    gap: f64,
) -> Result<LyapunovSpectrum> {
    if n == 0 {
        return Err(invalid("spectrum needs n >= 1 steps"));
    }
    if !(gap > 0.0) {
        return Err(invalid("gap threshold must be positive"));
    }
    let m0 = psi.matrix(omega)?;
    let d = m0.ncols();
    if k == 0 || k > d {
        return Err(invalid(format!("k = {k} must lie in 1..={d}")));
    }
    let mut q = DMatrix::<f64>::identity(d, k);
    let mut sums = vec![0.0; k];
    let mut a = m0;
    for j in 0..n {
        if j > 0 {
            a = psi.matrix(&omega.shift(j as i64))?;
        }
        if a.ncols() != q.nrows() || a.nrows() < k {
            return Err(invalid(format!("fiber dimension mismatch at orbit index {j}")));
        }
        let z = &a * &q;
        if !linalg::all_finite(&z) {
            return Err(numerical(format!("non-finite frame at orbit index {j}")));
        }
        let (qn, stretch) = linalg::qr_stretch(z);
        for (s, r) in sums.iter_mut().zip(&stretch) {
            if !(*r > 0.0) {
                return Err(numerical(format!("frame collapsed at orbit index {j}")));
            }
            *s += math::ln(*r);
        }
        q = qn;
    }
    let raw = sums.into_iter().map(|s| s / n as f64).collect();
    Ok(LyapunovSpectrum::from_raw(raw, gap, n, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Subspace {
    Unstable,
    Center,
    Stable,
}

#[derive(Clone, Debug)]
pub struct SplitSettings {
    /// Splitting is computed on orbit indices [−half_width, half_width].
    pub half_width: usize,
    /// Extra forward matrices kept beyond the window (for growth constants).
    pub forward_margin: usize,
    pub cauchy_tol: f64,
    pub initial_horizon: usize,
    pub max_horizon: usize,
    pub seed: u64,
}

impl Default for SplitSettings {
    fn default() -> Self {
        SplitSettings {
            half_width: 100,
            forward_margin: 64,
            cauchy_tol: 1e-9,
            initial_horizon: 16,
            max_horizon: 1 << 14,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IndexFrames {
    pub unstable: DMatrix<f64>,
    pub center: DMatrix<f64>,
    pub stable: DMatrix<f64>,
    /// Orthonormal basis of U ⊕ C.
    pub fast: DMatrix<f64>,
    pub proj_u: DMatrix<f64>,
    pub proj_c: DMatrix<f64>,
    pub proj_s: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct OseledetsSplitting {
    lo: i64,
    hi: i64,
    k_u: usize,
    k_c: usize,
    mu_plus: f64,
    mu_minus: f64,
    frames: Vec<IndexFrames>,
    /// ψ_m for m ∈ [lo, hi + forward_margin].
    psi: Vec<DMatrix<f64>>,
    /// One-step inverse of ψ_m on U⊕C, E_{m+1} → E_m, for m ∈ [lo, hi−1].
    rinv: Vec<DMatrix<f64>>,
    forward_horizon: usize,
    adjoint_horizon: usize,
}

fn random_frame(rng: &mut ChaCha8Rng, d: usize, p: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, p, |_, _| rng.random::<f64>() * 2.0 - 1.0);
    linalg::orthonormalize(&m)
}

/// Push a p-frame forward from index `from` to `to` (from ≤ to).
fn push_forward(psi: &dyn LinearCocycle, omega: &Realization, from: i64, to: i64, frame: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut q = frame;
    for m in from..to {
        let a = psi.matrix(&omega.shift(m))?;
        q = linalg::qr_stretch(a * q).0;
    }
    Ok(q)
}

/// Pull a p-frame of the adjoint cocycle back from index `from` to `to`
/// (to ≤ from).
fn pull_adjoint(psi: &dyn LinearCocycle, omega: &Realization, from: i64, to: i64, frame: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut q = frame;
    let mut m = from;
    while m > to {
        m -= 1;
        let a = psi.matrix(&omega.shift(m))?;
        q = linalg::qr_stretch(a.transpose() * q).0;
    }
    Ok(q)
}

fn frame_increment(a: &DMatrix<f64>, b: &DMatrix<f64>, k_first: usize) -> f64 {
    let af = linalg::orthonormalize(&a.columns(0, k_first).into_owned());
    let bf = linalg::orthonormalize(&b.columns(0, k_first).into_owned());
    linalg::sin_angle(a, b).max(linalg::sin_angle(&af, &bf))
}

/// Find a horizon n for which frames started n and 2n steps away agree.
fn converge<F>(settings: &SplitSettings, k_first: usize, mut frame_at: F) -> Result<(usize, DMatrix<f64>)>
where
    F: FnMut(usize) -> Result<DMatrix<f64>>,
{
    let mut n = settings.initial_horizon.max(1);
    let mut prev = frame_at(n)?;
    let mut increment = f64::INFINITY;
    while 2 * n <= settings.max_horizon {
        let next = frame_at(2 * n)?;
        increment = frame_increment(&prev, &next, k_first);
        if increment < settings.cauchy_tol {
            return Ok((2 * n, next));
        }
        prev = next;
        n *= 2;
    }
    Err(Error::SplittingNotConverged { increment, horizon: n })
}

pub fn oseledets_split(
    psi: &dyn LinearCocycle,
    omega: &Realization,
    spectrum: &LyapunovSpectrum,
    settings: &SplitSettings,
) -> Result<OseledetsSplitting> {
    let (k_u, k_c) = spectrum.center_dims()?;
    let p = k_u + k_c;
    let lo = -(settings.half_width as i64);
    let hi = settings.half_width as i64;
    let dim_at = |m: i64| -> Result<usize> { Ok(psi.matrix(&omega.shift(m))?.ncols()) };

    let seed = settings.seed;
    let fwd_start = |n: usize| -> Result<DMatrix<f64>> {
        let start = lo - n as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_frame(&mut rng, dim_at(start)?, p);
        push_forward(psi, omega, start, lo, g)
    };
    let (forward_horizon, _) = converge(settings, k_u.max(1).min(p), fwd_start)?;
    let adj_start = |n: usize| -> Result<DMatrix<f64>> {
        let start = hi + n as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xad10);
        let g = random_frame(&mut rng, dim_at(start)?, p);
        pull_adjoint(psi, omega, start, hi, g)
    };
    let (adjoint_horizon, _) = converge(settings, k_u.max(1).min(p), adj_start)?;

    let width = (hi - lo + 1) as usize;
    let mut psis = Vec::with_capacity(width + settings.forward_margin);
    for m in lo..=hi + settings.forward_margin as i64 {
        psis.push(psi.matrix(&omega.shift(m))?);
    }

    // forward frames W_m (first k_u columns span U_m)
    let mut fast = Vec::with_capacity(width);
    {
        let start = lo - forward_horizon as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_frame(&mut rng, dim_at(start)?, p);
        let mut q = push_forward(psi, omega, start, lo, g)?;
        fast.push(q.clone());
        for m in lo..hi {
            q = linalg::qr_stretch(&psis[(m - lo) as usize] * q).0;
            fast.push(q.clone());
        }
    }
    // adjoint frames B_m (first k_u columns annihilate C⊕S, all annihilate S)
    let mut adjoint = vec![DMatrix::zeros(0, 0); width];
    {
        let start = hi + adjoint_horizon as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xad10);
        let g = random_frame(&mut rng, dim_at(start)?, p);
        let mut q = pull_adjoint(psi, omega, start, hi, g)?;
        adjoint[width - 1] = q.clone();
        for m in (lo..hi).rev() {
            q = linalg::qr_stretch(psis[(m - lo) as usize].transpose() * q).0;
            adjoint[(m - lo) as usize] = q.clone();
        }
    }

    let mut frames = Vec::with_capacity(width);
    for (w, b) in fast.iter().zip(&adjoint) {
        let d = w.nrows();
        let mut unstable = w.columns(0, k_u).into_owned();
        linalg::canonical_signs(&mut unstable);
        let fast_basis = linalg::orthonormalize(w);
        let center = if k_u == 0 {
            fast_basis.clone()
        } else {
            let bu = b.columns(0, k_u).into_owned();
            let coeff = linalg::null_space(&(bu.transpose() * w), k_c);
            linalg::orthonormalize(&(w * coeff))
        };
        let stable = linalg::complement(b);
        let mut basis = DMatrix::zeros(d, d);
        basis.view_mut((0, 0), (d, k_u)).copy_from(&unstable);
        basis.view_mut((0, k_u), (d, k_c)).copy_from(&center);
        basis.view_mut((0, p), (d, d - p)).copy_from(&stable);
        let inv = linalg::inverse(&basis, "splitting basis [U|C|S]")?;
        let proj = |c0: usize, k: usize| -> DMatrix<f64> { basis.columns(c0, k) * inv.rows(c0, k) };
        frames.push(IndexFrames {
            proj_u: proj(0, k_u),
            proj_c: proj(k_u, k_c),
            proj_s: proj(p, d - p),
            unstable,
            center,
            stable,
            fast: fast_basis,
        });
    }

    let mut rinv = Vec::with_capacity(width.saturating_sub(1));
    for m in lo..hi {
        let i = (m - lo) as usize;
        let w = &frames[i].fast;
        let img = &psis[i] * w;
        rinv.push(w * linalg::left_inverse(&img, "restricted inverse")?);
    }

    Ok(OseledetsSplitting {
        lo,
        hi,
        k_u,
        k_c,
        mu_plus: spectrum.mu_plus(),
        mu_minus: spectrum.mu_minus(),
        frames,
        psi: psis,
        rinv,
        forward_horizon,
        adjoint_horizon,
    })
}

impl OseledetsSplitting {
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Last index m with ψ_m stored.
    pub fn psi_hi(&self) -> i64 {
        self.lo + self.psi.len() as i64 - 1
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.k_u, self.k_c)
    }

    pub fn mu_plus(&self) -> f64 {
        self.mu_plus
    }

    pub fn mu_minus(&self) -> f64 {
        self.mu_minus
    }

    pub fn horizons(&self) -> (usize, usize) {
        (self.forward_horizon, self.adjoint_horizon)
    }

    pub fn frames(&self, n: i64) -> Result<&IndexFrames> {
        if n < self.lo || n > self.hi {
            return Err(invalid(format!(
                "orbit index {n} outside splitting window [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(&self.frames[(n - self.lo) as usize])
    }

    pub fn psi(&self, n: i64) -> Result<&DMatrix<f64>> {
        if n < self.lo || n > self.psi_hi() {
            return Err(invalid(format!("no linearization stored at orbit index {n}")));
        }
        Ok(&self.psi[(n - self.lo) as usize])
    }

    /// One-step restricted inverse E_{n+1} → E_n on U⊕C.
    pub fn rinv(&self, n: i64) -> Result<&DMatrix<f64>> {
        if n < self.lo || n >= self.hi {
            return Err(invalid(format!("no restricted inverse stored at orbit index {n}")));
        }
        Ok(&self.rinv[(n - self.lo) as usize])
    }

    pub fn projection(&self, which: Subspace, n: i64) -> Result<&DMatrix<f64>> {
        let f = self.frames(n)?;
        Ok(match which {
            Subspace::Unstable => &f.proj_u,
            Subspace::Center => &f.proj_c,
            Subspace::Stable => &f.proj_s,
        })
    }

    pub fn basis(&self, which: Subspace, n: i64) -> Result<&DMatrix<f64>> {
        let f = self.frames(n)?;
        Ok(match which {
            Subspace::Unstable => &f.unstable,
            Subspace::Center => &f.center,
            Subspace::Stable => &f.stable,
        })
    }

    /// Oblique projection onto `which` along the other two subspaces.
    pub fn project(&self, which: Subspace, n: i64, v: &DVector<f64>) -> Result<DVector<f64>> {
        let p = self.projection(which, n)?;
        if p.ncols() != v.len() {
            return Err(invalid("vector dimension does not match the fiber"));
        }
        Ok(p * v)
    }

    /// ψ^{−steps} on U⊕C starting at index `n_from`.
    pub fn restricted_inverse(&self, n_from: i64, steps: usize, v: &DVector<f64>) -> Result<DVector<f64>> {
        let s = self.project(Subspace::Stable, n_from, v)?;
        let scale = v.norm();
        let rel = if scale > 0.0 { s.norm() / scale } else { 0.0 };
        if rel > 1e-8 {
            return Err(Error::NotInvertibleDirection(rel));
        }
        let mut x = v - s;
        for j in 1..=steps as i64 {
            x = self.rinv(n_from - j)? * x;
            if !linalg::vec_finite(&x) {
                return Err(numerical("restricted inverse produced non-finite values"));
            }
        }
        Ok(x)
    }

    /// sin of the principal angle between ψ_m X_m and X_{m+1} for
    /// X ∈ {U, C, S, U⊕C}, for m ∈ [lo, hi−1].
    pub fn equivariance_angles(&self) -> Vec<(i64, [f64; 4])> {
        let mut out = Vec::new();
        for m in self.lo..self.hi {
            let a = &self.frames[(m - self.lo) as usize];
            let b = &self.frames[(m - self.lo + 1) as usize];
            let psi = &self.psi[(m - self.lo) as usize];
            let ang = |x: &DMatrix<f64>, y: &DMatrix<f64>| -> f64 {
                if x.ncols() == 0 {
                    return 0.0;
                }
                linalg::sin_angle(&linalg::orthonormalize(&(psi * x)), y)
            };
            out.push((
                m,
                [
                    ang(&a.unstable, &b.unstable),
                    ang(&a.center, &b.center),
                    ang(&a.stable, &b.stable),
                    ang(&a.fast, &b.fast),
                ],
            ));
        }
        out
    }

    /// (m, ‖Π_U‖, ‖Π_C‖, ‖Π_S‖) over the window.
    pub fn projection_norms(&self) -> Vec<(i64, [f64; 3])> {
        (self.lo..=self.hi)
            .zip(&self.frames)
            .map(|(m, f)| {
                (
                    m,
                    [
                        linalg::spectral_norm(&f.proj_u),
                        linalg::spectral_norm(&f.proj_c),
                        linalg::spectral_norm(&f.proj_s),
                    ],
                )
            })
            .collect()
    }

    /// Least-squares slopes of log‖Π_X‖ against the orbit index
    /// (U, C, S; empty subspaces report 0).
    pub fn projection_slopes(&self) -> [f64; 3] {
        let norms = self.projection_norms();
        let xs: Vec<f64> = norms.iter().map(|(m, _)| *m as f64).collect();
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            if norms.iter().any(|(_, v)| v[k] == 0.0) {
                continue;
            }
            let ys: Vec<f64> = norms.iter().map(|(_, v)| math::ln(v[k])).collect();
            *o = math::ls_slope(&xs, &ys);
        }
        out
    }

    /// F-constants over orbit indices [a, b], horizon `n_f`.
    pub fn growth_constants(&self, eps: f64, n_f: usize, safety: f64, a: i64, b: i64) -> Result<GrowthConstants> {
        if !(eps > 0.0) {
            return Err(invalid("epsilon must be positive"));
        }
        if n_f == 0 {
            return Err(invalid("growth horizon must be >= 1"));
        }
        if !(safety >= 1.0) {
            return Err(invalid("safety factor must be >= 1"));
        }
        let nf = n_f as i64;
        if a > b || a - nf < self.lo || b > self.hi || b + nf - 1 > self.psi_hi() {
            return Err(invalid(format!(
                "growth constants on [{a}, {b}] with horizon {n_f} exceed the splitting window [{}, {}] (+{} forward)",
                self.lo,
                self.hi,
                self.psi_hi() - self.hi
            )));
        }
        let mut values = Vec::with_capacity((b - a + 1) as usize);
        for m in a..=b {
            let f = self.frames(m)?;
            let fwd = |basis: &DMatrix<f64>, rate: f64| -> f64 {
                if basis.ncols() == 0 {
                    return 0.0;
                }
                let mut x = basis.clone();
                let mut best: f64 = 1.0;
                for n in 1..=nf {
                    x = &self.psi[(m + n - 1 - self.lo) as usize] * x;
                    best = best.max(linalg::spectral_norm(&x) * math::exp(-(n as f64) * rate));
                }
                best
            };
            let bwd = |basis: &DMatrix<f64>, rate: f64| -> f64 {
                if basis.ncols() == 0 {
                    return 0.0;
                }
                let mut x = basis.clone();
                let mut best: f64 = 1.0;
                for s in 1..=nf {
                    x = &self.rinv[(m - s - self.lo) as usize] * x;
                    best = best.max(linalg::spectral_norm(&x) * math::exp(s as f64 * rate));
                }
                best
            };
            let fs = if f.stable.ncols() == 0 { 0.0 } else { fwd(&f.stable, self.mu_minus + eps) };
            let fu = if self.k_u == 0 { 0.0 } else { bwd(&f.unstable, self.mu_plus - eps) };
            let fc1 = fwd(&f.center, eps);
            let fcm1 = bwd(&f.center, -eps);
            for v in [fs, fu, fc1, fcm1] {
                if !v.is_finite() {
                    return Err(numerical(format!("non-finite growth constant at orbit index {m}")));
                }
            }
            values.push([fs, fu, fc1, fcm1]);
        }
        Ok(GrowthConstants { eps, n_f, safety, lo: a, values })
    }
}

/// Per-index F^S, F^U, F^{C,1}, F^{C,−1} (raw suprema; accessors apply the
/// safety factor).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrowthConstants {
    pub eps: f64,
    pub n_f: usize,
    pub safety: f64,
    pub lo: i64,
    pub values: Vec<[f64; 4]>,
}

impl GrowthConstants {
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    fn get(&self, m: i64, k: usize) -> Result<f64> {
        if m < self.lo || m > self.hi() {
            return Err(invalid(format!("no growth constants at orbit index {m}")));
        }
        Ok(self.values[(m - self.lo) as usize][k] * self.safety)
    }

    pub fn f_s(&self, m: i64) -> Result<f64> {
        self.get(m, 0)
    }

    pub fn f_u(&self, m: i64) -> Result<f64> {
        self.get(m, 1)
    }

    pub fn f_c_fwd(&self, m: i64) -> Result<f64> {
        self.get(m, 2)
    }

    pub fn f_c_bwd(&self, m: i64) -> Result<f64> {
        self.get(m, 3)
    }

    pub fn f_c_max(&self, m: i64) -> Result<f64> {
        Ok(self.f_c_fwd(m)?.max(self.f_c_bwd(m)?))
    }
}
