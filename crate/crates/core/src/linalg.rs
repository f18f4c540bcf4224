//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{numerical, Result};
use crate::math;

/// Orthonormal basis of the column span of `m` (assumed full column rank),
/// with canonical column signs.
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let mut q = m.clone().qr().q();
    canonical_signs(&mut q);
    q
}

/// Thin QR returning (Q, |diag R|) without sign normalization. Used by the
/// exponent sweep where only the stretch factors matter.
pub fn qr_stretch(m: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let k = m.ncols();
    let qr = m.qr();
    let r = qr.r();
    let diag = (0..k).map(|i| math::abs(r[(i, i)])).collect();
    (qr.q(), diag)
}

/// Flip each column so that its largest-magnitude entry is positive.
pub fn canonical_signs(q: &mut DMatrix<f64>) {
    for j in 0..q.ncols() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for i in 0..q.nrows() {
            // small slack so near-ties resolve to the first index deterministically
            let a = math::abs(q[(i, j)]);
            if a > best_abs * (1.0 + 1e-12) {
                best_abs = a;
                best = i;
            }
        }
        if q[(best, j)] < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.ncols() == 1 {
        return m.column(0).norm();
    }
    m.singular_values().max()
}

/// Sine of the largest principal angle from span(a) to span(b), both given
/// by orthonormal columns: ‖(I − b bᵀ) a‖₂.
pub fn sin_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    let resid = a - b * (b.transpose() * a);
    spectral_norm(&resid)
}

/// Orthonormal basis of the orthogonal complement of span(q) in ℝ^d.
pub fn complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let d = q.nrows();
    let p = q.ncols();
    if p == 0 {
        return DMatrix::identity(d, d);
    }
    if p >= d {
        return DMatrix::zeros(d, 0);
    }
    let mut aug = DMatrix::zeros(d, p + d);
    aug.view_mut((0, 0), (d, p)).copy_from(q);
    aug.view_mut((0, p), (d, d)).fill_with_identity();
    let full = aug.qr().q();
    let mut c = full.columns(p, d - p).into_owned();
    canonical_signs(&mut c);
    c
}

/// Orthonormal basis for the `dim`-dimensional (numerical) null space of `m`.
pub fn null_space(m: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let k = m.ncols();
    if dim == 0 {
        return DMatrix::zeros(k, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(k, k).columns(0, dim).into_owned();
    }
    let gram = m.transpose() * m;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut out = DMatrix::zeros(k, dim);
    for (c, &i) in order.iter().take(dim).enumerate() {
        out.set_column(c, &eig.eigenvectors.column(i));
    }
    orthonormalize(&out)
}

/// Inverse of a square matrix with a crude conditioning guard.
pub fn inverse(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let sv = m.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > 1e-13 * smax) || !smax.is_finite() {
        return Err(numerical(alloc::format!(
            "{what} is singular or ill-conditioned (sigma_min/sigma_max = {:e})",
            smin / smax
        )));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| numerical(alloc::format!("{what} is singular")))
}

/// Left inverse of the full-column-rank product `a`, returned as R⁻¹Qᵀ.
pub fn left_inverse(a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let k = a.ncols();
    if k == 0 {
        return Ok(DMatrix::zeros(0, a.nrows()));
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let mut rmax: f64 = 0.0;
    let mut rmin = f64::INFINITY;
    for i in 0..k {
        let v = math::abs(r[(i, i)]);
        rmax = rmax.max(v);
        rmin = rmin.min(v);
    }
    if !(rmin > 1e-13 * rmax) || !rmax.is_finite() {
        return Err(numerical(alloc::format!(
            "{what}: image basis ill-conditioned (|r_min|/|r_max| = {:e})",
            rmin / rmax
        )));
    }
    let rinv = r
        .try_inverse()
        .ok_or_else(|| numerical(alloc::format!("{what}: triangular factor singular")))?;
    Ok(rinv * qr.q().transpose())
}

pub fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub fn vec_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}
