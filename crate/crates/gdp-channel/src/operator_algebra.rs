//! Dense complex small-matrix kernels shared by the rest of the crate.
//!
//! Everything here is specialized to the 2x2 (single qubit) and 4x4 (qubit
//! pair, superoperator) cases; there is no ambition towards general
//! n-dimensional linear algebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Small dense complex matrix, 2x2 or 4x4.
pub type CMat = DMatrix<C64>;

/// Hermiticity check tolerance used by [`herm_eig`].
pub const HERM_TOL: f64 = 1e-10;
/// Eigenvalues of nominally-PSD matrices below this are hard errors.
pub const PSD_ERR: f64 = -1e-8;
/// Eigenvalues in [PSD_ERR, 0) are treated as rounding noise and clipped.
pub const PSD_CLIP: f64 = -1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-entry deviation from Hermiticity.
pub fn herm_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Hilbert-Schmidt orthonormal basis (I, sx, sy, sz) / sqrt(2) of the 2x2
/// Hermitian operators; tr(G_k G_l) = delta_kl.
pub struct HermBasis {
    pub elements: [CMat; 4],
}

impl HermBasis {
    pub fn standard() -> Self {
        let s = c(1.0 / f64::sqrt(2.0), 0.0);
        HermBasis {
            elements: [
                identity(2) * s,
                sigma_x() * s,
                sigma_y() * s,
                sigma_z() * s,
            ],
        }
    }
}

/// Hilbert-Schmidt inner product tr(a^dag b).
pub fn hs_inner(a: &CMat, b: &CMat) -> Result<C64> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come out sorted descending. Each eigenvector has its
/// largest-modulus component rotated to be real and positive so the
/// decomposition is reproducible run to run.
pub fn herm_eig(m: &CMat) -> Result<(Vec<f64>, Vec<DVector<C64>>)> {
    let defect = herm_defect(m);
    if defect > HERM_TOL {
        return Err(Error::NotHermitian(defect));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let mut vals = Vec::with_capacity(n);
    let mut vecs = Vec::with_capacity(n);
    for &i in &order {
        vals.push(eig.eigenvalues[i]);
        let mut v: DVector<C64> = eig.eigenvectors.column(i).into_owned();
        // deterministic phase fixing: largest-modulus component real-positive
        let mut imax = 0;
        let mut best = 0.0;
        for (k, z) in v.iter().enumerate() {
            if z.norm() > best + 1e-15 {
                best = z.norm();
                imax = k;
            }
        }
        if best > 0.0 {
            let phase = v[imax] / best;
            v *= phase.conj();
        }
        v /= c(v.norm(), 0.0);
        vecs.push(v);
    }
    Ok((vals, vecs))
}

/// Matrix exponential e^{m s} by scaling-and-squaring with a Taylor core.
///
/// Relative accuracy better than 1e-12 for ||m s||_1 up to ~100.
pub fn mat_exp(m: &CMat, s: f64) -> Result<CMat> {
    let a = m * c(s, 0.0);
    let norm1 = one_norm(&a);
    if norm1 > 700.0 {
        return Err(Error::ExpRange(norm1));
    }
    let n = a.nrows();
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &a * c(0.5f64.powi(squarings as i32), 0.0);
    let mut acc = identity(n);
    let mut term = identity(n);
    for j in 1..=40u32 {
        term = (&term * &scaled) * c(1.0 / f64::from(j), 0.0);
        acc += &term;
        if max_abs(&term) < 1e-18 * max_abs(&acc).max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    Ok(acc)
}

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum())
        .fold(0.0, f64::max)
}

/// Hermitian PSD square root: returns r with r r = m.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    let (vals, vecs) = herm_eig(m)?;
    if let Some(&min) = vals.last() {
        if min < PSD_ERR {
            return Err(Error::NotPositive(min));
        }
    }
    let n = m.nrows();
    let mut r = CMat::zeros(n, n);
    for (lam, v) in vals.iter().zip(vecs.iter()) {
        let l = lam.max(0.0).sqrt();
        r += (v * v.adjoint()) * c(l, 0.0);
    }
    Ok(r)
}

/// Trace norm: sum of singular values, tr sqrt(m^dag m).
pub fn trace_norm(m: &CMat) -> f64 {
    let mtm = m.adjoint() * m;
    // m^dag m is Hermitian PSD by construction
    let (vals, _) = herm_eig(&mtm).expect("m^dag m Hermitian");
    vals.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// Kronecker product of two 2x2 matrices; qubit 1 is the left factor.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != 2 || b.nrows() != 2 {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(a.kronecker(b))
}

/// Hermitian, unit-trace, positive-semidefinite state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        let defect = herm_defect(&mat);
        if defect > 1e-12 {
            return Err(Error::NotHermitian(defect));
        }
        let tr: C64 = mat.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NotNormalized((tr - c(1.0, 0.0)).norm()));
        }
        let (vals, _) = herm_eig(&mat)?;
        if let Some(&min) = vals.last() {
            if min < PSD_CLIP {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(DensityMatrix { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: identity(dim) * c(1.0 / dim as f64, 0.0),
        }
    }

    /// Pure state |psi><psi| from a normalized vector.
    pub fn pure(psi: &DVector<C64>) -> Result<Self> {
        let dev = (psi.norm() - 1.0).abs();
        if dev > 1e-10 {
            return Err(Error::NotNormalized(dev));
        }
        let m = psi * psi.adjoint();
        // renormalize exactly so the trace check is never marginal
        let tr: C64 = m.diagonal().iter().sum();
        DensityMatrix::new(m * (c(1.0, 0.0) / tr))
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}
