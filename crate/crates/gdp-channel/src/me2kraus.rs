//! Single-qubit pipeline from a local-in-time generator to a Kraus set.
//!
//! The chain is: generator matrix L in the fixed Hermitian basis, propagator
//! F = e^{L t}, Choi matrix S, eigendecomposition of S, Kraus operators.
//! Channel equality is always judged by the action on the operator basis,
//! never by comparing Kraus matrices entrywise (unitary freedom).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator_algebra::{
    herm_defect, herm_eig, identity, mat_exp, max_abs, CMat, DensityMatrix, HermBasis,
    sigma_x, sigma_y, sigma_z,
};

/// Lindblad-form single-qubit generator:
/// d rho/dt = -i x [sz, rho] + y (sz rho sz - rho)
///            + z (sx rho sx - rho) + z (sy rho sy - rho).
#[derive(Debug, Clone, Copy)]
pub struct LocalGenerator {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LocalGenerator {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if y < 0.0 || z < 0.0 {
            return Err(Error::NegativeRate { y, z });
        }
        Ok(LocalGenerator { x, y, z })
    }

    /// Action of the generator on an arbitrary 2x2 operator.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let (sx, sy, sz) = (sigma_x(), sigma_y(), sigma_z());
        let comm = &sz * rho - rho * &sz;
        let mut out = comm * C64::new(0.0, -self.x);
        out += (&sz * rho * &sz - rho) * C64::new(self.y, 0.0);
        out += (&sx * rho * &sx - rho) * C64::new(self.z, 0.0);
        out += (&sy * rho * &sy - rho) * C64::new(self.z, 0.0);
        out
    }
}

/// 4x4 real matrix of the generator in the (I, sx, sy, sz)/sqrt(2) basis,
/// L_kl = tr[G_k Lambda(G_l)].
pub fn generator_matrix(g: &LocalGenerator) -> DMatrix<f64> {
    let basis = HermBasis::standard();
    DMatrix::from_fn(4, 4, |k, l| {
        let image = g.apply(&basis.elements[l]);
        crate::operator_algebra::hs_inner(&basis.elements[k], &image)
            .expect("equal dims")
            .re
    })
}

/// Real 4x4 propagator acting on basis coordinates; first row is (1,0,0,0).
#[derive(Debug, Clone)]
pub struct PropagatorMatrix {
    pub f: DMatrix<f64>,
}

/// F = e^{L t} for t >= 0.
pub fn propagator(l: &DMatrix<f64>, t: f64) -> Result<PropagatorMatrix> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let lc = CMat::from_fn(4, 4, |i, j| C64::new(l[(i, j)], 0.0));
    let e = mat_exp(&lc, t)?;
    Ok(PropagatorMatrix {
        f: DMatrix::from_fn(4, 4, |i, j| e[(i, j)].re),
    })
}

/// 4x4 complex Hermitian Choi matrix; PSD iff the channel is CP.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub s: CMat,
}

/// S_nm = sum_{s,r} F_sr tr[G_r G_n^dag G_s G_m].
pub fn choi(f: &PropagatorMatrix) -> ChoiMatrix {
    let basis = HermBasis::standard();
    let g = &basis.elements;
    let s = CMat::from_fn(4, 4, |n, m| {
        let mut acc = C64::new(0.0, 0.0);
        for si in 0..4 {
            for r in 0..4 {
                let prod = &g[r] * g[n].adjoint() * &g[si] * &g[m];
                let tr: C64 = prod.diagonal().iter().sum();
                acc += C64::new(f.f[(si, r)], 0.0) * tr;
            }
        }
        acc
    });
    ChoiMatrix { s }
}

/// Ordered Kraus operators with the completeness relation sum E^dag E = I.
///
/// Order follows descending Choi eigenvalue; consumers must not attach
/// semantics to it.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub ops: Vec<CMat>,
    pub time_tag: Option<f64>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMat>, time_tag: Option<f64>) -> Self {
        KrausSet { ops, time_tag }
    }

    /// Single identity operator; the do-nothing channel.
    pub fn identity() -> Self {
        KrausSet::new(vec![identity(2)], None)
    }

    /// Max-entry deviation of sum E^dag E from I.
    pub fn completeness_defect(&self) -> f64 {
        let dim = self.ops.first().map_or(2, CMat::nrows);
        let mut acc = CMat::zeros(dim, dim);
        for e in &self.ops {
            acc += e.adjoint() * e;
        }
        max_abs(&(acc - identity(dim)))
    }

    /// Unchecked channel action on an arbitrary operator.
    pub fn apply_op(&self, op: &CMat) -> CMat {
        let dim = op.nrows();
        let mut out = CMat::zeros(dim, dim);
        for e in &self.ops {
            out += e * op * e.adjoint();
        }
        out
    }
}

/// Kraus operators from the Choi eigendecomposition, E_i = sqrt(d_i) sum_j u_ji G_j.
///
/// Near-zero eigenvalues (d < 1e-14) are dropped; negative eigenvalues below
/// -1e-8 are a complete-positivity violation.
pub fn kraus_from_choi(s: &ChoiMatrix) -> Result<KrausSet> {
    let (vals, vecs) = herm_eig(&s.s)?;
    if let Some(&min) = vals.last() {
        if min < -1e-8 {
            return Err(Error::NotCompletelyPositive(min));
        }
    }
    let basis = HermBasis::standard();
    let mut ops = Vec::new();
    for (d, u) in vals.iter().zip(vecs.iter()) {
        let d = d.max(0.0);
        if d < 1e-14 {
            continue;
        }
        let mut e = CMat::zeros(2, 2);
        for j in 0..4 {
            e += &basis.elements[j] * (u[j] * C64::new(d.sqrt(), 0.0));
        }
        ops.push(e);
    }
    Ok(KrausSet::new(ops, None))
}

/// Channel action sum_k E_k rho E_k^dag; rejects sets whose completeness
/// defect exceeds 1e-8.
pub fn apply_channel(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let defect = k.completeness_defect();
    if defect > 1e-8 {
        return Err(Error::IncompleteKraus(defect));
    }
    let out = k.apply_op(rho.mat());
    // the output is Hermitian up to rounding; symmetrize before validation
    let sym = (&out + out.adjoint()) * C64::new(0.5, 0.0);
    debug_assert!(herm_defect(&out) < 1e-10);
    DensityMatrix::new(sym)
}
