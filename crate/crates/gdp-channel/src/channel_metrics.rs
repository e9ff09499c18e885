//! Geometric and information-theoretic channel comparison quantities:
//! Bloch mapping, deformed-sphere volume and its rate, von Neumann entropy,
//! trace distance.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gdp_model::ChannelShape;
use crate::me2kraus::LocalGenerator;
use crate::operator_algebra::{
    herm_eig, identity, sigma_x, sigma_y, sigma_z, trace_norm, DensityMatrix,
};

/// Real 3-vector n with rho = (I + n . sigma)/2; ||n|| <= 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Point on the unit sphere at spherical angles (u, v):
    /// n = (sin v cos u, sin v sin u, cos v).
    pub fn from_angles(u: f64, v: f64) -> Self {
        BlochVector {
            x: v.sin() * u.cos(),
            y: v.sin() * u.sin(),
            z: v.cos(),
        }
    }
}

pub fn bloch_to_density(b: &BlochVector) -> Result<DensityMatrix> {
    let n = b.norm();
    if n > 1.0 + 1e-10 {
        return Err(Error::BlochNormExceeded(n));
    }
    let m = (identity(2)
        + sigma_x() * C64::new(b.x, 0.0)
        + sigma_y() * C64::new(b.y, 0.0)
        + sigma_z() * C64::new(b.z, 0.0))
        * C64::new(0.5, 0.0);
    DensityMatrix::new(m)
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    let comp = |s: &crate::operator_algebra::CMat| -> f64 {
        (s * rho.mat()).diagonal().iter().sum::<C64>().re
    };
    BlochVector {
        x: comp(&sigma_x()),
        y: comp(&sigma_y()),
        z: comp(&sigma_z()),
    }
}

/// Deformed-Bloch-sphere volume V(tau) = (4 pi / 3) e^{tau (Omega - 2)}.
pub fn ellipsoid_volume(c: &ChannelShape) -> f64 {
    4.0 * PI / 3.0 * (c.tau * (c.omega - 2.0)).exp()
}

/// Relative volume-change speed kappa(t) = -4(2z + y) e^{-4(2z + y) t}.
pub fn volume_rate(g: &LocalGenerator, t: f64) -> f64 {
    let k = 4.0 * (2.0 * g.z + g.y);
    -k * (-k * t).exp()
}

/// -tr(rho ln rho) with 0 ln 0 := 0; natural logarithm.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (vals, _) = herm_eig(rho.mat()).expect("density matrix is Hermitian");
    -vals
        .iter()
        .map(|&l| if l > 0.0 { l * l.ln() } else { 0.0 })
        .sum::<f64>()
}

/// Trace distance ||rho - sigma||_1 / 2.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(0.5 * trace_norm(&(rho.mat() - sigma.mat())))
}
