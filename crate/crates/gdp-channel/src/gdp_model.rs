//! Microscopic front end of the generalized depolarizing (GDP) channel.
//!
//! Computes damping rates and the Lamb shift from Ohmic-bath parameters,
//! assembles the local generator, and provides the closed-form propagator,
//! Choi matrix, Kraus families and the analytic state solution. Units are
//! hbar = k_B = 1 throughout; every input is angular-frequency valued.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::me2kraus::{kraus_from_choi, ChoiMatrix, KrausSet, LocalGenerator, PropagatorMatrix};
use crate::operator_algebra::{identity, sigma_x, sigma_y, sigma_z, CMat, DensityMatrix};

/// Microscopic bath parameters.
#[derive(Debug, Clone, Copy)]
pub struct MicroParams {
    /// Bath temperature T > 0 (frequency units, k_B = 1).
    pub temperature: f64,
    /// Dimensionless weak-coupling strength alpha >= 0.
    pub coupling: f64,
    /// Qubit transition frequency omega_0 >= 0.
    pub qubit_freq: f64,
    /// Ohmic cutoff omega_c > 0.
    pub cutoff: f64,
    /// Upper limit of the Lamb-shift integral; the exponential cutoff makes
    /// the tail beyond 20 omega_c negligible.
    pub integration_cap: f64,
}

impl MicroParams {
    pub fn new(temperature: f64, coupling: f64, qubit_freq: f64, cutoff: f64) -> Self {
        MicroParams {
            temperature,
            coupling,
            qubit_freq,
            cutoff,
            integration_cap: 20.0 * cutoff,
        }
    }

    /// Markovianity regime checks; these are warnings, not errors.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.qubit_freq / self.cutoff >= 0.2 {
            w.push(format!(
                "omega0/omega_c = {:.4} is not << 1; Markovian form questionable",
                self.qubit_freq / self.cutoff
            ));
        }
        if self.qubit_freq > 0.0 && self.temperature / self.qubit_freq <= 10.0 {
            w.push(format!(
                "T/omega0 = {:.4} is not >> 1; high-temperature limit questionable",
                self.temperature / self.qubit_freq
            ));
        }
        w
    }
}

/// Ohmic spectral density J(omega) = alpha omega e^{-omega/omega_c}.
pub fn ohmic_density(omega: f64, p: &MicroParams) -> f64 {
    p.coupling * omega * (-omega / p.cutoff).exp()
}

/// Bose-Einstein occupation 1/(e^{omega/T} - 1), omega > 0.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// J(omega) <n(omega)>, continued to omega = 0 by its limit alpha T.
fn weighted_density(omega: f64, p: &MicroParams) -> f64 {
    let x = omega / p.temperature;
    // x / expm1(x) -> 1 as x -> 0
    let ratio = if x.abs() < 1e-12 {
        1.0 / (1.0 + x / 2.0)
    } else {
        x / x.exp_m1()
    };
    p.coupling * p.temperature * (-omega / p.cutoff).exp() * ratio
}

/// Damping rates and the Lamb shift of the GDP master equation.
#[derive(Debug, Clone, Copy)]
pub struct DampingRates {
    /// gamma_zz(0) = 2 pi alpha T.
    pub gamma_zz0: f64,
    /// gamma_yy(omega_0) = gamma_xx(omega_0).
    pub gamma_plus: f64,
    /// gamma_yy(-omega_0).
    pub gamma_minus: f64,
    /// Lamb-shift coefficient Delta of the sigma_z term.
    pub lamb_delta: f64,
}

/// Rates from the microscopic parameters.
///
/// With `high_t_approx` the upward and downward rates are both identified
/// with (pi/2) J(omega_0) <n(omega_0)>; otherwise the exact Bose factors
/// (<n>+1 and <n>) are kept.
pub fn damping_rates(p: &MicroParams, high_t_approx: bool) -> Result<DampingRates> {
    let gamma_zz0 = 2.0 * PI * p.coupling * p.temperature;
    let (gamma_plus, gamma_minus) = if p.qubit_freq > 0.0 && p.coupling > 0.0 {
        let j = ohmic_density(p.qubit_freq, p);
        let n = bose_occupation(p.qubit_freq, p.temperature)?;
        if high_t_approx {
            let g = 0.5 * PI * j * n;
            (g, g)
        } else {
            (0.5 * PI * j * (n + 1.0), 0.5 * PI * j * n)
        }
    } else {
        (0.0, 0.0)
    };
    Ok(DampingRates {
        gamma_zz0,
        gamma_plus,
        gamma_minus,
        lamb_delta: lamb_shift(p)?,
    })
}

/// Recursive adaptive Simpson quadrature.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    if a >= b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 52)
}

/// Truncated integral of J <n> / (omega_0^2 - omega^2) with the symmetric
/// window (omega_0 - eps, omega_0 + eps) excised.
fn windowed_pv_integral(p: &MicroParams, eps: f64) -> f64 {
    let w0 = p.qubit_freq;
    let wmax = p.integration_cap;
    let f = move |w: f64| weighted_density(w, p) / ((w0 - w) * (w0 + w));
    let tol = 1e-13 * (1.0 + p.coupling * p.temperature);
    let mut acc = 0.0;
    // split at a fixed offset so the adaptive rule concentrates effort near
    // the excision edges only
    let off = (0.1f64).min(0.5 * w0);
    acc += adaptive_simpson(&f, 0.0, w0 - off, tol);
    acc += adaptive_simpson(&f, w0 - off, w0 - eps, tol);
    acc += adaptive_simpson(&f, w0 + eps, w0 + off, tol);
    acc += adaptive_simpson(&f, w0 + off, wmax, tol);
    acc
}

/// Lamb-shift coefficient
/// Delta = omega_0 P.V. int_0^{omega_max} J(w) <n(w)> / (omega_0^2 - w^2) dw.
///
/// The principal value is computed by symmetric-window excision at
/// eps = 1e-2, 5e-3, 2.5e-3, ... with Richardson extrapolation in eps;
/// converged once successive extrapolants agree to 1e-8 relative.
pub fn lamb_shift(p: &MicroParams) -> Result<f64> {
    if p.qubit_freq <= 0.0 || p.coupling == 0.0 {
        return Ok(0.0);
    }
    let eps0 = (1e-2f64)
        .min(0.25 * p.qubit_freq)
        .min(0.25 * (p.integration_cap - p.qubit_freq));
    let max_levels = 10usize;
    let mut estimates = Vec::with_capacity(max_levels);
    let mut prev_r: Option<f64> = None;
    for level in 0..max_levels {
        let eps = eps0 * 0.5f64.powi(level as i32);
        estimates.push(windowed_pv_integral(p, eps));
        if level == 0 {
            continue;
        }
        // excision error is linear in eps; Richardson with ratio 2
        let r = 2.0 * estimates[level] - estimates[level - 1];
        if let Some(rp) = prev_r {
            let rel = (r - rp).abs() / r.abs().max(1e-300);
            if rel <= 1e-8 {
                return Ok(p.qubit_freq * r);
            }
            if level == max_levels - 1 {
                return Err(Error::QuadratureNoConvergence {
                    prev: rp,
                    last: r,
                    rel,
                    level,
                });
            }
        }
        prev_r = Some(r);
    }
    unreachable!("loop returns or errors before exhausting levels")
}

/// Local generator from the microscopic parameters:
/// x = Delta, y = gamma_zz(0), z = (gamma_xx + gamma_yy)/2.
pub fn generator_from_micro(p: &MicroParams, high_t_approx: bool) -> Result<LocalGenerator> {
    let r = damping_rates(p, high_t_approx)?;
    LocalGenerator::new(r.lamb_delta, r.gamma_zz0, r.gamma_plus)
}

/// Standard-channel comparison generator at the same tau scale: x = 0 and
/// y, z replaced by their mean, so y + z (hence tau) is unchanged.
pub fn dp_comparison(g: &LocalGenerator) -> LocalGenerator {
    let mean = 0.5 * (g.y + g.z);
    LocalGenerator {
        x: 0.0,
        y: mean,
        z: mean,
    }
}

/// Dimensionless channel parameters theta, Omega, tau.
#[derive(Debug, Clone, Copy)]
pub struct ChannelShape {
    pub theta: f64,
    pub omega: f64,
    pub tau: f64,
}

impl ChannelShape {
    pub fn new(theta: f64, omega: f64, tau: f64) -> Self {
        ChannelShape { theta, omega, tau }
    }
}

/// theta = x/(y+z), Omega = -2z/(y+z), tau = 2(y+z)t.
pub fn shape(g: &LocalGenerator, t: f64) -> Result<ChannelShape> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let sum = g.y + g.z;
    if sum <= 0.0 {
        return Err(Error::DegenerateGenerator);
    }
    Ok(ChannelShape {
        theta: g.x / sum,
        omega: -2.0 * g.z / sum,
        tau: 2.0 * sum * t,
    })
}

/// Closed-form propagator F(theta, Omega, tau).
pub fn propagator_closed(c: &ChannelShape) -> PropagatorMatrix {
    let e = (-c.tau).exp();
    let ez = (c.tau * c.omega).exp();
    let (s, co) = (c.theta * c.tau).sin_cos();
    let mut f = nalgebra::DMatrix::zeros(4, 4);
    f[(0, 0)] = 1.0;
    f[(1, 1)] = e * co;
    f[(1, 2)] = -e * s;
    f[(2, 1)] = e * s;
    f[(2, 2)] = e * co;
    f[(3, 3)] = ez;
    PropagatorMatrix { f }
}

/// Closed-form Choi matrix S(theta, Omega, tau).
pub fn choi_closed(c: &ChannelShape) -> ChoiMatrix {
    let e = (-c.tau).exp();
    let ez = (c.tau * c.omega).exp();
    let (sn, co) = (c.theta * c.tau).sin_cos();
    let mut s = CMat::zeros(4, 4);
    s[(0, 0)] = C64::new(e * co + 0.5 * ez + 0.5, 0.0);
    s[(0, 3)] = C64::new(0.0, e * sn);
    s[(1, 1)] = C64::new(0.5 - 0.5 * ez, 0.0);
    s[(2, 2)] = C64::new(0.5 - 0.5 * ez, 0.0);
    s[(3, 0)] = C64::new(0.0, -e * sn);
    s[(3, 3)] = C64::new(-e * co + 0.5 * ez + 0.5, 0.0);
    ChoiMatrix { s }
}

/// Closed-form Choi eigenvalues, in the printed order:
/// (1-e^{tau Omega})/2 twice, then (e^{tau Omega} + 1 -+ 2 e^{-tau})/2.
pub fn choi_eigenvalues_closed(c: &ChannelShape) -> [f64; 4] {
    let e = (-c.tau).exp();
    let ez = (c.tau * c.omega).exp();
    [
        0.5 * (1.0 - ez),
        0.5 * (1.0 - ez),
        0.5 * (ez + 1.0 - 2.0 * e),
        0.5 * (ez + 1.0 + 2.0 * e),
    ]
}

/// The four closed-form GDP Kraus matrices.
///
/// Near sin(theta tau) = 0 the tan/cot expressions blow up; there the set is
/// rebuilt numerically from the closed-form Choi matrix instead.
pub fn gdp_kraus(c: &ChannelShape) -> Result<KrausSet> {
    if !(c.omega > -2.0 && c.omega < 0.0) {
        return Err(Error::OmegaOutOfRange(c.omega));
    }
    if c.tau < 0.0 {
        return Err(Error::NegativeTime(c.tau));
    }
    let ang = c.theta * c.tau;
    if ang.sin().abs() < 1e-8 {
        let mut k = kraus_from_choi(&choi_closed(c))?;
        k.time_tag = Some(c.tau);
        return Ok(k);
    }
    let e = (-c.tau).exp();
    let ez = (c.tau * c.omega).exp();
    let a = 0.5 * (1.0 - ez).max(0.0).sqrt();
    let e1 = sigma_y() * C64::new(a, 0.0);
    let e2 = sigma_x() * C64::new(a, 0.0);
    let t2 = (0.5 * ang).tan();
    let c2 = 1.0 / t2;
    let r3 = ((ez - 2.0 * e + 1.0).max(0.0) / (t2 * t2 + 1.0)).sqrt();
    let mut e3 = CMat::zeros(2, 2);
    e3[(0, 0)] = C64::new(0.5, -0.5 * t2) * C64::new(r3, 0.0);
    e3[(1, 1)] = C64::new(-0.5, -0.5 * t2) * C64::new(r3, 0.0);
    let r4 = ((ez + 2.0 * e + 1.0) / (c2 * c2 + 1.0)).sqrt();
    let mut e4 = CMat::zeros(2, 2);
    e4[(0, 0)] = C64::new(0.5, 0.5 * c2) * C64::new(r4, 0.0);
    e4[(1, 1)] = C64::new(0.0, 0.5) * C64::new(c2, 1.0) * C64::new(r4, 0.0);
    Ok(KrausSet::new(vec![e1, e2, e3, e4], Some(c.tau)))
}

/// Standard depolarizing Kraus set at the same tau scale; equivalent to the
/// textbook set with p = 1 - e^{-tau} up to a unitary freedom on the fourth
/// operator.
pub fn standard_kraus(tau: f64) -> Result<KrausSet> {
    if tau < 0.0 {
        return Err(Error::NegativeTime(tau));
    }
    let a = 0.5 * (1.0 - (-tau).exp()).max(0.0).sqrt();
    let b = 0.5 * (-0.5 * tau).exp() * (3.0 + tau.exp()).sqrt();
    let e1 = sigma_y() * C64::new(a, 0.0);
    let e2 = sigma_x() * C64::new(a, 0.0);
    let e3 = sigma_z() * C64::new(a, 0.0);
    let e4 = identity(2) * C64::new(0.0, -b);
    Ok(KrausSet::new(vec![e1, e2, e3, e4], Some(tau)))
}

/// The unique tau -> infinity Kraus set; its channel maps every state
/// to I/2.
pub fn asymptotic_kraus() -> KrausSet {
    KrausSet::new(
        vec![
            sigma_y() * C64::new(0.5, 0.0),
            sigma_x() * C64::new(0.5, 0.0),
            sigma_z() * C64::new(0.0, 0.5),
            identity(2) * C64::new(0.0, 0.5),
        ],
        None,
    )
}

/// Analytic solution of the GDP master equation for the pure initial state at
/// Bloch angles (u, v):
/// rho = (I + e^{-tau} sin v cos(u + theta tau) sx
///          + e^{-tau} sin v sin(u + theta tau) sy
///          + e^{tau Omega} cos v sz) / 2.
pub fn analytic_state(u: f64, v: f64, c: &ChannelShape) -> DensityMatrix {
    let e = (-c.tau).exp();
    let ez = (c.tau * c.omega).exp();
    let nx = e * v.sin() * (u + c.theta * c.tau).cos();
    let ny = e * v.sin() * (u + c.theta * c.tau).sin();
    let nz = ez * v.cos();
    let m = (identity(2)
        + sigma_x() * C64::new(nx, 0.0)
        + sigma_y() * C64::new(ny, 0.0)
        + sigma_z() * C64::new(nz, 0.0))
        * C64::new(0.5, 0.0);
    DensityMatrix::new(m).expect("analytic state is a valid density matrix")
}

/// Root report for the channel-reduction condition
/// f(omega_0) = 2 gamma_zz(0,T) - gamma_xx(omega_0,T) - gamma_yy(omega_0,T).
#[derive(Debug, Clone)]
pub struct ReductionReport {
    /// Roots of f on [0, 5 omega_c].
    pub roots: Vec<f64>,
    /// f(0), evaluated from the analytic omega -> 0 limit.
    pub f_at_zero: f64,
    /// True when alpha = 0 (f vanishes identically).
    pub degenerate: bool,
}

/// Scan [0, 5 omega_c] for roots of the reduction condition with grid step
/// omega_c/1000 and bisection to 1e-10. Root locations are independent of
/// alpha (f is linear in alpha).
pub fn reduction_condition_roots(
    temperature: f64,
    coupling: f64,
    cutoff: f64,
    high_t_approx: bool,
) -> ReductionReport {
    if coupling == 0.0 {
        return ReductionReport {
            roots: Vec::new(),
            f_at_zero: 0.0,
            degenerate: true,
        };
    }
    let f = |w0: f64| -> f64 {
        let base = 4.0 * PI * coupling * temperature;
        if w0 <= 0.0 {
            // limit: J(w0)(<n>+1) -> alpha T either way
            return base - PI * coupling * temperature;
        }
        let p = MicroParams::new(temperature, coupling, w0, cutoff);
        let j = ohmic_density(w0, &p);
        let n = bose_occupation(w0, temperature).expect("w0 > 0");
        let pair_sum = if high_t_approx {
            PI * j * n
        } else {
            PI * j * (n + 1.0)
        };
        base - pair_sum
    };
    let hi = 5.0 * cutoff;
    let step = cutoff / 1000.0;
    let mut roots = Vec::new();
    let mut w = 0.0;
    let mut fw = f(w);
    if fw == 0.0 {
        roots.push(0.0);
    }
    while w < hi {
        let w2 = (w + step).min(hi);
        let fw2 = f(w2);
        if fw == 0.0 {
            // already recorded
        } else if fw2 == 0.0 {
            roots.push(w2);
        } else if fw.signum() != fw2.signum() {
            let (mut a, mut b) = (w, w2);
            let mut fa = fw;
            while b - a > 1e-10 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 || fa.signum() == fm.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        w = w2;
        fw = fw2;
    }
    ReductionReport {
        roots,
        f_at_zero: f(0.0),
        degenerate: false,
    }
}
