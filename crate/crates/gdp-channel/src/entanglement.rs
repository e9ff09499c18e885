//! Two-qubit application: Schrodinger-picture dressing, independent local
//! channels on an entangled pair, Wootters concurrence, entanglement of
//! formation, and entanglement-sudden-death detection.
//!
//! Basis ordering is |00>, |01>, |10>, |11> throughout; complex conjugation
//! in the spin flip is taken entrywise in this product basis.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gdp_model::{dp_comparison, gdp_kraus, shape, standard_kraus};
use crate::me2kraus::{KrausSet, LocalGenerator};
use crate::operator_algebra::{herm_eig, kron, psd_sqrt, sigma_y, CMat, DensityMatrix};

/// Free qubit Hamiltonian H_q = (omega/2) sigma_z.
#[derive(Debug, Clone, Copy)]
pub struct QubitHamiltonian {
    pub freq: f64,
}

impl QubitHamiltonian {
    /// U(t) = e^{-i H_q t} = diag(e^{-i omega t / 2}, e^{i omega t / 2}).
    pub fn unitary(&self, t: f64) -> CMat {
        let phase = 0.5 * self.freq * t;
        let mut u = CMat::zeros(2, 2);
        u[(0, 0)] = C64::from_polar(1.0, -phase);
        u[(1, 1)] = C64::from_polar(1.0, phase);
        u
    }
}

/// Interaction-picture Kraus set dressed into the Schrodinger picture:
/// E_i -> U(t) E_i. Completeness is preserved since U is unitary.
pub fn schrodinger_dress(k: &KrausSet, h: &QubitHamiltonian, t: f64) -> KrausSet {
    let u = h.unitary(t);
    KrausSet::new(k.ops.iter().map(|e| &u * e).collect(), k.time_tag)
}

/// 4x4 two-qubit state.
#[derive(Debug, Clone)]
pub struct PairState {
    pub state: DensityMatrix,
}

/// Bell state (|00> + |11>)/sqrt(2).
pub fn bell_state_vector() -> DVector<C64> {
    let s = C64::new(1.0 / f64::sqrt(2.0), 0.0);
    DVector::from_vec(vec![s, C64::new(0.0, 0.0), C64::new(0.0, 0.0), s])
}

/// Independent local channels on a pure two-qubit input:
/// rho = sum_{i,j} (E_{1i} (x) E_{2j}) |psi><psi| (E_{1i} (x) E_{2j})^dag.
pub fn evolve_pair(psi0: &DVector<C64>, k1: &KrausSet, k2: &KrausSet) -> Result<PairState> {
    let dev = (psi0.norm() - 1.0).abs();
    if dev > 1e-10 {
        return Err(Error::NotNormalized(dev));
    }
    for k in [k1, k2] {
        let defect = k.completeness_defect();
        if defect > 1e-8 {
            return Err(Error::IncompleteKraus(defect));
        }
    }
    let proj = psi0 * psi0.adjoint();
    let mut out = CMat::zeros(4, 4);
    for e1 in &k1.ops {
        for e2 in &k2.ops {
            let t = kron(e1, e2)?;
            out += &t * &proj * t.adjoint();
        }
    }
    let sym = (&out + out.adjoint()) * C64::new(0.5, 0.0);
    Ok(PairState {
        state: DensityMatrix::new(sym)?,
    })
}

/// Wootters concurrence C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))
/// from the descending eigenvalues l_i of rho (sy (x) sy) rho^* (sy (x) sy).
///
/// The eigenvalues are obtained from the Hermitian similar matrix
/// sqrt(rho) rho~ sqrt(rho), which shares the spectrum of rho rho~.
pub fn concurrence(rho: &PairState) -> Result<f64> {
    let m = rho.state.mat();
    let syy = kron(&sigma_y(), &sigma_y())?;
    let conj = CMat::from_fn(4, 4, |i, j| m[(i, j)].conj());
    let flipped = &syy * conj * &syy;
    let root = psd_sqrt(m)?;
    let herm = &root * flipped * &root;
    let (vals, _) = herm_eig(&herm)?;
    if let Some(&min) = vals.last() {
        if min < -1e-8 {
            return Err(Error::NotPositive(min));
        }
    }
    let sq: Vec<f64> = vals.iter().map(|l| l.max(0.0).sqrt()).collect();
    let lam = sq[0] - sq[1] - sq[2] - sq[3];
    Ok(lam.max(0.0).min(1.0))
}

/// Entanglement of formation E = H((1 + sqrt(1 - C^2))/2) with the binary
/// entropy H in bits.
pub fn entanglement_of_formation(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::ConcurrenceOutOfRange(c));
    }
    let c = c.clamp(0.0, 1.0);
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    let h = |p: f64| -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    };
    Ok(h(x))
}

/// Which local channel acts on each qubit of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Generalized depolarizing channel from the full generator.
    Gdp,
    /// Standard comparison channel at the same tau scale.
    Dp,
    /// No noise; free evolution only.
    Identity,
}

/// Everything needed to evolve the Bell pair under two independent local
/// channels built from one generator.
#[derive(Debug, Clone, Copy)]
pub struct PairChannelConfig {
    pub generator: LocalGenerator,
    pub kind: ChannelKind,
    pub omega1: f64,
    pub omega2: f64,
}

impl PairChannelConfig {
    /// Schrodinger-picture Kraus set for one qubit at time t.
    fn qubit_kraus(&self, freq: f64, t: f64) -> Result<KrausSet> {
        let k = match self.kind {
            ChannelKind::Identity => KrausSet::identity(),
            ChannelKind::Gdp => gdp_kraus(&shape(&self.generator, t)?)?,
            ChannelKind::Dp => standard_kraus(shape(&dp_comparison(&self.generator), t)?.tau)?,
        };
        Ok(schrodinger_dress(&k, &QubitHamiltonian { freq }, t))
    }

    /// Bell pair propagated to time t.
    pub fn pair_state(&self, t: f64) -> Result<PairState> {
        let k1 = self.qubit_kraus(self.omega1, t)?;
        let k2 = self.qubit_kraus(self.omega2, t)?;
        evolve_pair(&bell_state_vector(), &k1, &k2)
    }

    pub fn concurrence_at(&self, t: f64) -> Result<f64> {
        concurrence(&self.pair_state(t)?)
    }
}

/// First time in [0, t_max] at which the concurrence reaches zero
/// (C <= 1e-9), refined by bisection to 1e-6 relative; `None` when the pair
/// stays entangled over the whole window.
pub fn esd_time(cfg: &PairChannelConfig, t_max: f64, step: f64) -> Result<Option<f64>> {
    assert!(step > 0.0, "scan step must be positive");
    let threshold = 1e-9;
    let mut prev_t = 0.0;
    let mut prev_c = cfg.concurrence_at(0.0)?;
    if prev_c <= threshold {
        return Ok(Some(0.0));
    }
    let mut t = step;
    while t <= t_max + 1e-12 {
        let c = cfg.concurrence_at(t)?;
        if c <= threshold {
            let (mut lo, mut hi) = (prev_t, t);
            while (hi - lo) / hi.max(1e-30) > 1e-6 {
                let mid = 0.5 * (lo + hi);
                if cfg.concurrence_at(mid)? <= threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev_t = t;
        prev_c = c;
        t += step;
    }
    let _ = prev_c;
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_algebra::{identity, max_abs};
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn random_kraus(rng: &mut rand_chacha::ChaCha8Rng) -> KrausSet {
        // random CPTP map via a random Choi-like PSD matrix with trace 2
        let a = CMat::from_fn(4, 4, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let s = a.adjoint() * &a;
        // normalize to a trace-preserving channel by whitening sum E^dag E
        let basis = crate::operator_algebra::HermBasis::standard();
        let (vals, vecs) = herm_eig(&s).unwrap();
        let mut ops: Vec<CMat> = vals
            .iter()
            .zip(vecs.iter())
            .map(|(d, u)| {
                let mut e = CMat::zeros(2, 2);
                for j in 0..4 {
                    e += &basis.elements[j] * (u[j] * C64::new(d.max(0.0).sqrt(), 0.0));
                }
                e
            })
            .collect();
        let mut tot = CMat::zeros(2, 2);
        for e in &ops {
            tot += e.adjoint() * e;
        }
        let w = psd_sqrt(&tot).unwrap().try_inverse().unwrap();
        for e in &mut ops {
            *e = &*e * &w;
        }
        KrausSet::new(ops, None)
    }

    #[test]
    fn dressing_identity_cases() {
        let k = crate::gdp_model::standard_kraus(0.7).unwrap();
        let d0 = schrodinger_dress(&k, &QubitHamiltonian { freq: 0.0 }, 1.3);
        let d1 = schrodinger_dress(&k, &QubitHamiltonian { freq: 0.9 }, 0.0);
        for (a, b) in k.ops.iter().zip(d0.ops.iter()) {
            assert!(max_abs(&(a - b)) < 1e-15);
        }
        for (a, b) in k.ops.iter().zip(d1.ops.iter()) {
            assert!(max_abs(&(a - b)) < 1e-15);
        }
    }

    #[test]
    fn dressing_preserves_completeness() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let k = random_kraus(&mut rng);
            assert!(k.completeness_defect() < 1e-10);
            let d = schrodinger_dress(&k, &QubitHamiltonian { freq: 1.7 }, 2.3);
            assert!(d.completeness_defect() < 1e-12 + k.completeness_defect());
        }
    }

    #[test]
    fn evolve_pair_identity_channels() {
        let psi = bell_state_vector();
        let out = evolve_pair(&psi, &KrausSet::identity(), &KrausSet::identity()).unwrap();
        let proj = &psi * psi.adjoint();
        assert!(max_abs(&(out.state.mat() - proj)) < 1e-13);
    }

    #[test]
    fn evolve_pair_asymptotic_gives_maximally_mixed() {
        let k = crate::gdp_model::asymptotic_kraus();
        let out = evolve_pair(&bell_state_vector(), &k, &k).unwrap();
        assert!(max_abs(&(out.state.mat() - identity(4) * C64::new(0.25, 0.0))) < 1e-13);
    }

    #[test]
    fn evolve_pair_rejects_unnormalized() {
        let psi = bell_state_vector() * C64::new(1.1, 0.0);
        assert!(evolve_pair(&psi, &KrausSet::identity(), &KrausSet::identity()).is_err());
    }

    #[test]
    fn concurrence_bell_and_product() {
        let bell = evolve_pair(
            &bell_state_vector(),
            &KrausSet::identity(),
            &KrausSet::identity(),
        )
        .unwrap();
        assert!(close(concurrence(&bell).unwrap(), 1.0, 1e-12));
        let e00 = DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        let prod = evolve_pair(&e00, &KrausSet::identity(), &KrausSet::identity()).unwrap();
        assert!(concurrence(&prod).unwrap() < 1e-12);
    }

    #[test]
    fn concurrence_werner_half() {
        // rho = p |Phi+><Phi+| + (1-p) I/4 with p = 0.5 gives C = 0.25
        let psi = bell_state_vector();
        let proj = &psi * psi.adjoint();
        let m = proj * C64::new(0.5, 0.0) + identity(4) * C64::new(0.125, 0.0);
        let rho = PairState {
            state: DensityMatrix::new(m).unwrap(),
        };
        assert!(close(concurrence(&rho).unwrap(), 0.25, 1e-10));
    }

    #[test]
    fn concurrence_local_unitary_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..5 {
            let k1 = random_kraus(&mut rng);
            let k2 = random_kraus(&mut rng);
            let rho = evolve_pair(&bell_state_vector(), &k1, &k2).unwrap();
            let c0 = concurrence(&rho).unwrap();
            let u1 = QubitHamiltonian {
                freq: rng.gen::<f64>() * 3.0,
            }
            .unitary(rng.gen::<f64>() * 2.0);
            let u2 = QubitHamiltonian {
                freq: rng.gen::<f64>() * 3.0,
            }
            .unitary(rng.gen::<f64>() * 2.0);
            let u = kron(&u1, &u2).unwrap();
            let rotated = PairState {
                state: DensityMatrix::new(&u * rho.state.mat() * u.adjoint()).unwrap(),
            };
            assert!(close(concurrence(&rotated).unwrap(), c0, 1e-10));
        }
    }

    #[test]
    fn eof_endpoints_and_monotonicity() {
        assert!(close(entanglement_of_formation(0.0).unwrap(), 0.0, 1e-15));
        assert!(close(entanglement_of_formation(1.0).unwrap(), 1.0, 1e-15));
        assert!(close(
            entanglement_of_formation(0.5).unwrap(),
            0.354579,
            1e-6
        ));
        let mut last = -1.0;
        for i in 0..=100 {
            let e = entanglement_of_formation(i as f64 / 100.0).unwrap();
            assert!(e >= last);
            last = e;
        }
        assert!(entanglement_of_formation(1.5).is_err());
    }

    #[test]
    fn esd_none_for_identity_channels() {
        let cfg = PairChannelConfig {
            generator: LocalGenerator::new(0.0, 1.0, 0.5).unwrap(),
            kind: ChannelKind::Identity,
            omega1: 0.1,
            omega2: 0.2,
        };
        assert!(esd_time(&cfg, 2.0, 0.25).unwrap().is_none());
    }

    #[test]
    fn esd_invariant_under_local_frequencies() {
        let generator = LocalGenerator::new(0.06, 1.26, 0.28).unwrap();
        let base = PairChannelConfig {
            generator,
            kind: ChannelKind::Gdp,
            omega1: 0.1,
            omega2: 0.2,
        };
        let other = PairChannelConfig {
            omega1: 1.7,
            omega2: 0.0,
            ..base
        };
        let t1 = esd_time(&base, 2.0, 0.05).unwrap().unwrap();
        let t2 = esd_time(&other, 2.0, 0.05).unwrap().unwrap();
        assert!((t1 - t2).abs() / t1 < 1e-5);
        // pointwise concurrence agreement is much tighter
        for t in [0.05, 0.1, 0.15] {
            assert!(close(
                base.concurrence_at(t).unwrap(),
                other.concurrence_at(t).unwrap(),
                1e-10
            ));
        }
    }

    #[test]
    fn bell_concurrence_nonincreasing_under_channels() {
        let generator = LocalGenerator::new(0.06, 1.26, 0.28).unwrap();
        for kind in [ChannelKind::Gdp, ChannelKind::Dp] {
            let cfg = PairChannelConfig {
                generator,
                kind,
                omega1: 0.1,
                omega2: 0.2,
            };
            let mut last = f64::INFINITY;
            for i in 0..=20 {
                let c = cfg.concurrence_at(i as f64 * 0.02).unwrap();
                assert!(c <= last + 1e-10);
                last = c;
            }
        }
    }
}
