use thiserror::Error;

/// Errors surfaced by the numerical kernels and channel constructions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("matrix exponential argument too large (1-norm {0:.3e} > 700)")]
    ExpRange(f64),

    #[error("negative evolution time t = {0}")]
    NegativeTime(f64),

    #[error("negative dissipation rate: y = {y}, z = {z}")]
    NegativeRate { y: f64, z: f64 },

    #[error("Choi matrix violates complete positivity (min eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),

    #[error("Kraus completeness relation violated (defect {0:.3e})")]
    IncompleteKraus(f64),

    #[error("channel parameter Omega = {0} outside (-2, 0)")]
    OmegaOutOfRange(f64),

    #[error("degenerate generator: y + z = 0 (identity channel)")]
    DegenerateGenerator,

    #[error("Bose occupation undefined for omega = {0} <= 0")]
    NonPositiveFrequency(f64),

    #[error(
        "principal-value quadrature did not converge: last estimates {last:.12e}, {prev:.12e} \
         (relative change {rel:.3e} at refinement level {level})"
    )]
    QuadratureNoConvergence {
        prev: f64,
        last: f64,
        rel: f64,
        level: usize,
    },

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),

    #[error("state vector is not normalized (norm deviation {0:.3e})")]
    NotNormalized(f64),

    #[error("concurrence {0} outside [0, 1]")]
    ConcurrenceOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
