use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The grid does not resolve the wave profile to the required accuracy.
    #[error("resolution error: {what} residual {residual:.3e} exceeds {tolerance:.3e}")]
    Resolution {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    /// The right-hand side of a kernel-projected solve is not orthogonal to the kernel.
    #[error("solvability error: right-hand side has relative kernel component {component:.3e} (limit {tolerance:.3e})")]
    Solvability { component: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    /// ⟨L⁻¹φ, φ⟩ vanishes numerically, so the generalized kernel is not five dimensional.
    #[error("degenerate generalized kernel: |<L^-1 phi, phi>| = {value:.3e} below {threshold:.3e}")]
    Degenerate { value: f64, threshold: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("output error: {0}")]
    Io(String),
}

impl Error {
    /// Parameter problems, as opposed to numerical failures.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Dimension { .. })
    }
}
