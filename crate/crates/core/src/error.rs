//! Error type shared by all modules.

use num_complex::Complex64;

/// Failure modes of the numerical operations. Every variant carries the measured
/// quantity that triggered it so callers can report residuals, not just verdicts.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CoreError {
    #[error("evaluation point outside the closed unit disc (|z| = {modulus})")]
    OutsideDisc { modulus: f64 },

    #[error("kernel point must lie in the open unit disc (|lambda| = {modulus})")]
    KernelOutsideDisc { modulus: f64 },

    #[error("grid size {m} must be a power of two")]
    GridNotPowerOfTwo { m: usize },

    #[error("grid size {m} below coefficient length {n} would alias")]
    Aliasing { m: usize, n: usize },

    #[error("symbol not factorable: grid minimum {grid_min:.3e} is below -{tol:.0e}")]
    NotFactorable { grid_min: f64, tol: f64 },

    #[error("boundary root cluster near {location} has odd multiplicity {multiplicity}")]
    OddBoundaryMultiplicity {
        location: Complex64,
        multiplicity: usize,
    },

    #[error("|b| >= 1 on the whole circle; no Pythagorean mate exists")]
    ExtremeSymbol,

    #[error("not divisible: residual {residual:.3e} at zero {zero} (multiplicity {multiplicity})")]
    NotDivisible {
        zero: Complex64,
        multiplicity: usize,
        residual: f64,
    },

    #[error("not in numerical range: residual {residual:.3e} exceeds bound {bound:.3e}")]
    NotInRange { residual: f64, bound: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("no convergence by N = {n_cap}; norm trajectory {trajectory:?}")]
    Unconverged { n_cap: usize, trajectory: Vec<f64> },

    #[error("zeros closer than {separation:.3e} are numerically ill-conditioned")]
    ClusteredZeros { separation: f64 },

    #[error("lattice enumeration supports distinct zeros or a pure power z^d only")]
    UnsupportedLattice,

    #[error("guard band too small: operation needs {needed}, only {available} available")]
    GuardTooSmall { needed: usize, available: usize },

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("{0}")]
    InvalidInput(String),
}
