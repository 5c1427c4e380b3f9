//! Computational toolkit for backward-shift-invariant subspace experiments on the
//! Hardy space H² and the Bergman space A² of the unit disc.
//!
//! Everything is finite and exact-first: analytic functions are truncated Taylor
//! coefficient vectors, operators are N×N truncations with explicit guard-band
//! bookkeeping, and boundary integrals are power-of-two root-of-unity quadratures
//! that are exact for polynomial data.
//!
//! Module map:
//! - [`hardy`] — H² coefficient arithmetic, boundary grids, Cauchy kernels.
//! - [`symbols`] — Blaschke products, Fejér–Riesz factorization, Pythagorean mates.
//! - [`toeplitz`] — Toeplitz truncations on H² and exact co-analytic application.
//! - [`range`] — range spaces M(A), Douglas equality/contraction criteria, PSD square roots.
//! - [`model`] — finite-dimensional model spaces K_Θ and their invariant-subspace lattice.
//! - [`debranges`] — de Branges–Rovnyak H(b) norms, spectral densities, invariance and
//!   cyclicity probes.
//! - [`bergman`] — Bergman Toeplitz matrices, sub-Bergman Gram operators, the
//!   shift-invariance inequality and the identity-chain discrepancy probe.

pub mod bergman;
pub mod debranges;
pub mod error;
pub mod hardy;
pub mod model;
pub mod range;
pub mod symbols;
pub mod toeplitz;

pub use error::CoreError;
pub use faer::Mat;
pub use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
