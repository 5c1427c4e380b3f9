//! Truncated Hardy-space arithmetic: coefficient vectors in the Taylor basis,
//! the backward shift, boundary sampling on root-of-unity grids, Cauchy kernels.

use num_complex::Complex64;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};

use crate::error::CoreError;
use crate::Result;

/// Slack admitted when testing membership in the closed disc.
const DISC_TOL: f64 = 1e-12;

/// A truncated analytic function: finitely many Taylor coefficients c_0..c_{N-1}.
///
/// `trusted_degree` marks the guard band: coefficients with index beyond it are
/// still stored but may have been corrupted by an upstream truncated operation.
/// Freshly constructed polynomials are trusted in full.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticPoly {
    coeffs: Vec<Complex64>,
    trusted_degree: usize,
}

impl AnalyticPoly {
    /// Fully-trusted polynomial from raw coefficients. An empty slice becomes the
    /// zero polynomial of length 1 (N ≥ 1 invariant).
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        let trusted_degree = coeffs.len() - 1;
        Self {
            coeffs,
            trusted_degree,
        }
    }

    /// Polynomial with an explicit trusted prefix (used by truncated operations).
    pub fn with_trusted(coeffs: Vec<Complex64>, trusted_degree: usize) -> Self {
        let mut p = Self::new(coeffs);
        p.trusted_degree = trusted_degree.min(p.coeffs.len() - 1);
        p
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self::with_trusted(vec![Complex64::new(0.0, 0.0); n.max(1)], n.max(1) - 1)
    }

    pub fn one() -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)])
    }

    /// The monomial z^k.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient c_k, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored length N.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 1 invariant
    }

    pub fn trusted_degree(&self) -> usize {
        self.trusted_degree
    }

    /// Index of the last coefficient above `tol` in modulus (0 for the zero polynomial).
    pub fn degree(&self, tol: f64) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .unwrap_or(0)
    }

    /// Squared H² norm Σ|c_k|².
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Keep the first n coefficients (pads with zeros if n exceeds the length).
    pub fn resized(&self, n: usize) -> Self {
        let n = n.max(1);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, Complex64::new(0.0, 0.0));
        Self {
            coeffs,
            trusted_degree: self.trusted_degree.min(n - 1),
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            trusted_degree: self.trusted_degree,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::with_trusted(coeffs, self.trusted_degree.min(other.trusted_degree))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Cauchy product, exact for polynomial data.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len() + other.len() - 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// Coefficient-conjugated polynomial: realizes φ*(z) = conj(φ(conj(z))).
    pub fn conj_coeffs(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            trusted_degree: self.trusted_degree,
        }
    }
}

/// ⟨f, g⟩ = Σ c_k(f)·conj(c_k(g)); linear in f, conjugate-linear in g.
pub fn inner_product_h2(f: &AnalyticPoly, g: &AnalyticPoly) -> Complex64 {
    let n = f.len().min(g.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        acc += f.coeffs[k] * g.coeffs[k].conj();
    }
    acc
}

/// S*f = (f − f(0))/z: coefficients shifted left by one.
pub fn backward_shift(f: &AnalyticPoly) -> AnalyticPoly {
    if f.len() == 1 {
        return AnalyticPoly::zero(1);
    }
    let coeffs = f.coeffs[1..].to_vec();
    let trusted = f.trusted_degree.saturating_sub(1);
    AnalyticPoly::with_trusted(coeffs, trusted)
}

/// Horner evaluation on the closed disc; points outside are rejected.
pub fn evaluate(f: &AnalyticPoly, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + DISC_TOL {
        return Err(CoreError::OutsideDisc { modulus: z.norm() });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for c in f.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    Ok(acc)
}

/// Samples of an analytic polynomial at the M-th roots of unity.
#[derive(Clone, Debug)]
pub struct BoundaryGrid {
    m: usize,
    values: Vec<Complex64>,
}

impl BoundaryGrid {
    /// Wrap raw grid values (length must be a power of two).
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        let m = values.len();
        if !m.is_power_of_two() {
            return Err(CoreError::GridNotPowerOfTwo { m });
        }
        Ok(Self { m, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// The j-th grid point e^{2πi j/M}.
    pub fn point(&self, j: usize) -> Complex64 {
        root_of_unity(self.m, j)
    }

    /// Recover the first n Taylor coefficients by the forward DFT divided by M.
    pub fn recover_coeffs(&self, n: usize) -> Vec<Complex64> {
        let mut buf: Vec<FftComplex<f64>> = self.values.iter().map(|v| FftComplex::new(v.re, v.im)).collect();
        FftPlanner::new().plan_fft_forward(self.m).process(&mut buf);
        buf.iter()
            .take(n)
            .map(|v| Complex64::new(v.re / self.m as f64, v.im / self.m as f64))
            .collect()
    }

    /// Grid mean of |values|² (Parseval partner of the H² norm).
    pub fn mean_abs_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.m as f64
    }

    /// Grid minimum of the real part.
    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    /// Grid maximum of the modulus.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// e^{2πi j/M}, reduced mod M.
pub fn root_of_unity(m: usize, j: usize) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * (j % m) as f64 / m as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Evaluate f at all M-th roots of unity via the unnormalized inverse FFT of the
/// zero-padded coefficients. Exact (up to rounding) for M ≥ N; smaller M aliases.
pub fn boundary_samples(f: &AnalyticPoly, m: usize) -> Result<BoundaryGrid> {
    if !m.is_power_of_two() {
        return Err(CoreError::GridNotPowerOfTwo { m });
    }
    if m < f.len() {
        return Err(CoreError::Aliasing { m, n: f.len() });
    }
    let mut buf = vec![FftComplex::new(0.0, 0.0); m];
    for (k, c) in f.coeffs.iter().enumerate() {
        buf[k] = FftComplex::new(c.re, c.im);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let values = buf.iter().map(|v| Complex64::new(v.re, v.im)).collect();
    Ok(BoundaryGrid { m, values })
}

/// Truncated Cauchy kernel k_λ(z) = 1/(1 − conj(λ)z): coefficients conj(λ)^n.
#[derive(Clone, Debug)]
pub struct CauchyKernel {
    lambda: Complex64,
    n: usize,
}

impl CauchyKernel {
    pub fn new(lambda: Complex64, n: usize) -> Result<Self> {
        if lambda.norm() >= 1.0 {
            return Err(CoreError::KernelOutsideDisc {
                modulus: lambda.norm(),
            });
        }
        Ok(Self { lambda, n: n.max(1) })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Truncated coefficient vector (conj(λ)^0, …, conj(λ)^{N−1}).
    pub fn poly(&self) -> AnalyticPoly {
        let lc = self.lambda.conj();
        let mut coeffs = Vec::with_capacity(self.n);
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..self.n {
            coeffs.push(p);
            p *= lc;
        }
        AnalyticPoly::new(coeffs)
    }

    /// Squared H² norm of the discarded tail: |λ|^{2N}/(1 − |λ|²).
    pub fn tail_norm_sq(&self) -> f64 {
        let r2 = self.lambda.norm_sqr();
        r2.powi(self.n as i32) / (1.0 - r2)
    }
}

/// Truncated kernel coefficients as a bare polynomial.
pub fn kernel_poly(lambda: Complex64, n: usize) -> Result<AnalyticPoly> {
    Ok(CauchyKernel::new(lambda, n)?.poly())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_product_sign_cancellation() {
        let f = AnalyticPoly::from_real(&[1.0, 1.0]);
        let g = AnalyticPoly::from_real(&[1.0, -1.0]);
        assert_eq!(inner_product_h2(&f, &g), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_monomial_orthonormal() {
        let z3 = AnalyticPoly::monomial(3);
        assert_eq!(inner_product_h2(&z3, &z3), c(1.0, 0.0));
        let z2 = AnalyticPoly::monomial(2);
        assert_eq!(inner_product_h2(&z3, &z2), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_kernel_geometric_series() {
        // Σ (1/4)^n over n<64 = 4/3 − (1/4)^64/(3/4); the tail is ~2.9e−39.
        let k = kernel_poly(c(0.5, 0.0), 64).unwrap();
        let ip = inner_product_h2(&k, &k);
        assert!((ip.re - 4.0 / 3.0).abs() <= 1e-12, "got {}", ip.re);
        assert_eq!(ip.im, 0.0);
    }

    #[test]
    fn backward_shift_drops_constant() {
        let f = AnalyticPoly::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(backward_shift(&f).coeffs(), &[c(2.0, 0.0), c(3.0, 0.0)]);
        let one = AnalyticPoly::one();
        assert_eq!(backward_shift(&one).coeffs(), &[c(0.0, 0.0)]);
    }

    #[test]
    fn backward_shift_kernel_is_eigenvector() {
        // S* applied to the truncated kernel equals conj(λ)·(kernel truncated at N−1).
        let n = 32;
        let k = kernel_poly(c(0.5, 0.0), n).unwrap();
        let shifted = backward_shift(&k);
        let expect = kernel_poly(c(0.5, 0.0), n - 1).unwrap().scaled(c(0.5, 0.0));
        for i in 0..n - 1 {
            assert!((shifted.coeff(i) - expect.coeff(i)).norm() == 0.0);
        }
    }

    #[test]
    fn backward_shift_contracts() {
        let f = AnalyticPoly::new(vec![c(1.0, 2.0), c(-0.5, 0.25), c(0.0, 3.0)]);
        assert!(backward_shift(&f).norm_sq() <= f.norm_sq());
    }

    #[test]
    fn evaluate_examples() {
        let f = AnalyticPoly::from_real(&[1.0, 1.0]);
        assert_eq!(evaluate(&f, c(0.5, 0.0)).unwrap(), c(1.5, 0.0));
        let z = AnalyticPoly::monomial(1);
        assert_eq!(evaluate(&z, c(0.0, 1.0)).unwrap(), c(0.0, 1.0));
        assert!(matches!(
            evaluate(&z, c(1.2, 0.0)),
            Err(CoreError::OutsideDisc { .. })
        ));
    }

    #[test]
    fn evaluate_kernel_at_its_point() {
        // k_λ(λ) = 1/(1−|λ|²) = 9/8 for λ = 1/3, up to a ~(1/9)^64 tail.
        let k = kernel_poly(c(1.0 / 3.0, 0.0), 64).unwrap();
        let v = evaluate(&k, c(1.0 / 3.0, 0.0)).unwrap();
        assert!((v.re - 9.0 / 8.0).abs() <= 1e-12);
        assert!(v.im.abs() <= 1e-15);
    }

    #[test]
    fn boundary_samples_constant_and_monomial() {
        let one = AnalyticPoly::one();
        let g = boundary_samples(&one, 8).unwrap();
        for v in g.values() {
            assert!((v - c(1.0, 0.0)).norm() <= 1e-15);
        }
        let z = AnalyticPoly::monomial(1);
        let g = boundary_samples(&z, 4).unwrap();
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (v, e) in g.values().iter().zip(expect) {
            assert!((v - e).norm() <= 1e-15);
        }
    }

    #[test]
    fn boundary_samples_parseval() {
        let f = AnalyticPoly::from_real(&[1.0, 1.0]);
        let g = boundary_samples(&f, 4096).unwrap();
        assert!((g.mean_abs_sq() - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn boundary_samples_roundtrip() {
        let f = AnalyticPoly::new(vec![c(0.3, -0.1), c(0.0, 0.7), c(-1.2, 0.4), c(0.05, 0.0)]);
        let g = boundary_samples(&f, 64).unwrap();
        let rec = g.recover_coeffs(f.len());
        let err: f64 = rec
            .iter()
            .zip(f.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-13 * f.norm());
    }

    #[test]
    fn boundary_samples_rejects_bad_grids() {
        let f = AnalyticPoly::from_real(&[1.0; 10]);
        assert!(matches!(
            boundary_samples(&f, 8),
            Err(CoreError::Aliasing { .. })
        ));
        assert!(matches!(
            boundary_samples(&f, 12),
            Err(CoreError::GridNotPowerOfTwo { .. })
        ));
    }

    #[test]
    fn kernel_tail_bound() {
        let k = CauchyKernel::new(c(0.5, 0.0), 64).unwrap();
        let tail = k.tail_norm_sq();
        // (1/4)^64 / (3/4)
        assert!((tail - 0.25f64.powi(64) / 0.75).abs() <= 1e-50);
        assert!(CauchyKernel::new(c(1.0, 0.0), 8).is_err());
    }

    #[test]
    fn kernel_reproduction_exact_for_polynomials() {
        // ⟨f, k_λ⟩ = f(λ) whenever deg f < N.
        let f = AnalyticPoly::new(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.0, -1.0)]);
        for &(re, im) in &[(0.4, 0.3), (-0.7, 0.1), (0.0, 0.0), (0.2, -0.6)] {
            let lam = c(re, im);
            let k = kernel_poly(lam, 16).unwrap();
            let lhs = inner_product_h2(&f, &k);
            let rhs = evaluate(&f, lam).unwrap();
            assert!((lhs - rhs).norm() <= 1e-14);
        }
    }

    #[test]
    fn trusted_degree_bookkeeping() {
        let p = AnalyticPoly::with_trusted(vec![c(1.0, 0.0); 8], 5);
        assert_eq!(p.trusted_degree(), 5);
        assert_eq!(backward_shift(&p).trusted_degree(), 4);
        assert_eq!(p.resized(4).trusted_degree(), 3);
    }
}
