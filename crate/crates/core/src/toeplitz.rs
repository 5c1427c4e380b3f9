//! Toeplitz operator truncations on H²: matrix realizations of T_φ for
//! trigonometric-polynomial symbols, exact co-analytic application on
//! polynomials, multiplier-norm estimates, and composition checks.

use faer::Mat;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::hardy::AnalyticPoly;
use crate::range::{self, leading_block};
use crate::symbols::TrigPoly;
use crate::Result;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A finitely supported Laurent symbol φ̂(l), −m ≤ l ≤ m, with the analytic
/// (l ≥ 0) and co-analytic (l < 0) parts stored separately.
#[derive(Clone, Debug)]
pub struct LaurentSymbol {
    /// φ̂(0), φ̂(1), … (analytic part).
    pos: Vec<Complex64>,
    /// φ̂(−1), φ̂(−2), … (co-analytic part).
    neg: Vec<Complex64>,
}

impl LaurentSymbol {
    pub fn new(pos: Vec<Complex64>, neg: Vec<Complex64>) -> Self {
        let pos = if pos.is_empty() { vec![czero()] } else { pos };
        Self { pos, neg }
    }

    /// Analytic symbol φ: φ̂(l) = c_l for l ≥ 0.
    pub fn analytic(p: &AnalyticPoly) -> Self {
        Self::new(p.coeffs().to_vec(), vec![])
    }

    /// Co-analytic symbol φ̄ (the boundary conjugate of analytic φ):
    /// φ̄̂(−l) = conj(c_l).
    pub fn co_analytic(p: &AnalyticPoly) -> Self {
        let pos = vec![p.coeff(0).conj()];
        let neg = (1..p.len()).map(|l| p.coeff(l).conj()).collect();
        Self::new(pos, neg)
    }

    /// Real trigonometric-polynomial symbol.
    pub fn from_trig(w: &TrigPoly) -> Self {
        let m = w.order();
        let pos = (0..=m as i64).map(|l| w.coeff(l)).collect();
        let neg = (1..=m as i64).map(|l| w.coeff(-l)).collect();
        Self::new(pos, neg)
    }

    /// The product symbol ψ̄·φ for analytic ψ, φ (exact Laurent coefficients).
    pub fn co_analytic_times_analytic(psi: &AnalyticPoly, phi: &AnalyticPoly) -> Self {
        let dp = phi.len() as i64 - 1;
        let dq = psi.len() as i64 - 1;
        let coeff = |l: i64| -> Complex64 {
            let mut acc = czero();
            for k in 0..=dq {
                let j = l + k;
                if (0..=dp).contains(&j) {
                    acc += psi.coeff(k as usize).conj() * phi.coeff(j as usize);
                }
            }
            acc
        };
        Self::new(
            (0..=dp).map(coeff).collect(),
            (1..=dq).map(|l| coeff(-l)).collect(),
        )
    }

    /// φ̂(l) with zeros outside the support.
    pub fn coeff(&self, l: i64) -> Complex64 {
        if l >= 0 {
            self.pos.get(l as usize).copied().unwrap_or(czero())
        } else {
            self.neg.get((-l - 1) as usize).copied().unwrap_or(czero())
        }
    }

    /// Degree of the analytic part (trailing zeros trimmed).
    pub fn analytic_degree(&self) -> usize {
        self.pos.iter().rposition(|c| c.norm() > 0.0).unwrap_or(0)
    }

    /// Order of the co-analytic part (number of active negative indices).
    pub fn co_analytic_degree(&self) -> usize {
        self.neg
            .iter()
            .rposition(|c| c.norm() > 0.0)
            .map_or(0, |i| i + 1)
    }

    /// The symbol of the adjoint operator: conj(φ) on the circle,
    /// ψ̂(l) = conj(φ̂(−l)).
    pub fn adjoint_symbol(&self) -> Self {
        let pos = std::iter::once(self.coeff(0).conj())
            .chain(self.neg.iter().map(|c| c.conj()))
            .collect();
        let neg = self.pos.iter().skip(1).map(|c| c.conj()).collect();
        Self::new(pos, neg)
    }

    /// Sup of |φ| over the M-point boundary grid.
    pub fn sup_grid(&self, m: usize) -> Result<f64> {
        let pos_grid = crate::hardy::boundary_samples(&AnalyticPoly::new(self.pos.clone()), m)?;
        // Σ_{l≥1} φ̂(−l) z^{−l} = conj(Σ_{l≥1} conj(φ̂(−l)) z^l) on |z| = 1.
        let mut neg_coeffs = vec![czero()];
        neg_coeffs.extend(self.neg.iter().map(|c| c.conj()));
        let neg_grid = crate::hardy::boundary_samples(&AnalyticPoly::new(neg_coeffs), m)?;
        Ok(pos_grid
            .values()
            .iter()
            .zip(neg_grid.values())
            .map(|(p, n)| (p + n.conj()).norm())
            .fold(0.0, f64::max))
    }
}

/// N×N truncation of the Toeplitz operator with entries (n, k) = φ̂(n−k);
/// analytic symbols are lower triangular.
#[derive(Clone, Debug)]
pub struct ToeplitzMatrix {
    n: usize,
    symbol: LaurentSymbol,
    mat: Mat<Complex64>,
}

impl ToeplitzMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbol(&self) -> &LaurentSymbol {
        &self.symbol
    }

    pub fn mat(&self) -> &Mat<Complex64> {
        &self.mat
    }

    /// The adjoint truncation; equals the truncation of the conjugate-reflected
    /// symbol.
    pub fn adjoint(&self) -> ToeplitzMatrix {
        toeplitz_truncation(&self.symbol.adjoint_symbol(), self.n)
    }

    /// Direct banded application, O(N·m).
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let da = self.symbol.analytic_degree() as i64;
        let dc = self.symbol.co_analytic_degree() as i64;
        let mut out = vec![czero(); n];
        for (row, o) in out.iter_mut().enumerate() {
            let lo = (row as i64 - da).max(0);
            let hi = (row as i64 + dc).min(n as i64 - 1);
            for col in lo..=hi {
                *o += self.symbol.coeff(row as i64 - col) * v[col as usize];
            }
        }
        out
    }

    /// Apply to a polynomial with trusted-prefix bookkeeping: a co-analytic part
    /// of order d consumes d coefficients of guard band.
    pub fn apply_poly(&self, f: &AnalyticPoly) -> AnalyticPoly {
        let padded = f.resized(self.n);
        let out = self.apply(padded.coeffs());
        let dc = self.symbol.co_analytic_degree();
        let trusted = if f.trusted_degree() == f.len() - 1 && f.len() + dc <= self.n {
            // Exact polynomial fully inside the truncation window.
            self.n - 1
        } else {
            f.trusted_degree().min(self.n - 1).saturating_sub(dc)
        };
        AnalyticPoly::with_trusted(out, trusted)
    }
}

/// Build the N×N truncation of T_φ.
pub fn toeplitz_truncation(phi: &LaurentSymbol, n: usize) -> ToeplitzMatrix {
    let mat = Mat::from_fn(n, n, |r, c| phi.coeff(r as i64 - c as i64));
    ToeplitzMatrix {
        n,
        symbol: phi.clone(),
        mat,
    }
}

/// Exact T_b̄ f for polynomial inputs: coefficient n of the output is
/// Σ_j conj(b_j)·f_{n+j}. The degree does not increase.
pub fn apply_co_analytic(b: &AnalyticPoly, f: &AnalyticPoly) -> AnalyticPoly {
    let n = f.len();
    let out = (0..n)
        .map(|row| {
            (0..b.len())
                .map(|j| b.coeff(j).conj() * f.coeff(row + j))
                .sum()
        })
        .collect();
    let db = b.degree(0.0);
    let trusted = if f.trusted_degree() == n - 1 {
        n - 1
    } else {
        f.trusted_degree().saturating_sub(db)
    };
    AnalyticPoly::with_trusted(out, trusted)
}

/// Largest singular value of the N-truncation of an analytic multiplier.
/// Guaranteed ≤ sup |φ| and non-decreasing in N.
pub fn multiplier_norm_estimate(phi: &LaurentSymbol, n: usize) -> Result<f64> {
    if phi.co_analytic_degree() != 0 {
        return Err(CoreError::InvalidInput(
            "multiplier norm estimate needs an analytic symbol".into(),
        ));
    }
    let t = toeplitz_truncation(phi, n);
    let gram = t.mat.adjoint() * &t.mat;
    let (eigs, _) = range::eigh(&gram)?;
    Ok(eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Max-entry norm of (T_ψ̄·T_φ − T_{ψ̄φ}) on the leading (N−guard)² block.
/// The truncated product is exact there, so the residual must vanish to
/// rounding for polynomial symbols.
pub fn composition_check(
    psi: &AnalyticPoly,
    phi: &AnalyticPoly,
    n: usize,
    guard: usize,
) -> Result<f64> {
    let dp = phi.degree(0.0);
    let dq = psi.degree(0.0);
    if n <= dp + dq + guard {
        return Err(CoreError::GuardTooSmall {
            needed: dp + dq + guard + 1,
            available: n,
        });
    }
    let left = toeplitz_truncation(&LaurentSymbol::co_analytic(psi), n);
    let right = toeplitz_truncation(&LaurentSymbol::analytic(phi), n);
    let product = toeplitz_truncation(&LaurentSymbol::co_analytic_times_analytic(psi, phi), n);
    let diff = left.mat() * right.mat() - product.mat();
    let block = leading_block(&diff, n - guard);
    let mut worst = 0.0f64;
    for r in 0..block.nrows() {
        for c in 0..block.ncols() {
            worst = worst.max(block[(r, c)].norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{evaluate, inner_product_h2, kernel_poly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn truncation_shift_matrices() {
        let z = LaurentSymbol::analytic(&AnalyticPoly::monomial(1));
        let t = toeplitz_truncation(&z, 3);
        for r in 0..3 {
            for k in 0..3 {
                let expect = if r == k + 1 { 1.0 } else { 0.0 };
                assert_eq!(t.mat()[(r, k)], c(expect, 0.0));
            }
        }
        let zbar = LaurentSymbol::co_analytic(&AnalyticPoly::monomial(1));
        let tb = toeplitz_truncation(&zbar, 3);
        for r in 0..3 {
            for k in 0..3 {
                assert_eq!(tb.mat()[(r, k)], t.mat()[(k, r)].conj());
            }
        }
    }

    #[test]
    fn adjoint_matches_conjugate_transpose() {
        let p = AnalyticPoly::new(vec![c(0.5, 0.1), c(-0.2, 0.3), c(0.0, -0.7)]);
        let t = toeplitz_truncation(&LaurentSymbol::analytic(&p), 6);
        let adj = t.adjoint();
        for r in 0..6 {
            for k in 0..6 {
                assert!((adj.mat()[(r, k)] - t.mat()[(k, r)].conj()).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn co_analytic_average_applied_to_z() {
        // P₊((1+z̄)/2 · z) = (z+1)/2.
        let phi = LaurentSymbol::co_analytic(&AnalyticPoly::from_real(&[1.0, 1.0]))
            ;
        let phi_half = LaurentSymbol::new(
            phi.pos.iter().map(|x| x / 2.0).collect(),
            phi.neg.iter().map(|x| x / 2.0).collect(),
        );
        let t = toeplitz_truncation(&phi_half, 8);
        let out = t.apply_poly(&AnalyticPoly::monomial(1));
        assert!((out.coeff(0) - c(0.5, 0.0)).norm() <= 1e-15);
        assert!((out.coeff(1) - c(0.5, 0.0)).norm() <= 1e-15);
        assert!((2..8).all(|k| out.coeff(k).norm() == 0.0));
    }

    #[test]
    fn apply_co_analytic_examples() {
        let b = AnalyticPoly::from_real(&[0.5, 0.5]);
        let out = apply_co_analytic(&b, &AnalyticPoly::one());
        assert_eq!(out.coeff(0), c(0.5, 0.0));

        let out = apply_co_analytic(&AnalyticPoly::monomial(1), &AnalyticPoly::monomial(1));
        assert_eq!(out.coeff(0), c(1.0, 0.0));
        assert_eq!(out.coeff(1), c(0.0, 0.0));

        // T_b̄ k_λ = conj(b(λ))·k_λ up to the truncation tail: b(1/2) = 3/4.
        let k = kernel_poly(c(0.5, 0.0), 64).unwrap();
        let out = apply_co_analytic(&b, &k);
        let expect = k.scaled(c(0.75, 0.0));
        let worst = (0..63)
            .map(|i| (out.coeff(i) - expect.coeff(i)).norm())
            .fold(0.0, f64::max);
        assert!(worst <= 2f64.powi(-63));
    }

    #[test]
    fn multiplier_norm_examples() {
        let z = LaurentSymbol::analytic(&AnalyticPoly::monomial(1));
        for n in [2usize, 5, 16] {
            let est = multiplier_norm_estimate(&z, n).unwrap();
            assert!((est - 1.0).abs() <= 1e-12, "n={n} est={est}");
        }
        let avg = LaurentSymbol::analytic(&AnalyticPoly::from_real(&[0.5, 0.5]));
        let est1 = multiplier_norm_estimate(&avg, 1).unwrap();
        assert!((est1 - 0.5).abs() <= 1e-15);
        let est = multiplier_norm_estimate(&avg, 1024).unwrap();
        assert!((est - 1.0).abs() <= 0.02, "est={est}");
        assert!(est <= 1.0 + 1e-12);
    }

    #[test]
    fn multiplier_norm_monotone_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x70e9);
        for _ in 0..5 {
            let p = AnalyticPoly::new(
                (0..4)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            );
            let phi = LaurentSymbol::analytic(&p);
            let sup = phi.sup_grid(4096).unwrap();
            let mut prev = 0.0;
            for n in [4usize, 8, 16, 32, 64] {
                let est = multiplier_norm_estimate(&phi, n).unwrap();
                assert!(est + 1e-12 >= prev, "monotone failure at n={n}");
                assert!(est <= sup + 1e-10, "bound failure at n={n}");
                prev = est;
            }
        }
    }

    #[test]
    fn composition_examples() {
        // ψ = φ = z: S*S = I on the whole block.
        let z = AnalyticPoly::monomial(1);
        let res = composition_check(&z, &z, 16, 2).unwrap();
        assert!(res <= 1e-16);

        // ψ = φ = (1−z)/2: both sides carry the symbol |a|² on the guard block.
        let a = AnalyticPoly::from_real(&[0.5, -0.5]);
        let res = composition_check(&a, &a, 64, 8).unwrap();
        assert!(res <= 1e-13, "residual {res}");

        // ψ = 1: T_φ on both sides.
        let one = AnalyticPoly::one();
        let p = AnalyticPoly::new(vec![c(0.3, 0.1), c(0.0, -0.4), c(0.2, 0.0)]);
        let res = composition_check(&one, &p, 32, 4).unwrap();
        assert!(res == 0.0);

        assert!(matches!(
            composition_check(&a, &a, 10, 9),
            Err(CoreError::GuardTooSmall { .. })
        ));
    }

    #[test]
    fn eigenvector_identity_random() {
        // ‖T_φ̄ k_λ − conj(φ(λ))·k_λ‖₂ ≤ ‖φ‖∞·|λ|^{N−6}·10, floored at
        // rounding noise (the tail term underflows it for large N).
        let mut rng = ChaCha8Rng::seed_from_u64(0xe19e);
        for n in [24usize, 256] {
            for _ in 0..20 {
                let d = rng.gen_range(1..=6usize);
                let p = AnalyticPoly::new(
                    (0..=d)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                );
                let r = rng.gen_range(0.3..0.7f64);
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                let lam = c(r * th.cos(), r * th.sin());
                let k = kernel_poly(lam, n).unwrap();
                let lhs = apply_co_analytic(&p, &k);
                let scale = evaluate(&p, lam).unwrap().conj();
                let diff = lhs.sub(&k.scaled(scale));
                let sup = LaurentSymbol::analytic(&p).sup_grid(4096).unwrap();
                let bound = (sup * r.powi(n as i32 - 6) * 10.0).max(1e-14);
                assert!(
                    diff.norm() <= bound,
                    "n={n} norm {} bound {}",
                    diff.norm(),
                    bound
                );
            }
        }
    }

    #[test]
    fn evaluation_bounded_by_multiplier_norm() {
        // |φ(λ)| ≤ estimate(N=256) + 0.05 on sampled disc points.
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0d9);
        for _ in 0..10 {
            let p = AnalyticPoly::new(
                (0..4)
                    .map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                    .collect(),
            );
            let est = multiplier_norm_estimate(&LaurentSymbol::analytic(&p), 256).unwrap();
            for _ in 0..10 {
                let r = rng.gen_range(0.0..0.95f64);
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                let lam = c(r * th.cos(), r * th.sin());
                let v = evaluate(&p, lam).unwrap().norm();
                assert!(v <= est + 0.05);
            }
        }
    }

    #[test]
    fn kernel_reproduction_via_matrix_apply() {
        // The matrix route and the exact co-analytic route agree on polynomials.
        let b = AnalyticPoly::new(vec![c(0.2, -0.1), c(0.4, 0.3), c(-0.1, 0.0)]);
        let f = AnalyticPoly::new(vec![c(1.0, 1.0), c(0.0, -2.0), c(0.5, 0.0), c(0.0, 0.1)]);
        let t = toeplitz_truncation(&LaurentSymbol::co_analytic(&b), 16);
        let via_matrix = t.apply_poly(&f.resized(16));
        let exact = apply_co_analytic(&b, &f);
        for k in 0..f.len() {
            assert!((via_matrix.coeff(k) - exact.coeff(k)).norm() <= 1e-15);
        }
        let ip_matrix = inner_product_h2(&via_matrix, &f);
        let ip_exact = inner_product_h2(&exact, &f);
        assert!((ip_matrix - ip_exact).norm() <= 1e-14);
    }
}
