//! Model spaces K_Θ = (ΘH²)^⊥ for finite Blaschke products: Takenaka–Malmquist
//! bases, membership tests, the full invariant-subspace lattice of the
//! compressed backward shift, and divisor recovery from a subspace.

use faer::Mat;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::hardy::{backward_shift, inner_product_h2, AnalyticPoly};
use crate::symbols::BlaschkeProduct;
use crate::Result;

/// Zeros closer than this are rejected as ill-conditioned for a kernel basis.
const ZERO_SEPARATION: f64 = 1e-8;
/// Principal-angle threshold for subspace equality.
pub const SUBSPACE_GAP_TOL: f64 = 1e-7;
/// Compressed-shift eigenvalues within this of 0 count as the origin.
const ORIGIN_TOL: f64 = 1e-6;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// The kernel-derivative vector ∂^l/∂w̄^l k_w |_{w=λ}: coefficients
/// j!/(j−l)!·conj(λ)^{j−l} for j ≥ l.
fn kernel_derivative(lambda: Complex64, l: usize, n: usize) -> AnalyticPoly {
    let lc = lambda.conj();
    let coeffs = (0..n)
        .map(|j| {
            if j < l {
                czero()
            } else {
                let falling: f64 = (0..l).map(|i| (j - i) as f64).product();
                lc.powu((j - l) as u32) * falling
            }
        })
        .collect();
    AnalyticPoly::new(coeffs)
}

/// Gram–Schmidt with one re-orthogonalization pass; vectors must be
/// independent at truncation length n.
pub fn orthonormalize(vectors: &[AnalyticPoly], n: usize) -> Result<Vec<AnalyticPoly>> {
    let mut basis: Vec<AnalyticPoly> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.resized(n);
        let original = w.norm();
        for _ in 0..2 {
            for e in &basis {
                let c = inner_product_h2(&w, e);
                w = w.sub(&e.scaled(c));
            }
        }
        let norm = w.norm();
        if norm <= 1e-12 * original.max(1.0) {
            return Err(CoreError::InvalidInput(
                "spanning set is numerically dependent".into(),
            ));
        }
        w = w.scaled(Complex64::new(1.0 / norm, 0.0));
        basis.push(w);
    }
    Ok(basis)
}

/// Distance from f to the span of an orthonormal set, via the explicit
/// residual vector (the Pythagorean form loses half the digits to
/// cancellation when f is a member).
pub fn projection_distance(f: &AnalyticPoly, basis: &[AnalyticPoly]) -> f64 {
    let len = basis.iter().map(|e| e.len()).fold(f.len(), usize::max);
    let mut resid = f.resized(len);
    for _ in 0..2 {
        for e in basis {
            let c = inner_product_h2(&resid, e);
            resid = resid.sub(&e.scaled(c));
        }
    }
    resid.norm()
}

/// Max projection distance of S*v from the span, over spanning vectors v.
pub fn invariance_residual(basis: &[AnalyticPoly]) -> f64 {
    basis
        .iter()
        .map(|v| projection_distance(&backward_shift(v), basis))
        .fold(0.0, f64::max)
}

/// sin of the largest principal angle between two orthonormal spans;
/// infinite when dimensions differ.
pub fn subspace_gap(a: &[AnalyticPoly], b: &[AnalyticPoly]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let d = a.len();
    let cross = Mat::from_fn(d, d, |r, c| inner_product_h2(&b[c], &a[r]));
    let svd = match cross.svd() {
        Ok(s) => s,
        Err(_) => return f64::INFINITY,
    };
    let sigma_min = svd.S()[d - 1].re.clamp(0.0, 1.0);
    (1.0 - sigma_min * sigma_min).max(0.0).sqrt()
}

/// A model space with its orthonormal Takenaka–Malmquist-style basis at
/// truncation length n.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    theta: BlaschkeProduct,
    basis: Vec<AnalyticPoly>,
    n: usize,
}

impl ModelSpace {
    pub fn theta(&self) -> &BlaschkeProduct {
        &self.theta
    }

    pub fn basis(&self) -> &[AnalyticPoly] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// An S*-invariant subspace of a model space, held as an orthonormal span.
#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    ambient: ModelSpace,
    vectors: Vec<AnalyticPoly>,
}

impl InvariantSubspace {
    pub fn ambient(&self) -> &ModelSpace {
        &self.ambient
    }

    pub fn vectors(&self) -> &[AnalyticPoly] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Orthonormal basis of K_Θ from Cauchy kernels at the zeros (derivative
/// kernels for multiplicity). For Θ = z^d the result is exactly the monomials.
pub fn tm_basis(theta: &BlaschkeProduct, n: usize) -> Result<ModelSpace> {
    let d = theta.degree();
    if n < d + 16 {
        return Err(CoreError::InvalidInput(format!(
            "truncation {n} too small for degree {d}"
        )));
    }
    let zeros = theta.zeros();
    for (i, (zi, _)) in zeros.iter().enumerate() {
        for (zj, _) in zeros.iter().skip(i + 1) {
            let sep = (zi - zj).norm();
            if sep < ZERO_SEPARATION {
                return Err(CoreError::ClusteredZeros { separation: sep });
            }
        }
    }
    let mut raw = Vec::with_capacity(d);
    for (lambda, mult) in zeros {
        for l in 0..*mult {
            raw.push(kernel_derivative(*lambda, l, n));
        }
    }
    let basis = orthonormalize(&raw, n)?;
    Ok(ModelSpace {
        theta: theta.clone(),
        basis,
        n,
    })
}

/// H²-distance from f to K (0 within 1e−8 means member).
pub fn membership(f: &AnalyticPoly, k: &ModelSpace) -> f64 {
    projection_distance(f, &k.basis)
}

/// All S*-invariant subspaces of K: subset spans of kernel eigenvectors when
/// the zeros are pairwise distinct, the polynomial-degree chain for Θ = z^d.
pub fn lattice_enumerate(k: &ModelSpace) -> Result<Vec<InvariantSubspace>> {
    let zeros = k.theta.zeros();
    let d = k.theta.degree();
    let chain_case = zeros.len() == 1 && zeros[0].0.norm() == 0.0;
    let distinct_case = zeros.iter().all(|(_, m)| *m == 1);

    let make = |vectors: Vec<AnalyticPoly>| InvariantSubspace {
        ambient: k.clone(),
        vectors,
    };

    if chain_case {
        // S* on K_{z^d} is the nilpotent Jordan block: invariant subspaces are
        // the polynomial-degree chain.
        let mut out = Vec::with_capacity(d + 1);
        for dim in 0..=d {
            let vectors = (0..dim).map(AnalyticPoly::monomial).collect::<Vec<_>>();
            let vectors = vectors.iter().map(|v| v.resized(k.n)).collect();
            out.push(make(vectors));
        }
        return Ok(out);
    }
    if !distinct_case {
        return Err(CoreError::UnsupportedLattice);
    }
    // Distinct zeros: eigenvectors of the compressed S* are the Cauchy
    // kernels; every subset span is invariant and these exhaust the lattice.
    let lambdas: Vec<Complex64> = zeros.iter().map(|(z, _)| *z).collect();
    let mut out = Vec::with_capacity(1 << d);
    for mask in 0u32..(1u32 << d) {
        let picked: Vec<AnalyticPoly> = (0..d)
            .filter(|j| mask & (1 << j) != 0)
            .map(|j| kernel_derivative(lambdas[j], 0, k.n))
            .collect();
        out.push(make(orthonormalize(&picked, k.n)?));
    }
    Ok(out)
}

/// The matrix of the compressed backward shift on an orthonormal span.
fn compressed_backward_shift(basis: &[AnalyticPoly]) -> Mat<Complex64> {
    let d = basis.len();
    Mat::from_fn(d, d, |r, c| {
        inner_product_h2(&backward_shift(&basis[c]), &basis[r])
    })
}

/// Recover the Blaschke divisor of an invariant subspace: zeros are the
/// conjugated eigenvalues of the compressed S*, with clustering for chains.
pub fn divisor_from_subspace(e: &InvariantSubspace) -> Result<BlaschkeProduct> {
    if e.dim() == 0 {
        return Ok(BlaschkeProduct::trivial());
    }
    let a = compressed_backward_shift(&e.vectors);
    let eigs = a
        .eigenvalues()
        .map_err(|err| CoreError::EigenFailure(format!("{err:?}")))?;
    let mut zeros: Vec<Complex64> = eigs.iter().map(|mu: &Complex64| mu.conj()).collect();
    zeros.sort_by(|p, q| (p.re, p.im).partial_cmp(&(q.re, q.im)).unwrap());
    // Cluster coincident eigenvalues into multiplicities; near-origin
    // clusters snap to 0 exactly.
    let mut clustered: Vec<(Complex64, usize)> = Vec::new();
    for z in zeros {
        match clustered.last_mut() {
            Some((rep, m)) if (*rep - z).norm() < ORIGIN_TOL => {
                *rep = (*rep * *m as f64 + z) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => clustered.push((z, 1)),
        }
    }
    for (z, _) in clustered.iter_mut() {
        if z.norm() < ORIGIN_TOL {
            *z = czero();
        }
    }
    let divisor = BlaschkeProduct::new(clustered, Complex64::new(1.0, 0.0))?;
    // Round-trip validation: the recovered divisor must span E again.
    let span = tm_basis(&divisor, e.ambient.n)?;
    let gap = subspace_gap(span.basis(), &e.vectors);
    if gap > SUBSPACE_GAP_TOL {
        return Err(CoreError::InvalidInput(format!(
            "subspace is not invariant: divisor round-trip gap {gap:.3e}"
        )));
    }
    Ok(divisor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::kernel_poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cr(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    fn gram_deviation(basis: &[AnalyticPoly]) -> f64 {
        let d = basis.len();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let g = inner_product_h2(&basis[i], &basis[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - cr(expect)).norm());
            }
        }
        worst
    }

    #[test]
    fn monomial_basis_for_power_theta() {
        let k = tm_basis(&BlaschkeProduct::power(2), 32).unwrap();
        assert_eq!(k.dim(), 2);
        assert_eq!(k.basis()[0].coeff(0), cr(1.0));
        assert_eq!(k.basis()[1].coeff(1), cr(1.0));
        assert_eq!(k.basis()[0].norm_sq(), 1.0);
        assert_eq!(k.basis()[1].norm_sq(), 1.0);
    }

    #[test]
    fn single_zero_basis_is_normalized_kernel() {
        // ‖k_{1/2}‖² = 4/3: basis vector is (√3/2)·k_{1/2}.
        let theta = BlaschkeProduct::from_zeros(&[cr(0.5)]).unwrap();
        let k = tm_basis(&theta, 128).unwrap();
        assert_eq!(k.dim(), 1);
        let expect = kernel_poly(cr(0.5), 128)
            .unwrap()
            .scaled(cr(3.0f64.sqrt() / 2.0));
        let dev = k.basis()[0].sub(&expect).norm();
        assert!(dev <= 1e-12, "deviation {dev}");
    }

    #[test]
    fn mixed_zero_gram_identity() {
        let theta = BlaschkeProduct::new(
            vec![(cr(0.0), 1), (cr(0.5), 1)],
            cr(1.0),
        )
        .unwrap();
        let k = tm_basis(&theta, 64).unwrap();
        assert_eq!(k.dim(), 2);
        assert!(gram_deviation(k.basis()) <= 1e-12);
    }

    #[test]
    fn basis_orthogonal_to_theta_shifts() {
        // Each basis vector ⟂ Θ·zⁿ for n below the guard band.
        let theta = BlaschkeProduct::from_zeros(&[cr(0.4), c(-0.3, 0.2)]).unwrap();
        let n = 96;
        let k = tm_basis(&theta, n).unwrap();
        let expansion = theta.taylor(n);
        let guard = 20;
        for e in k.basis() {
            for shift in 0..n - theta.degree() - guard {
                let mut shifted = vec![czero(); shift];
                shifted.extend_from_slice(expansion.poly.coeffs());
                shifted.truncate(n);
                let ip = inner_product_h2(e, &AnalyticPoly::new(shifted));
                assert!(ip.norm() <= 1e-9, "shift {shift}: {}", ip.norm());
            }
        }
    }

    #[test]
    fn clustered_zeros_rejected() {
        let theta =
            BlaschkeProduct::from_zeros(&[cr(0.5), cr(0.5 + 1e-9)]).unwrap();
        assert!(matches!(
            tm_basis(&theta, 64),
            Err(CoreError::ClusteredZeros { .. })
        ));
    }

    #[test]
    fn membership_examples() {
        let k2 = tm_basis(&BlaschkeProduct::power(2), 32).unwrap();
        assert!(membership(&AnalyticPoly::one(), &k2) <= 1e-15);
        let z2 = AnalyticPoly::monomial(2);
        assert!((membership(&z2, &k2) - 1.0).abs() <= 1e-15);

        let theta = BlaschkeProduct::from_zeros(&[cr(0.5)]).unwrap();
        let k = tm_basis(&theta, 128).unwrap();
        let f = kernel_poly(cr(0.5), 128).unwrap();
        assert!(membership(&f, &k) <= 1e-10);
    }

    #[test]
    fn lattice_distinct_zeros() {
        let theta = BlaschkeProduct::from_zeros(&[cr(1.0 / 3.0), cr(0.5)]).unwrap();
        let k = tm_basis(&theta, 64).unwrap();
        let lat = lattice_enumerate(&k).unwrap();
        assert_eq!(lat.len(), 4);
        assert_eq!(lat[0].dim(), 0);
        assert_eq!(lat[1].dim(), 1);
        assert_eq!(lat[2].dim(), 1);
        assert_eq!(lat[3].dim(), 2);
        // Element 1 is span k_{1/3}, element 2 is span k_{1/2}.
        let k13 = orthonormalize(&[kernel_poly(cr(1.0 / 3.0), 64).unwrap()], 64).unwrap();
        let k12 = orthonormalize(&[kernel_poly(cr(0.5), 64).unwrap()], 64).unwrap();
        assert!(subspace_gap(lat[1].vectors(), &k13) <= 1e-12);
        assert!(subspace_gap(lat[2].vectors(), &k12) <= 1e-12);
        // Full element spans K.
        assert!(subspace_gap(lat[3].vectors(), k.basis()) <= 1e-10);
        // Invariance of every element.
        for e in &lat {
            assert!(invariance_residual(e.vectors()) <= 1e-9);
        }
    }

    #[test]
    fn lattice_power_chain() {
        let k = tm_basis(&BlaschkeProduct::power(3), 32).unwrap();
        let lat = lattice_enumerate(&k).unwrap();
        assert_eq!(lat.len(), 4);
        for (dim, e) in lat.iter().enumerate() {
            assert_eq!(e.dim(), dim);
            for (l, v) in e.vectors().iter().enumerate() {
                assert_eq!(v.coeff(l), cr(1.0));
            }
            assert!(invariance_residual(e.vectors()) <= 1e-12);
        }
    }

    #[test]
    fn lattice_trivial_theta_z() {
        let k = tm_basis(&BlaschkeProduct::power(1), 24).unwrap();
        let lat = lattice_enumerate(&k).unwrap();
        assert_eq!(lat.len(), 2);
        assert_eq!(lat[0].dim(), 0);
        assert_eq!(lat[1].dim(), 1);
    }

    #[test]
    fn lattice_rejects_repeated_nonzero_zeros() {
        let theta = BlaschkeProduct::new(vec![(cr(0.5), 2)], cr(1.0)).unwrap();
        let k = tm_basis(&theta, 64).unwrap();
        assert!(matches!(
            lattice_enumerate(&k),
            Err(CoreError::UnsupportedLattice)
        ));
    }

    #[test]
    fn divisor_recovery() {
        let theta = BlaschkeProduct::from_zeros(&[cr(1.0 / 3.0), cr(0.5)]).unwrap();
        let k = tm_basis(&theta, 64).unwrap();
        let lat = lattice_enumerate(&k).unwrap();

        // span{k_{1/2}} → Blaschke at 1/2.
        let div = divisor_from_subspace(&lat[2]).unwrap();
        assert_eq!(div.degree(), 1);
        assert!((div.zeros()[0].0 - cr(0.5)).norm() <= 1e-10);

        // Full K → Θ itself (same zero set).
        let div = divisor_from_subspace(&lat[3]).unwrap();
        assert_eq!(div.degree(), 2);
        let mut got: Vec<f64> = div.zeros().iter().map(|(z, _)| z.re).collect();
        got.sort_by(f64::total_cmp);
        assert!((got[0] - 1.0 / 3.0).abs() <= 1e-10);
        assert!((got[1] - 0.5).abs() <= 1e-10);

        // {0} → constant 1.
        let div = divisor_from_subspace(&lat[0]).unwrap();
        assert_eq!(div.degree(), 0);
        assert_eq!(div.eval(cr(0.3)), cr(1.0));
    }

    #[test]
    fn divisor_recovery_jordan_chain() {
        let k = tm_basis(&BlaschkeProduct::power(3), 32).unwrap();
        let lat = lattice_enumerate(&k).unwrap();
        for (dim, e) in lat.iter().enumerate().skip(1) {
            let div = divisor_from_subspace(e).unwrap();
            assert_eq!(div.degree(), dim);
            assert_eq!(div.zeros().len(), 1);
            assert_eq!(div.zeros()[0].0, czero());
        }
    }

    #[test]
    fn beurling_cross_check() {
        // Spanning vectors of each lattice element belong to K of its divisor.
        let theta =
            BlaschkeProduct::from_zeros(&[cr(0.2), c(0.0, 0.6), c(-0.4, -0.1)]).unwrap();
        let k = tm_basis(&theta, 96).unwrap();
        for e in lattice_enumerate(&k).unwrap() {
            if e.dim() == 0 {
                continue;
            }
            let div = divisor_from_subspace(&e).unwrap();
            let kd = tm_basis(&div, 96).unwrap();
            for v in e.vectors() {
                let dist = membership(v, &kd);
                assert!(dist <= 1e-8, "distance {dist}");
            }
        }
    }

    #[test]
    fn lattice_completeness_random_search() {
        // No random S*-invariant candidate span evades the enumerated lattice.
        let theta =
            BlaschkeProduct::from_zeros(&[cr(0.3), c(0.0, 0.5), c(-0.35, 0.2)]).unwrap();
        let n = 64;
        let k = tm_basis(&theta, n).unwrap();
        let lat = lattice_enumerate(&k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a77);
        for _ in 0..200 {
            let dim = rng.gen_range(1..=2usize);
            let raw: Vec<AnalyticPoly> = (0..dim)
                .map(|_| {
                    let mut acc = AnalyticPoly::zero(n);
                    for e in k.basis() {
                        let w = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        acc = acc.add(&e.scaled(w));
                    }
                    acc
                })
                .collect();
            let span = orthonormalize(&raw, n).unwrap();
            if invariance_residual(&span) <= 1e-6 {
                let matched = lat
                    .iter()
                    .any(|e| subspace_gap(e.vectors(), &span) <= SUBSPACE_GAP_TOL);
                assert!(matched, "invariant candidate outside the lattice");
            }
        }
    }
}
