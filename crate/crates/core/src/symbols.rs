//! Inner and outer function machinery: finite Blaschke products, nonnegative
//! trigonometric polynomials, Fejér–Riesz spectral factorization, Pythagorean
//! mates, and division by inner functions.

use faer::Mat;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::hardy::{boundary_samples, AnalyticPoly, BoundaryGrid};
use crate::Result;

/// Grid used for all sup-norm and positivity checks in this module.
pub const SYMBOL_GRID: usize = 4096;

/// Roots ρ, σ form a Fejér–Riesz pair when |ρ·conj(σ) − 1| is below this;
/// boundary roots are those with ||ρ|−1| below it.
const PAIR_TOL: f64 = 1e-6;

/// Cluster radius for boundary roots before multiplicity splitting. A double
/// boundary root splits under eigensolver noise by ~1e−8, far below this, while
/// distinct suite roots are separated by O(1).
const BOUNDARY_CLUSTER_RADIUS: f64 = 1e-5;

/// Newton polish is skipped for roots closer than this to another root
/// (multiple roots make Newton unstable; clustering handles them instead).
const POLISH_SEPARATION: f64 = 1e-4;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// A finite Blaschke product: zeros in the open disc with multiplicities and a
/// unimodular front constant. Represents the inner functions of the toolkit.
#[derive(Clone, Debug)]
pub struct BlaschkeProduct {
    zeros: Vec<(Complex64, usize)>,
    unimodular_constant: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<(Complex64, usize)>, unimodular_constant: Complex64) -> Result<Self> {
        for &(z, _) in &zeros {
            if z.norm() >= 1.0 {
                return Err(CoreError::KernelOutsideDisc { modulus: z.norm() });
            }
        }
        let r = unimodular_constant.norm();
        if (r - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidInput(format!(
                "front constant must be unimodular, got modulus {r}"
            )));
        }
        Ok(Self {
            zeros,
            unimodular_constant: unimodular_constant / r,
        })
    }

    /// Product of simple factors at the given points, constant 1.
    pub fn from_zeros(zeros: &[Complex64]) -> Result<Self> {
        Self::new(zeros.iter().map(|&z| (z, 1)).collect(), Complex64::new(1.0, 0.0))
    }

    /// The monomial z^d as a Blaschke product.
    pub fn power(d: usize) -> Self {
        Self {
            zeros: if d == 0 { vec![] } else { vec![(czero(), d)] },
            unimodular_constant: Complex64::new(-1.0, 0.0).powu(d as u32),
        }
    }

    /// Empty product: the constant 1.
    pub fn trivial() -> Self {
        Self {
            zeros: vec![],
            unimodular_constant: Complex64::new(1.0, 0.0),
        }
    }

    pub fn zeros(&self) -> &[(Complex64, usize)] {
        &self.zeros
    }

    pub fn unimodular_constant(&self) -> Complex64 {
        self.unimodular_constant
    }

    pub fn degree(&self) -> usize {
        self.zeros.iter().map(|&(_, m)| m).sum()
    }

    /// Rational evaluation c·Π((λ_j − z)/(1 − conj(λ_j)z))^{m_j}; valid on the
    /// closed disc (poles sit outside).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.unimodular_constant;
        for &(lam, m) in &self.zeros {
            let factor = (lam - z) / (Complex64::new(1.0, 0.0) - lam.conj() * z);
            for _ in 0..m {
                acc *= factor;
            }
        }
        acc
    }

    /// Taylor expansion to length n with a recorded H² tail bound.
    pub fn taylor(&self, n: usize) -> TaylorExpansion {
        let n = n.max(1);
        // Each simple factor (λ − z)/(1 − conj(λ)z) has the exact expansion
        // λ + (|λ|² − 1)·Σ_{k≥1} conj(λ)^{k−1} z^k; products are truncated Cauchy
        // products, exact on the first n coefficients.
        let mut coeffs = vec![czero(); n];
        coeffs[0] = self.unimodular_constant;
        for &(lam, mult) in &self.zeros {
            for _ in 0..mult {
                let mut factor = vec![czero(); n];
                factor[0] = lam;
                let scale = Complex64::new(lam.norm_sqr() - 1.0, 0.0);
                let mut p = Complex64::new(1.0, 0.0);
                for fk in factor.iter_mut().skip(1) {
                    *fk = scale * p;
                    p *= lam.conj();
                }
                coeffs = truncated_product(&coeffs, &factor, n);
            }
        }
        let tail_bound = self.tail_bound(n);
        TaylorExpansion {
            poly: AnalyticPoly::new(coeffs),
            tail_bound,
        }
    }

    /// H² norm bound on the discarded tail Σ_{k≥n}|b̂_k|², from the geometric
    /// majorant |b̂_k| ≤ 2^d·C(k+d−1, d−1)·ρ^{k−d} with ρ = max|λ_j|.
    fn tail_bound(&self, n: usize) -> f64 {
        let d = self.degree();
        if d == 0 {
            return 0.0;
        }
        let rho: f64 = self
            .zeros
            .iter()
            .map(|&(z, _)| z.norm())
            .fold(0.0, f64::max);
        if rho == 0.0 {
            // Pure power z^d: exact beyond degree d.
            return if n > d { 0.0 } else { 1.0 };
        }
        let ln_rho = rho.ln();
        let ln_scale = (d as f64) * 2f64.ln() - (d as f64) * ln_rho;
        // C(n+d−1, d−1) = Π_{i=1}^{d−1} (n+i)/i
        let mut ln_binom: f64 = (1..d).map(|i| (((n + i) as f64) / (i as f64)).ln()).sum();
        let mut total = 0.0f64;
        let mut k = n;
        loop {
            let ln_term = 2.0 * (ln_scale + ln_binom + (k as f64) * ln_rho);
            let term = ln_term.exp();
            total += term;
            if term < 1e-300 * total.max(1e-300) || k > n + 200_000 {
                break;
            }
            k += 1;
            // C(k+d−1, d−1) / C(k+d−2, d−1) = (k+d−1)/k
            ln_binom += (((k + d - 1) as f64) / (k as f64)).ln();
        }
        total.sqrt()
    }
}

/// A Blaschke Taylor expansion together with its tail bound.
#[derive(Clone, Debug)]
pub struct TaylorExpansion {
    pub poly: AnalyticPoly,
    pub tail_bound: f64,
}

impl TaylorExpansion {
    /// True when the recorded tail bound is below the given tolerance.
    pub fn tail_ok(&self, tol: f64) -> bool {
        self.tail_bound <= tol
    }
}

/// Taylor coefficients of a Blaschke product, with the tail bound recorded.
pub fn blaschke_taylor(b: &BlaschkeProduct, n: usize) -> TaylorExpansion {
    b.taylor(n)
}

fn truncated_product(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![czero(); n];
    for (i, &x) in a.iter().enumerate() {
        if i >= n {
            break;
        }
        for (j, &y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// A real-valued trigonometric polynomial on the circle, stored as Laurent
/// coefficients c_{−m}..c_m with c_{−l} = conj(c_l) enforced exactly.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    /// Nonnegative-index half c_0..c_m; the negative half is implied.
    half: Vec<Complex64>,
}

impl TrigPoly {
    /// From the nonnegative half c_0..c_m. The constant term is forced real.
    pub fn from_half(mut half: Vec<Complex64>) -> Self {
        if half.is_empty() {
            half.push(czero());
        }
        half[0] = Complex64::new(half[0].re, 0.0);
        Self { half }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_half(vec![Complex64::new(c, 0.0)])
    }

    /// |p|² on the circle: c_l = Σ_k p_{k+l}·conj(p_k).
    pub fn modulus_squared(p: &AnalyticPoly) -> Self {
        let d = p.len();
        let half = (0..d)
            .map(|l| {
                (0..d - l)
                    .map(|k| p.coeff(k + l) * p.coeff(k).conj())
                    .sum()
            })
            .collect();
        Self::from_half(half)
    }

    /// 1 − |b|² on the circle, exact from b's coefficients.
    pub fn one_minus_modulus_squared(b: &AnalyticPoly) -> Self {
        let mut w = Self::modulus_squared(b);
        for c in w.half.iter_mut() {
            *c = -*c;
        }
        w.half[0] += Complex64::new(1.0, 0.0);
        w
    }

    /// Laurent order m (after construction; trailing zeros are kept).
    pub fn order(&self) -> usize {
        self.half.len() - 1
    }

    /// c_l for any integer l (Hermitian symmetry applied for l < 0).
    pub fn coeff(&self, l: i64) -> Complex64 {
        let a = l.unsigned_abs() as usize;
        let c = self.half.get(a).copied().unwrap_or(czero());
        if l >= 0 {
            c
        } else {
            c.conj()
        }
    }

    /// Real grid values at the M-th roots of unity.
    pub fn grid_values(&self, m: usize) -> Result<BoundaryGrid> {
        let order = self.order();
        if m < 2 * order + 1 {
            return Err(CoreError::Aliasing {
                m,
                n: 2 * order + 1,
            });
        }
        // Analytic part via FFT, then u = 2·Re(analytic) − c_0.
        let analytic = AnalyticPoly::new(self.half.clone());
        let g = boundary_samples(&analytic, m)?;
        let c0 = self.half[0].re;
        let values = g
            .values()
            .iter()
            .map(|v| Complex64::new(2.0 * v.re - c0, 0.0))
            .collect();
        BoundaryGrid::from_values(values)
    }

    /// Minimum of the (real) grid values.
    pub fn grid_min(&self, m: usize) -> Result<f64> {
        Ok(self.grid_values(m)?.min_re())
    }

    /// Maximum of the (real) grid values.
    pub fn grid_max(&self, m: usize) -> Result<f64> {
        Ok(self
            .grid_values(m)?
            .values()
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// An outer polynomial: a(0) > 0 and no zeros in the open disc
/// (boundary zeros permitted).
#[derive(Clone, Debug)]
pub struct OuterPoly {
    poly: AnalyticPoly,
}

impl OuterPoly {
    /// Validating constructor: a(0) real and positive, no roots with modulus
    /// below 1 − 1e−10.
    pub fn new(poly: AnalyticPoly) -> Result<Self> {
        let a0 = poly.coeff(0);
        if a0.re <= 0.0 || a0.im.abs() > 1e-12 * a0.re.abs().max(1.0) {
            return Err(CoreError::InvalidInput(format!(
                "outer polynomial needs a(0) real and positive, got {a0}"
            )));
        }
        let deg = poly.degree(1e-13);
        if deg > 0 {
            for r in polynomial_roots(&poly.coeffs()[..=deg])? {
                if r.norm() < 1.0 - 1e-10 {
                    return Err(CoreError::InvalidInput(format!(
                        "outer polynomial has a root inside the disc at {r}"
                    )));
                }
            }
        }
        Ok(Self { poly })
    }

    pub fn poly(&self) -> &AnalyticPoly {
        &self.poly
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.poly.coeffs()
    }
}

/// Roots of a complex polynomial (coefficients low-to-high, leading coefficient
/// nonzero) via companion-matrix eigenvalues.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[d];
    if lead.norm() == 0.0 {
        return Err(CoreError::InvalidInput(
            "leading coefficient must be nonzero".into(),
        ));
    }
    let a = Mat::<Complex64>::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            czero()
        }
    });
    a.eigenvalues()
        .map_err(|e| CoreError::EigenFailure(format!("{e:?}")))
}

/// Fejér–Riesz factorization: given w ≥ 0 on the circle, returns the outer
/// polynomial a with |a|² = w there and a(0) > 0.
///
/// Method: roots of the associated polynomial q(z) = z^m·w(z) pair as
/// (ρ, 1/conj(ρ)); keep the closed-exterior member of each pair, cluster
/// boundary roots and split their (even) multiplicities evenly, then fit the
/// positive scalar on the grid.
pub fn fejer_riesz(w: &TrigPoly) -> Result<OuterPoly> {
    let grid_min = w.grid_min(SYMBOL_GRID)?;
    if grid_min < -1e-12 {
        return Err(CoreError::NotFactorable {
            grid_min,
            tol: 1e-12,
        });
    }
    // Trim trailing Laurent coefficients that are numerically zero.
    let mut m = w.order();
    while m > 0 && w.coeff(m as i64).norm() < 1e-14 {
        m -= 1;
    }
    if m == 0 {
        let c0 = w.coeff(0).re.max(0.0);
        return OuterPoly::new(AnalyticPoly::new(vec![Complex64::new(c0.sqrt(), 0.0)]));
    }

    // q(z) = z^m w(z), degree 2m, q(0) = conj(c_m) ≠ 0.
    let q: Vec<Complex64> = (0..=2 * m)
        .map(|i| w.coeff(i as i64 - m as i64))
        .collect();
    let mut roots = polynomial_roots(&q)?;
    newton_polish(&q, &mut roots);

    let mut exterior = Vec::new();
    let mut interior = 0usize;
    let mut boundary = Vec::new();
    for &r in &roots {
        let modulus = r.norm();
        if (modulus - 1.0).abs() < PAIR_TOL {
            boundary.push(r);
        } else if modulus > 1.0 {
            exterior.push(r);
        } else {
            interior += 1;
        }
    }
    if interior != exterior.len() {
        return Err(CoreError::InvalidInput(format!(
            "root pairing failed: {} interior vs {} exterior roots",
            interior,
            exterior.len()
        )));
    }

    // Cluster boundary roots and split multiplicities evenly.
    let mut kept = exterior;
    let mut used = vec![false; boundary.len()];
    for i in 0..boundary.len() {
        if used[i] {
            continue;
        }
        let mut cluster = vec![boundary[i]];
        used[i] = true;
        for j in i + 1..boundary.len() {
            if !used[j] && (boundary[j] - boundary[i]).norm() < BOUNDARY_CLUSTER_RADIUS {
                cluster.push(boundary[j]);
                used[j] = true;
            }
        }
        if cluster.len() % 2 != 0 {
            return Err(CoreError::OddBoundaryMultiplicity {
                location: boundary[i],
                multiplicity: cluster.len(),
            });
        }
        let center: Complex64 = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        let snapped = center / center.norm();
        for _ in 0..cluster.len() / 2 {
            kept.push(snapped);
        }
    }
    if kept.len() != m {
        return Err(CoreError::InvalidInput(format!(
            "root selection kept {} of {} expected factors",
            kept.len(),
            m
        )));
    }

    // a₀(z) = Π (1 − z/σ); scalar by least squares of w against |a₀|² on the grid.
    let mut a0 = vec![Complex64::new(1.0, 0.0)];
    for &sigma in &kept {
        let next = vec![Complex64::new(1.0, 0.0), -Complex64::new(1.0, 0.0) / sigma];
        a0 = truncated_product(&a0, &next, a0.len() + 1);
    }
    let a0_poly = AnalyticPoly::new(a0);
    let a0_grid = boundary_samples(&a0_poly, SYMBOL_GRID)?;
    let w_grid = w.grid_values(SYMBOL_GRID)?;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (aval, wval) in a0_grid.values().iter().zip(w_grid.values()) {
        let a2 = aval.norm_sqr();
        num += wval.re * a2;
        den += a2 * a2;
    }
    let k = (num / den).max(0.0);
    let a = a0_poly.scaled(Complex64::new(k.sqrt(), 0.0));
    // a(0) = √K·1 > 0 by construction; rotate defensively anyway.
    let a0c = a.coeff(0);
    let phase = a0c / a0c.norm();
    OuterPoly::new(a.scaled(phase.conj()))
}

/// One Newton step per root, skipped for roots too close to another root.
fn newton_polish(q: &[Complex64], roots: &mut [Complex64]) {
    let dq: Vec<Complex64> = q
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let horner = |p: &[Complex64], z: Complex64| {
        let mut acc = czero();
        for c in p.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let snapshot = roots.to_vec();
    for (i, r) in roots.iter_mut().enumerate() {
        let sep = snapshot
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, s)| (*r - s).norm())
            .fold(f64::INFINITY, f64::min);
        if sep < POLISH_SEPARATION {
            continue;
        }
        let d = horner(&dq, *r);
        if d.norm() > 1e-12 {
            *r -= horner(q, *r) / d;
        }
    }
}

/// The Pythagorean mate: the outer a with |a|² + |b|² = 1 on the circle.
/// Rejects b with |b| ≥ 1 a.e. on the circle, for which no mate exists.
pub fn pythagorean_mate(b: &AnalyticPoly) -> Result<OuterPoly> {
    let w = TrigPoly::one_minus_modulus_squared(b);
    if w.grid_max(SYMBOL_GRID)? < 1e-12 {
        return Err(CoreError::ExtremeSymbol);
    }
    fejer_riesz(&w)
}

/// Division by an inner function: returns g with g·B = f, after checking that f
/// vanishes at every zero of B to the required multiplicity (tolerance 1e−8,
/// relative to max(1, ‖f‖₂)).
pub fn divide_by_inner(f: &AnalyticPoly, b: &BlaschkeProduct) -> Result<AnalyticPoly> {
    let scale = f.norm().max(1.0);
    for &(zero, mult) in b.zeros() {
        let mut deriv = f.coeffs().to_vec();
        for l in 0..mult {
            let mut acc = czero();
            for c in deriv.iter().rev() {
                acc = acc * zero + c;
            }
            let residual = acc.norm() / scale;
            if residual > 1e-8 {
                return Err(CoreError::NotDivisible {
                    zero,
                    multiplicity: l + 1,
                    residual,
                });
            }
            // Differentiate for the next multiplicity level.
            deriv = deriv
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect();
            if deriv.is_empty() {
                deriv.push(czero());
            }
        }
    }

    // f/B = f · Π(1 − conj(λ)z)^m / (c · Π(λ − z)^m): deflate the numerator
    // zeros top-down (stable for |λ| < 1), then multiply the denominators back.
    let mut g = f.coeffs().to_vec();
    for &(zero, mult) in b.zeros() {
        for _ in 0..mult {
            g = deflate_linear(&g, zero);
        }
    }
    for &(zero, mult) in b.zeros() {
        for _ in 0..mult {
            let factor = vec![Complex64::new(1.0, 0.0), -zero.conj()];
            let n = g.len() + 1;
            g = truncated_product(&g, &factor, n);
        }
    }
    let inv_const = b.unimodular_constant().conj(); // 1/c for |c| = 1
    let mut out = AnalyticPoly::new(g).scaled(inv_const);
    out = out.resized(f.len().max(1));
    // The quotient inherits f's trust (tail corruption does not grow degree).
    Ok(AnalyticPoly::with_trusted(
        out.coeffs().to_vec(),
        f.trusted_degree(),
    ))
}

/// Divide by (λ − z) assuming divisibility: top-down synthetic division.
fn deflate_linear(f: &[Complex64], lambda: Complex64) -> Vec<Complex64> {
    let d = f.len() - 1;
    if d == 0 {
        return vec![czero()];
    }
    let mut h = vec![czero(); d];
    h[d - 1] = -f[d];
    for k in (1..d).rev() {
        h[k - 1] = lambda * h[k] - f[k];
    }
    h
}
