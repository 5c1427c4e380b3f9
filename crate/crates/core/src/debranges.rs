//! De Branges–Rovnyak spaces H(b) for non-extreme polynomial b: norms through
//! the Pythagorean-mate triangular solve, spectral densities u_{f,g} with
//! their moment identities, F-property checks, the invariant-subspace trace
//! suite, and a Krylov cyclicity probe.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::hardy::{backward_shift, boundary_samples, evaluate, inner_product_h2, AnalyticPoly};
use crate::model::{self, lattice_enumerate, subspace_gap, tm_basis};
use crate::range::{principal_sqrt, RangeSpace};
use crate::symbols::{pythagorean_mate, BlaschkeProduct, OuterPoly, TrigPoly};
use crate::toeplitz::{apply_co_analytic, toeplitz_truncation, LaurentSymbol};
use crate::Result;

/// sup-grid tolerance for the Pythagorean identity |a|² + |b|² = 1.
const PAIR_IDENTITY_TOL: f64 = 1e-9;
/// Solver: truncation doubling starts here and stops at the cap.
const SOLVE_START: usize = 128;
const SOLVE_CAP: usize = 8192;
const SOLVE_RTOL: f64 = 1e-9;
/// Quadrature grid for the spectral identities.
const SPECTRAL_GRID: usize = 4096;
/// Krylov rank tolerance (subdiagonal breakdown threshold).
const KRYLOV_TOL: f64 = 1e-8;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A non-extreme symbol b with its Pythagorean mate a: |a|² + |b|² = 1 on the
/// circle, a outer, a(0) > 0. Extreme b is rejected at construction.
#[derive(Clone, Debug)]
pub struct PythagoreanPair {
    b: AnalyticPoly,
    a: OuterPoly,
}

impl PythagoreanPair {
    pub fn new(b: AnalyticPoly) -> Result<Self> {
        let a = pythagorean_mate(&b)?;
        let identity = TrigPoly::modulus_squared(a.poly())
            .grid_values(crate::symbols::SYMBOL_GRID)?
            .values()
            .iter()
            .zip(
                TrigPoly::modulus_squared(&b)
                    .grid_values(crate::symbols::SYMBOL_GRID)?
                    .values(),
            )
            .map(|(aa, bb)| ((aa + bb).re - 1.0).abs())
            .fold(0.0, f64::max);
        if identity > PAIR_IDENTITY_TOL {
            return Err(CoreError::NotFactorable {
                grid_min: identity,
                tol: PAIR_IDENTITY_TOL,
            });
        }
        Ok(Self { b, a })
    }

    pub fn b(&self) -> &AnalyticPoly {
        &self.b
    }

    pub fn a(&self) -> &OuterPoly {
        &self.a
    }
}

/// An element of H(b) with its solve witness f⁺ (T_ā f⁺ = T_b̄ f) and norm.
#[derive(Clone, Debug)]
pub struct HbElement {
    pub f: AnalyticPoly,
    pub fplus: AnalyticPoly,
    pub norm_sq: f64,
    pub n_used: usize,
}

impl HbElement {
    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }
}

/// Back-substitute the upper-triangular banded system T_ā x = rhs at length n.
fn solve_co_analytic(a: &AnalyticPoly, rhs: &[Complex64], n: usize) -> Vec<Complex64> {
    let da = a.degree(0.0);
    let a0 = a.coeff(0).conj();
    let mut x = vec![czero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs.get(row).copied().unwrap_or(czero());
        for j in 1..=da.min(n - 1 - row) {
            acc -= a.coeff(j).conj() * x[row + j];
        }
        x[row] = acc / a0;
    }
    x
}

/// Embed f into H(b): solve for the witness f⁺ with truncation doubling until
/// the norm stabilizes. ‖f‖²_{H(b)} = ‖f‖₂² + ‖f⁺‖₂².
pub fn hb_embed(pair: &PythagoreanPair, f: &AnalyticPoly) -> Result<HbElement> {
    let rhs = apply_co_analytic(&pair.b, f);
    let base = f.norm_sq();
    let mut trajectory = Vec::new();
    let mut n = SOLVE_START.max((f.len() + pair.a.poly().len() + 2).next_power_of_two());
    let mut prev: Option<(f64, Vec<Complex64>)> = None;
    while n <= SOLVE_CAP {
        let x = solve_co_analytic(pair.a.poly(), rhs.coeffs(), n);
        let norm_sq = base + x.iter().map(|c| c.norm_sqr()).sum::<f64>();
        trajectory.push(norm_sq);
        if let Some((last, _)) = prev {
            if (norm_sq - last).abs() <= SOLVE_RTOL * norm_sq.max(1e-12) {
                let fplus = AnalyticPoly::new(x);
                return Ok(HbElement {
                    f: f.clone(),
                    fplus,
                    norm_sq,
                    n_used: n,
                });
            }
        }
        prev = Some((norm_sq, x));
        n *= 2;
    }
    Err(CoreError::Unconverged {
        n_cap: SOLVE_CAP,
        trajectory,
    })
}

/// ⟨f, g⟩_{H(b)} = ⟨f, g⟩₂ + ⟨f⁺, g⁺⟩₂.
pub fn hb_inner_product(e: &HbElement, g: &HbElement) -> Complex64 {
    inner_product_h2(&e.f, &g.f) + inner_product_h2(&e.fplus, &g.fplus)
}

/// Cross-route H(b) norm: range norm of f in M((I − T_b T_b̄)^{1/2}) at
/// truncation n. Agreement with hb_embed within 1% is the acceptance bar.
pub fn hb_norm_crosscheck(pair: &PythagoreanPair, f: &AnalyticPoly, n: usize) -> Result<f64> {
    if f.degree(0.0) > n / 4 {
        return Err(CoreError::InvalidInput(format!(
            "degree {} exceeds n/4 = {}",
            f.degree(0.0),
            n / 4
        )));
    }
    let tb = toeplitz_truncation(&LaurentSymbol::analytic(&pair.b), n);
    let tbs = tb.adjoint();
    let mut gram = tb.mat() * tbs.mat();
    for i in 0..n {
        gram[(i, i)] = cr(1.0) - gram[(i, i)];
        for j in 0..n {
            if i != j {
                gram[(i, j)] = -gram[(i, j)];
            }
        }
    }
    let sqrt = principal_sqrt(&gram)?;
    let space = RangeSpace::new(sqrt)?;
    space.range_norm(f.resized(n).coeffs())
}

/// The boundary density u_{f,g} with its witnesses; moments ∫zⁿ·u dm
/// reproduce ⟨S*ⁿf, g⟩_{H(b)}.
#[derive(Clone, Debug)]
pub struct SpectralDensity {
    values: Vec<Complex64>,
    ef: HbElement,
    eg: HbElement,
}

impl SpectralDensity {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn grid_len(&self) -> usize {
        self.values.len()
    }

    pub fn witnesses(&self) -> (&HbElement, &HbElement) {
        (&self.ef, &self.eg)
    }

    /// ∫ zⁿ u dm over the grid.
    pub fn moment(&self, n: usize) -> Complex64 {
        let m = self.values.len();
        let sum: Complex64 = self
            .values
            .iter()
            .enumerate()
            .map(|(j, u)| crate::hardy::root_of_unity(m, (n * j) % m) * u)
            .sum();
        sum / m as f64
    }

    /// ∫ φ* u dm where φ*(z) = conj(φ(conj z)) — coefficient conjugation.
    pub fn weighted_moment(&self, phi: &AnalyticPoly) -> Result<Complex64> {
        let m = self.values.len();
        let phi_star = phi.conj_coeffs();
        let grid = boundary_samples(&phi_star, m)?;
        let sum: Complex64 = self
            .values
            .iter()
            .zip(grid.values())
            .map(|(u, p)| p * u)
            .sum();
        Ok(sum / m as f64)
    }

    pub fn min_diagonal_re(&self) -> f64 {
        self.values
            .iter()
            .map(|u| u.re)
            .fold(f64::INFINITY, f64::min)
    }
}

/// u_{f,g}(z) = [f·conj(g) + f⁺·conj(g⁺)](conj z): the reflection makes the
/// zⁿ-moment convention ∫zⁿu dm = ⟨S*ⁿf, g⟩_{H(b)} hold.
pub fn spectral_density(
    pair: &PythagoreanPair,
    f: &AnalyticPoly,
    g: &AnalyticPoly,
    m: usize,
) -> Result<SpectralDensity> {
    let ef = hb_embed(pair, f)?;
    let eg = hb_embed(pair, g)?;
    let fg = boundary_samples(&ef.f, m)?;
    let gg = boundary_samples(&eg.f, m)?;
    let fpg = boundary_samples(&ef.fplus, m)?;
    let gpg = boundary_samples(&eg.fplus, m)?;
    let w: Vec<Complex64> = (0..m)
        .map(|j| {
            fg.values()[j] * gg.values()[j].conj() + fpg.values()[j] * gpg.values()[j].conj()
        })
        .collect();
    let values = (0..m).map(|i| w[(m - i) % m]).collect();
    Ok(SpectralDensity { values, ef, eg })
}

/// |⟨T_φ̄ f, g⟩_{H(b)} − ∫ φ* u_{f,g} dm|; the witness identity
/// (T_φ̄f)⁺ = T_φ̄(f⁺) is asserted along the way.
pub fn verify_theorem_c(
    pair: &PythagoreanPair,
    phi: &AnalyticPoly,
    f: &AnalyticPoly,
    g: &AnalyticPoly,
) -> Result<f64> {
    let density = spectral_density(pair, f, g, SPECTRAL_GRID)?;
    let (ef, eg) = density.witnesses();
    let tf = apply_co_analytic(phi, f);
    let etf = hb_embed(pair, &tf)?;
    // Witness identity: the embed of T_φ̄f carries witness T_φ̄(f⁺).
    let expected_plus = apply_co_analytic(phi, &ef.fplus);
    let witness_dev = etf.fplus.sub(&expected_plus).norm();
    if witness_dev > 1e-8 * (1.0 + ef.fplus.norm()) {
        return Err(CoreError::InvalidInput(format!(
            "witness identity violated: deviation {witness_dev:.3e}"
        )));
    }
    let left = hb_inner_product(&etf, eg);
    let right = density.weighted_moment(phi)?;
    Ok((left - right).norm())
}

/// Norms (‖f‖_{H(b)}, ‖f/Θ‖_{H(b)}); the F-property inequality
/// ‖f/Θ‖ ≤ ‖f‖ is the caller's assertion.
pub fn f_property_check(
    pair: &PythagoreanPair,
    f: &AnalyticPoly,
    theta: &BlaschkeProduct,
) -> Result<(f64, f64)> {
    let quotient = crate::symbols::divide_by_inner(f, theta)?;
    let ef = hb_embed(pair, f)?;
    let eq = hb_embed(pair, &quotient)?;
    Ok((ef.norm(), eq.norm()))
}

/// Solve the small dense Hermitian system G·x = rhs by pivoted elimination.
fn solve_small(g: &[Vec<Complex64>], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = rhs.len();
    let mut m: Vec<Vec<Complex64>> = g.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        m.swap(col, pivot);
        b.swap(col, pivot);
        let d = m[col][col];
        for row in col + 1..n {
            let (head, tail) = m.split_at_mut(row);
            let (src, dst) = (&head[col], &mut tail[0]);
            let factor = dst[col] / d;
            for (dk, sk) in dst[col..n].iter_mut().zip(&src[col..n]) {
                *dk -= factor * *sk;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![czero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}

/// H(b)-norm distance from w to the span of the given vectors, computed via
/// the linearity of the witness solve.
pub fn hb_projection_residual(
    pair: &PythagoreanPair,
    w: &AnalyticPoly,
    span: &[AnalyticPoly],
) -> Result<f64> {
    let ew = hb_embed(pair, w)?;
    if span.is_empty() {
        return Ok(ew.norm());
    }
    let embeds: Vec<HbElement> = span
        .iter()
        .map(|v| hb_embed(pair, v))
        .collect::<Result<_>>()?;
    let d = span.len();
    let gram: Vec<Vec<Complex64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| hb_inner_product(&embeds[j], &embeds[i]))
                .collect()
        })
        .collect();
    let rhs: Vec<Complex64> = (0..d).map(|i| hb_inner_product(&ew, &embeds[i])).collect();
    let coeffs = solve_small(&gram, &rhs);
    // Explicit residual pair (r, r⁺): the witness map is linear.
    let mut r = ew.f.clone();
    let mut rplus = ew.fplus.clone();
    for (c, e) in coeffs.iter().zip(&embeds) {
        r = r.sub(&e.f.scaled(*c));
        rplus = rplus.sub(&e.fplus.scaled(*c));
    }
    Ok((r.norm_sq() + rplus.norm_sq()).sqrt())
}

/// Residuals for one lattice element of the trace suite.
#[derive(Clone, Debug)]
pub struct SubspaceTrace {
    pub dim: usize,
    /// Max witness-identity deviation of the spanning vectors' embeds.
    pub witness_residual: f64,
    /// Max H(b)-projection distance of S*v from the span.
    pub sstar_residual: f64,
    /// Max H²-projection distance of T_ā·v from the span (closure half of
    /// T_ā·E = E).
    pub ta_closure_residual: f64,
    /// Min |a(λ)| over the divisor's zeros (bijectivity half); 1 for dim 0.
    pub ta_min_action: f64,
    pub divisor: BlaschkeProduct,
    /// Principal-angle gap between E and the span of K_{divisor}.
    pub divisor_gap: f64,
}

#[derive(Clone, Debug)]
pub struct TraceReport {
    pub subspaces: Vec<SubspaceTrace>,
}

impl TraceReport {
    pub fn max_sstar_residual(&self) -> f64 {
        self.subspaces
            .iter()
            .map(|s| s.sstar_residual)
            .fold(0.0, f64::max)
    }

    pub fn max_divisor_gap(&self) -> f64 {
        self.subspaces
            .iter()
            .map(|s| s.divisor_gap)
            .fold(0.0, f64::max)
    }
}

/// Truncation used for the lattice checks (degree ≤ 6 everywhere).
const TRACE_N: usize = 128;

/// For every invariant subspace E of K_Θ: H(b) membership of the span,
/// S*-invariance in the H(b) metric, the T_ā·E = E action, and divisor
/// recovery.
pub fn invariant_trace_suite(
    pair: &PythagoreanPair,
    theta: &BlaschkeProduct,
) -> Result<TraceReport> {
    let k = tm_basis(theta, TRACE_N)?;
    let lattice = lattice_enumerate(&k)?;
    let mut subspaces = Vec::with_capacity(lattice.len());
    for e in &lattice {
        let span = e.vectors();
        let mut witness_residual = 0.0f64;
        for v in span {
            let ev = hb_embed(pair, v)?;
            let lhs = apply_co_analytic(pair.a.poly(), &ev.fplus);
            let rhs = apply_co_analytic(&pair.b, &ev.f);
            witness_residual = witness_residual.max(lhs.sub(&rhs).norm());
        }
        let mut sstar_residual = 0.0f64;
        for v in span {
            let res = hb_projection_residual(pair, &backward_shift(v), span)?;
            sstar_residual = sstar_residual.max(res);
        }
        let mut ta_closure_residual = 0.0f64;
        for v in span {
            let tav = apply_co_analytic(pair.a.poly(), v);
            ta_closure_residual =
                ta_closure_residual.max(model::projection_distance(&tav, span));
        }
        let divisor = model::divisor_from_subspace(e)?;
        let divisor_gap = if divisor.degree() == 0 {
            0.0
        } else {
            subspace_gap(tm_basis(&divisor, TRACE_N)?.basis(), span)
        };
        let ta_min_action = divisor
            .zeros()
            .iter()
            .map(|(z, _)| evaluate(pair.a.poly(), *z).map(|v| v.norm()))
            .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))?
            .min(f64::INFINITY);
        let ta_min_action = if divisor.degree() == 0 {
            1.0
        } else {
            ta_min_action
        };
        subspaces.push(SubspaceTrace {
            dim: e.dim(),
            witness_residual,
            sstar_residual,
            ta_closure_residual,
            ta_min_action,
            divisor,
            divisor_gap,
        });
    }
    Ok(TraceReport { subspaces })
}

/// One truncation level of the cyclicity probe.
#[derive(Clone, Debug)]
pub struct CyclicitySample {
    pub n: usize,
    /// Krylov rank at breakdown, when the orbit saturated.
    pub saturation: Option<usize>,
    /// Smallest subdiagonal entry seen (breakdown margin).
    pub min_subdiagonal: f64,
}

#[derive(Clone, Debug)]
pub struct CyclicityReport {
    pub hb_norm: f64,
    pub samples: Vec<CyclicitySample>,
    pub verdict: String,
}

/// Arnoldi iteration for S* on C^n with happy-breakdown detection: the
/// subdiagonal ‖w − proj w‖ falling below tol certifies Krylov-rank
/// saturation.
fn arnoldi_rank(f: &[Complex64], n: usize, cap: usize) -> (Option<usize>, f64) {
    let mut v: Vec<Complex64> = f.iter().copied().take(n).collect();
    v.resize(n, czero());
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm <= KRYLOV_TOL {
        return (Some(0), 0.0);
    }
    for c in v.iter_mut() {
        *c /= norm;
    }
    let mut basis = vec![v];
    let mut min_sub = f64::INFINITY;
    for k in 0..cap {
        let last = &basis[k];
        let mut w: Vec<Complex64> = last[1..].to_vec();
        w.push(czero());
        for _ in 0..2 {
            for q in &basis {
                let ip: Complex64 = w.iter().zip(q).map(|(a, b)| a * b.conj()).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= ip * qi;
                }
            }
        }
        let h = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        min_sub = min_sub.min(h);
        if h <= KRYLOV_TOL {
            return (Some(k + 1), min_sub);
        }
        for c in w.iter_mut() {
            *c /= h;
        }
        basis.push(w);
    }
    (None, min_sub)
}

/// Krylov-rank probe for [f, S*f, S*²f, …] at each truncation in the
/// schedule. Saturation at rank r certifies f lies in an r-dimensional
/// S*-invariant subspace (hence non-cyclic); absence of saturation is
/// heuristic evidence only.
pub fn cyclicity_probe(
    pair: &PythagoreanPair,
    f: &AnalyticPoly,
    schedule: &[usize],
) -> Result<CyclicityReport> {
    let hb_norm = hb_embed(pair, f)?.norm();
    let samples: Vec<CyclicitySample> = schedule
        .iter()
        .map(|&n| {
            let cap = n.min(40);
            let (saturation, min_subdiagonal) = arnoldi_rank(f.coeffs(), n, cap);
            CyclicitySample {
                n,
                saturation,
                min_subdiagonal,
            }
        })
        .collect();
    let verdict = match samples.last().and_then(|s| s.saturation) {
        Some(r) => format!("finite-rank saturation at {r}: non-cyclic certificate"),
        None => "no saturation observed (heuristic cyclicity evidence only)".to_string(),
    };
    Ok(CyclicityReport {
        hb_norm,
        samples,
        verdict,
    })
}
