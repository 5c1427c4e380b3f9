//! Bergman-space A² truncations in the orthonormal basis eₙ = √(n+1)·zⁿ:
//! Toeplitz matrices from exact monomial moments, sub-Bergman Gram operators,
//! the shift-invariance PSD check, sub-Bergman norms, and the identity-chain
//! discrepancy probe.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::hardy::AnalyticPoly;
use crate::range::{self, leading_block, max_abs, principal_sqrt, PsdReport, RangeSpace};
use crate::symbols::{pythagorean_mate, TrigPoly};
use crate::Result;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A polynomial viewed in A²: monomial coefficients with ‖zⁿ‖² = 1/(n+1).
#[derive(Clone, Debug)]
pub struct BergmanPoly {
    coeffs: Vec<Complex64>,
}

impl BergmanPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![czero()]
        } else {
            coeffs
        };
        Self { coeffs }
    }

    pub fn from_analytic(p: &AnalyticPoly) -> Self {
        Self::new(p.coeffs().to_vec())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.norm_sqr() / (n as f64 + 1.0))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Coordinates in the orthonormal basis eₙ, padded/truncated to length n.
    pub fn orthonormal_coords(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(czero()) / (k as f64 + 1.0).sqrt()
            })
            .collect()
    }
}

/// Symbol descriptor for a Bergman Toeplitz matrix.
#[derive(Clone, Debug)]
pub enum BergmanSymbol {
    Analytic(AnalyticPoly),
    CoAnalytic(AnalyticPoly),
    /// α + s·|h(z)|² as a function on the disc.
    DiscModulus {
        alpha: f64,
        scale: f64,
        h: AnalyticPoly,
    },
    /// Harmonic extension of a boundary trigonometric polynomial.
    HarmonicExtension(TrigPoly),
}

#[derive(Clone, Debug)]
pub struct BergmanToeplitz {
    n: usize,
    symbol: BergmanSymbol,
    mat: Mat<Complex64>,
}

impl BergmanToeplitz {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symbol(&self) -> &BergmanSymbol {
        &self.symbol
    }

    pub fn mat(&self) -> &Mat<Complex64> {
        &self.mat
    }

    /// T_φ* = T_φ̄: swaps the analytic and co-analytic descriptors; real
    /// quadratic symbols are self-adjoint.
    pub fn adjoint(&self) -> BergmanToeplitz {
        let symbol = match &self.symbol {
            BergmanSymbol::Analytic(p) => BergmanSymbol::CoAnalytic(p.clone()),
            BergmanSymbol::CoAnalytic(p) => BergmanSymbol::Analytic(p.clone()),
            other => other.clone(),
        };
        BergmanToeplitz {
            n: self.n,
            symbol,
            mat: self.mat.adjoint().to_owned(),
        }
    }
}

/// ⟨φ·eₘ, eₙ⟩ = φ̂(n−m)·√((m+1)/(n+1)) for n ≥ m (monomial moments
/// ∫zᵖz̄^q dA = δ_{pq}/(p+1)).
pub fn bergman_toeplitz_analytic(phi: &AnalyticPoly, n: usize) -> BergmanToeplitz {
    let mat = Mat::from_fn(n, n, |r, c| {
        if r >= c {
            phi.coeff(r - c) * ((c as f64 + 1.0) / (r as f64 + 1.0)).sqrt()
        } else {
            czero()
        }
    });
    BergmanToeplitz {
        n,
        symbol: BergmanSymbol::Analytic(phi.clone()),
        mat,
    }
}

pub fn bergman_toeplitz_co_analytic(phi: &AnalyticPoly, n: usize) -> BergmanToeplitz {
    let mut t = bergman_toeplitz_analytic(phi, n).adjoint();
    t.symbol = BergmanSymbol::CoAnalytic(phi.clone());
    t
}

/// Symbol α + s·|h(z)|² on the disc: entries from
/// ⟨zᵖz̄^q·eₘ, eₙ⟩ = √((m+1)(n+1))·δ_{p+m,q+n}/(p+m+1).
pub fn bergman_toeplitz_disc_modulus(
    alpha: f64,
    scale: f64,
    h: &AnalyticPoly,
    n: usize,
) -> BergmanToeplitz {
    let dh = h.degree(0.0);
    let mat = Mat::from_fn(n, n, |r, c| {
        let shift = r as i64 - c as i64;
        let mut acc = czero();
        for q in 0..=dh as i64 {
            let p = q + shift;
            if (0..=dh as i64).contains(&p) {
                acc += h.coeff(p as usize) * h.coeff(q as usize).conj()
                    / (q as f64 + r as f64 + 1.0);
            }
        }
        let mut entry = acc * scale * ((r as f64 + 1.0) * (c as f64 + 1.0)).sqrt();
        if r == c {
            entry += cr(alpha);
        }
        entry
    });
    BergmanToeplitz {
        n,
        symbol: BergmanSymbol::DiscModulus {
            alpha,
            scale,
            h: h.clone(),
        },
        mat,
    }
}

/// Harmonic extension of a boundary symbol: zˡ terms act analytically, z̄ˡ
/// terms co-analytically.
pub fn bergman_toeplitz_harmonic(w: &TrigPoly, n: usize) -> BergmanToeplitz {
    let mat = Mat::from_fn(n, n, |r, c| {
        let l = r as i64 - c as i64;
        let weight = if l >= 0 {
            ((c as f64 + 1.0) / (r as f64 + 1.0)).sqrt()
        } else {
            ((r as f64 + 1.0) / (c as f64 + 1.0)).sqrt()
        };
        w.coeff(l) * weight
    });
    BergmanToeplitz {
        n,
        symbol: BergmanSymbol::HarmonicExtension(w.clone()),
        mat,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramSide {
    /// I − T_b̄·T_b (the Lemma-5.2 side).
    Left,
    /// I − T_b·T_b̄ (the sub-Bergman defining side).
    Right,
}

fn check_contractive(b: &AnalyticPoly) -> Result<()> {
    let sup_sq = TrigPoly::modulus_squared(b).grid_max(crate::symbols::SYMBOL_GRID)?;
    if sup_sq > 1.0 + 1e-9 {
        return Err(CoreError::InvalidInput(format!(
            "symbol is not contractive: sup |b|² = {sup_sq}"
        )));
    }
    Ok(())
}

/// The sub-Bergman Gram operator at truncation n. Hermitian; PSD on the
/// guard block (the final deg-b rows carry truncation defects on the left
/// side).
pub fn subbergman_gram(b: &AnalyticPoly, n: usize, side: GramSide) -> Result<Mat<Complex64>> {
    check_contractive(b)?;
    let tb = bergman_toeplitz_analytic(b, n);
    let tbs = tb.adjoint();
    let product = match side {
        GramSide::Left => tbs.mat() * tb.mat(),
        GramSide::Right => tb.mat() * tbs.mat(),
    };
    let mut gram = -product;
    for i in 0..n {
        gram[(i, i)] += cr(1.0);
    }
    Ok(gram)
}

/// PSD check of (I − T_b̄T_b) − T_z̄(I − T_b̄T_b)T_z on the guard block
/// (guard = deg b + 1, covering both truncation defects).
pub fn lemma52_check(b: &AnalyticPoly, n: usize) -> Result<PsdReport> {
    let db = b.degree(0.0);
    let guard = db + 1;
    if n < 4 * guard {
        return Err(CoreError::GuardTooSmall {
            needed: 4 * guard,
            available: n,
        });
    }
    let g = subbergman_gram(b, n, GramSide::Left)?;
    let z = AnalyticPoly::monomial(1);
    let tz = bergman_toeplitz_analytic(&z, n);
    let shifted = tz.adjoint().mat() * &g * tz.mat();
    let diff = &g - shifted;
    let block = leading_block(&diff, n - guard);
    let (vals, _) = range::eigh(&block)?;
    let min = vals.first().copied().unwrap_or(0.0);
    Ok(PsdReport {
        min_eigenvalue: min,
        dim: block.nrows(),
        tolerance: 1e-10,
        psd: min >= -1e-10,
    })
}

/// Sub-Bergman norm of f: range norm against the principal square root of
/// the right Gram, with truncation doubling to a 1e−6 relative threshold.
pub fn subbergman_norm(b: &AnalyticPoly, f: &BergmanPoly, n: usize) -> Result<f64> {
    const CAP: usize = 1024;
    let mut size = n.max(f.coeffs().len().next_power_of_two()).max(16);
    let mut prev: Option<f64> = None;
    let mut trajectory = Vec::new();
    while size <= CAP {
        let gram = subbergman_gram(b, size, GramSide::Right)?;
        let sqrt = principal_sqrt(&gram)?;
        let space = RangeSpace::new(sqrt)?;
        let norm = space.range_norm(&f.orthonormal_coords(size))?;
        trajectory.push(norm);
        if let Some(last) = prev {
            if (norm - last).abs() <= 1e-6 * norm.max(1e-12) {
                return Ok(norm);
            }
        }
        prev = Some(norm);
        size *= 2;
    }
    Err(CoreError::Unconverged {
        n_cap: CAP,
        trajectory,
    })
}

/// The four Corollary-5.5 chain matrices with pairwise guard-block
/// discrepancies and the norm-equivalence probe ratio.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub n: usize,
    pub names: [&'static str; 4],
    /// Max-entry difference on the guard block, indexed (i, j), i < j.
    pub pairwise: Vec<(usize, usize, f64)>,
    /// max/min of the 20 probe-norm ratios M(√(I−T_b̄T_b)) vs M(T_ā).
    pub ratio: f64,
    pub probe_ratios: Vec<f64>,
}

impl ChainReport {
    pub fn discrepancy(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.pairwise
            .iter()
            .find(|(a, b, _)| *a == lo && *b == hi)
            .map(|(_, _, d)| *d)
            .unwrap_or(f64::NAN)
    }
}

/// Compare I − T_b̄T_b, T_{1−|b|²}, T_{|a|²}, and T_āT_a on the guard block,
/// and measure the equivalence constant between the two sub-Bergman norms.
pub fn identity_chain_probe(b: &AnalyticPoly, n: usize) -> Result<ChainReport> {
    let a = pythagorean_mate(b)?;
    let da = a.poly().degree(0.0);
    let db = b.degree(0.0);
    let guard = da.max(db) + 1;
    if n <= 2 * guard {
        return Err(CoreError::GuardTooSmall {
            needed: 2 * guard + 1,
            available: n,
        });
    }
    let m1 = subbergman_gram(b, n, GramSide::Left)?;
    let m2 = bergman_toeplitz_disc_modulus(1.0, -1.0, b, n).mat().clone();
    let m3 = bergman_toeplitz_disc_modulus(0.0, 1.0, a.poly(), n)
        .mat()
        .clone();
    let ta = bergman_toeplitz_analytic(a.poly(), n);
    let m4 = ta.adjoint().mat() * ta.mat();
    let mats = [&m1, &m2, &m3, &m4];
    let block_dim = n - guard;
    let mut pairwise = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let diff = mats[i] - mats[j];
            pairwise.push((i, j, max_abs(&leading_block(&diff, block_dim))));
        }
    }
    // Norm-equivalence probes: h = √(I − T_b̄T_b)·x lies in both range spaces.
    let sqrt_m1 = principal_sqrt(&m1)?;
    let space_m1 = RangeSpace::new(sqrt_m1.clone())?;
    let space_ta = RangeSpace::new(ta.adjoint().mat().clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b90 ^ n as u64);
    let mut probe_ratios = Vec::with_capacity(20);
    for _ in 0..20 {
        let x = Mat::from_fn(n, 1, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h_col = &sqrt_m1 * &x;
        let h: Vec<Complex64> = (0..n).map(|i| h_col[(i, 0)]).collect();
        let num = space_m1.range_norm(&h)?;
        let den = space_ta.range_norm(&h)?;
        probe_ratios.push(num / den);
    }
    let ratio = probe_ratios.iter().copied().fold(0.0f64, f64::max)
        / probe_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ChainReport {
        n,
        names: [
            "I - T_conj(b) T_b",
            "T_{1-|b|^2} (disc modulus)",
            "T_{|a|^2} (disc modulus)",
            "T_conj(a) T_a",
        ],
        pairwise,
        ratio,
        probe_ratios,
    })
}
