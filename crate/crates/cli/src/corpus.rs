//! Built-in corpus: the pinned closed-form symbols plus seeded random
//! contractive b's (degree ≤ 8) and inner functions Θ of degree ≤ 6.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab_core::hardy::AnalyticPoly;
use shiftlab_core::symbols::{BlaschkeProduct, TrigPoly};
use shiftlab_core::{Complex64, Result};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub name: String,
    pub b: AnalyticPoly,
}

pub fn random_poly(rng: &mut ChaCha8Rng, deg: usize, scale: f64) -> AnalyticPoly {
    AnalyticPoly::new(
        (0..=deg)
            .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect(),
    )
}

/// Random polynomial rescaled to boundary sup-norm `cap`.
pub fn random_contractive(rng: &mut ChaCha8Rng, deg: usize, cap: f64) -> AnalyticPoly {
    let raw = random_poly(rng, deg, 1.0);
    let sup_sq = TrigPoly::modulus_squared(&raw).grid_max(4096).expect("grid");
    raw.scaled(Complex64::new(cap / sup_sq.sqrt().max(1e-9), 0.0))
}

/// The b-corpus: b = (1+z)/2 and b = z/√2, then seeded random symbols of
/// degree 2, 4, 6, 8 with sup-norm 0.85.
pub fn corpus_bs(seed: u64) -> Vec<CorpusCase> {
    let mut cases = vec![
        CorpusCase {
            name: "b-half-sum".into(),
            b: AnalyticPoly::from_real(&[0.5, 0.5]),
        },
        CorpusCase {
            name: "b-half-shift".into(),
            b: AnalyticPoly::from_real(&[0.0, FRAC_1_SQRT_2]),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0bb);
    for deg in [2usize, 4, 6, 8] {
        cases.push(CorpusCase {
            name: format!("b-rand-deg{deg}"),
            b: random_contractive(&mut rng, deg, 0.85),
        });
    }
    cases
}

/// Inner-function descriptor; construction is deferred into the check body
/// so a bad config surfaces as that check's error record.
#[derive(Clone, Debug)]
pub enum ThetaSpec {
    Power(usize),
    Zeros(Vec<Complex64>),
}

impl ThetaSpec {
    pub fn build(&self) -> Result<BlaschkeProduct> {
        match self {
            ThetaSpec::Power(d) => Ok(BlaschkeProduct::power(*d)),
            ThetaSpec::Zeros(zs) => BlaschkeProduct::from_zeros(zs),
        }
    }
}

/// Θ-corpus: monomial chains z², z³ and distinct-zero products of degree
/// 2, 3, and 6.
pub fn corpus_thetas() -> Vec<(String, ThetaSpec)> {
    let c = Complex64::new;
    vec![
        ("theta-z2".into(), ThetaSpec::Power(2)),
        ("theta-z3".into(), ThetaSpec::Power(3)),
        (
            "theta-third-half".into(),
            ThetaSpec::Zeros(vec![c(1.0 / 3.0, 0.0), c(0.5, 0.0)]),
        ),
        (
            "theta-tri".into(),
            ThetaSpec::Zeros(vec![c(0.3, 0.0), c(0.0, 0.5), c(-0.35, 0.2)]),
        ),
        (
            "theta-hex".into(),
            ThetaSpec::Zeros(vec![
                c(0.3, 0.0),
                c(-0.4, 0.0),
                c(0.0, 0.5),
                c(-0.2, -0.45),
                c(0.55, 0.0),
                c(0.15, 0.35),
            ]),
        ),
    ]
}
