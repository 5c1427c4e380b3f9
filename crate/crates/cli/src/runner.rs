//! Check runners: each command produces `CheckRecord`s over the built-in
//! corpus or a supplied config; `suite` chains every command.

use crate::config::{to_poly, ExperimentConfig, SpaceKind, Tolerances};
use crate::corpus::{corpus_bs, corpus_thetas, random_poly, CorpusCase, ThetaSpec};
use crate::report::{digest, CheckRecord, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiftlab_core::bergman::{
    bergman_toeplitz_analytic, identity_chain_probe, lemma52_check, subbergman_gram,
    subbergman_norm, BergmanPoly, GramSide,
};
use shiftlab_core::debranges::{
    cyclicity_probe, f_property_check, hb_embed, hb_inner_product, hb_norm_crosscheck,
    invariant_trace_suite, spectral_density, verify_theorem_c, CyclicityReport, PythagoreanPair,
};
use shiftlab_core::hardy::{backward_shift, kernel_poly, AnalyticPoly};
use shiftlab_core::model::{
    invariance_residual, lattice_enumerate, orthonormalize, subspace_gap, tm_basis,
    SUBSPACE_GAP_TOL,
};
use shiftlab_core::range::{douglas_contraction, douglas_equal, eigh, principal_sqrt, RangeSpace};
use shiftlab_core::symbols::{pythagorean_mate, BlaschkeProduct, TrigPoly, SYMBOL_GRID};
use shiftlab_core::{Complex64, Mat, Result};
use sha2::{Digest, Sha256};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::time::Instant;

/// Resolved run settings; CLI flags take precedence over config values.
#[derive(Clone, Debug, Default)]
pub struct RunContext {
    pub seed: u64,
    pub n: Option<usize>,
    pub grid: Option<usize>,
    pub config: Option<ExperimentConfig>,
}

impl RunContext {
    pub fn builtin(seed: u64) -> Self {
        RunContext {
            seed,
            ..RunContext::default()
        }
    }

    fn without_config(&self) -> Self {
        RunContext {
            config: None,
            ..self.clone()
        }
    }
}

/// One check body's result: the governing residual plus an optional reported
/// value and human-readable detail.
pub struct Outcome {
    residual: f64,
    value: Option<f64>,
    detail: Option<String>,
}

fn out(residual: f64) -> Outcome {
    Outcome {
        residual,
        value: None,
        detail: None,
    }
}

fn run_check(
    records: &mut Vec<CheckRecord>,
    name: String,
    digest_src: String,
    tolerance: f64,
    body: impl FnOnce() -> Result<Outcome>,
) {
    let start = Instant::now();
    let (residual, value, detail, verdict) = match body() {
        Ok(o) => {
            let verdict = if o.residual <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            (o.residual, o.value, o.detail, verdict)
        }
        Err(e) => (f64::NAN, None, Some(format!("error: {e}")), Verdict::Error),
    };
    records.push(CheckRecord {
        check: name,
        input_digest: digest(&digest_src),
        residual,
        tolerance,
        verdict,
        millis: start.elapsed().as_millis(),
        value,
        detail,
    });
}

/// Per-case seed: base seed folded with the check name so cases stay
/// independent of suite ordering.
fn case_seed(seed: u64, name: &str) -> u64 {
    let d = Sha256::digest(name.as_bytes());
    let mut eight = [0u8; 8];
    eight.copy_from_slice(&d[..8]);
    seed ^ u64::from_le_bytes(eight)
}

fn fmt_poly(p: &AnalyticPoly) -> String {
    let parts: Vec<String> = p
        .coeffs()
        .iter()
        .map(|z| format!("({:?},{:?})", z.re, z.im))
        .collect();
    format!("[{}]", parts.join(","))
}

fn max_coeff_dev(p: &AnalyticPoly, q: &AnalyticPoly) -> f64 {
    let len = p.len().max(q.len());
    (0..len)
        .map(|k| (p.coeff(k) - q.coeff(k)).norm())
        .fold(0.0, f64::max)
}

fn config_b_case(ctx: &RunContext) -> Option<CorpusCase> {
    ctx.config.as_ref()?.b.as_ref().map(|b| CorpusCase {
        name: "config".into(),
        b: to_poly(b),
    })
}

fn b_cases(ctx: &RunContext) -> Vec<CorpusCase> {
    config_b_case(ctx)
        .map(|c| vec![c])
        .unwrap_or_else(|| corpus_bs(ctx.seed))
}

fn theta_specs(ctx: &RunContext) -> Vec<(String, ThetaSpec)> {
    if let Some(cfg) = &ctx.config {
        if let Some(d) = cfg.theta_power {
            return vec![("config-theta".into(), ThetaSpec::Power(d))];
        }
        if let Some(zs) = &cfg.theta_zeros {
            return vec![(
                "config-theta".into(),
                ThetaSpec::Zeros(crate::config::to_complex(zs)),
            )];
        }
    }
    corpus_thetas()
}

fn config_poly(
    ctx: &RunContext,
    pick: impl Fn(&ExperimentConfig) -> &Option<Vec<[f64; 2]>>,
) -> Option<AnalyticPoly> {
    ctx.config
        .as_ref()
        .and_then(|c| pick(c).as_ref())
        .map(|v| to_poly(v))
}

fn tol_or(ctx: &RunContext, pick: impl Fn(&Tolerances) -> Option<f64>, default: f64) -> f64 {
    ctx.config
        .as_ref()
        .and_then(|c| pick(&c.tolerances))
        .unwrap_or(default)
}

fn resolved_n(ctx: &RunContext, default: usize) -> usize {
    ctx.n
        .or_else(|| ctx.config.as_ref().and_then(|c| c.n))
        .unwrap_or(default)
}

fn resolved_grid(ctx: &RunContext, default: usize) -> usize {
    ctx.grid
        .or_else(|| ctx.config.as_ref().and_then(|c| c.grid))
        .unwrap_or(default)
}

fn half_sum() -> AnalyticPoly {
    AnalyticPoly::from_real(&[0.5, 0.5])
}

fn half_shift() -> AnalyticPoly {
    AnalyticPoly::from_real(&[0.0, FRAC_1_SQRT_2])
}

/// Sup-grid residual of |a|² + |b|² − 1 for the computed mate a.
fn mate_identity_residual(b: &AnalyticPoly, m: usize) -> Result<(f64, AnalyticPoly)> {
    let a = pythagorean_mate(b)?;
    let ga = TrigPoly::modulus_squared(a.poly()).grid_values(m)?;
    let gb = TrigPoly::modulus_squared(b).grid_values(m)?;
    let one = Complex64::new(1.0, 0.0);
    let resid = (0..m)
        .map(|j| (ga.values()[j] + gb.values()[j] - one).norm())
        .fold(0.0, f64::max);
    Ok((resid, a.poly().clone()))
}

pub fn run_mate(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let m = resolved_grid(ctx, SYMBOL_GRID);
    let itol = tol_or(ctx, |t| t.identity, 1e-9);
    for case in b_cases(ctx) {
        let b = case.b.clone();
        run_check(
            &mut records,
            format!("mate/{}", case.name),
            format!("mate {} m={m} b={}", case.name, fmt_poly(&case.b)),
            itol,
            move || {
                let (resid, a) = mate_identity_residual(&b, m)?;
                Ok(Outcome {
                    detail: Some(format!("a={}", fmt_poly(&a))),
                    ..out(resid)
                })
            },
        );
    }
    if ctx.config.is_none() {
        run_check(
            &mut records,
            "mate/closed-form-half-sum".into(),
            "mate closed form b=(1+z)/2".into(),
            1e-10,
            || {
                let a = pythagorean_mate(&half_sum())?;
                let expect = AnalyticPoly::from_real(&[0.5, -0.5]);
                Ok(Outcome {
                    detail: Some(format!("a={}", fmt_poly(a.poly()))),
                    ..out(max_coeff_dev(a.poly(), &expect))
                })
            },
        );
        run_check(
            &mut records,
            "mate/closed-form-half-shift".into(),
            "mate closed form b=z/sqrt2".into(),
            1e-10,
            || {
                let a = pythagorean_mate(&half_shift())?;
                let expect = AnalyticPoly::from_real(&[FRAC_1_SQRT_2]);
                Ok(Outcome {
                    detail: Some(format!("a={}", fmt_poly(a.poly()))),
                    ..out(max_coeff_dev(a.poly(), &expect))
                })
            },
        );
    }
    records
}

pub fn run_hb_norm(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let n = resolved_n(ctx, 512);
    let cross_tol = tol_or(ctx, |t| t.cross_route, 0.01);
    if let Some(case) = config_b_case(ctx) {
        let space = ctx.config.as_ref().map(|c| c.space).unwrap_or(SpaceKind::Hb);
        let f = config_poly(ctx, |c| &c.f).unwrap_or_else(|| AnalyticPoly::monomial(1));
        let src = format!(
            "hb-norm config space={space} n={n} b={} f={}",
            fmt_poly(&case.b),
            fmt_poly(&f)
        );
        if space == SpaceKind::Subbergman {
            let b = case.b;
            run_check(
                &mut records,
                "hb-norm/config-subbergman".into(),
                src,
                0.0,
                move || {
                    let norm = subbergman_norm(&b, &BergmanPoly::from_analytic(&f), n.min(512))?;
                    Ok(Outcome {
                        residual: 0.0,
                        value: Some(norm * norm),
                        detail: Some("sub-Bergman norm squared".into()),
                    })
                },
            );
        } else {
            let b = case.b;
            run_check(
                &mut records,
                "hb-norm/config-cross-route".into(),
                src,
                cross_tol,
                move || {
                    let pair = PythagoreanPair::new(b)?;
                    let direct = hb_embed(&pair, &f)?.norm();
                    let cross = hb_norm_crosscheck(&pair, &f, n)?;
                    Ok(Outcome {
                        residual: (direct - cross).abs() / direct.max(1e-12),
                        value: Some(direct * direct),
                        detail: Some("H(b) norm squared".into()),
                    })
                },
            );
        }
        return records;
    }
    for (label, f, expect) in [
        ("one", AnalyticPoly::one(), 2.0),
        ("z", AnalyticPoly::monomial(1), 6.0),
    ] {
        let fc = f.clone();
        run_check(
            &mut records,
            format!("hb-norm/{label}"),
            format!("hb-norm {label} b=(1+z)/2"),
            1e-8,
            move || {
                let pair = PythagoreanPair::new(half_sum())?;
                let nsq = hb_embed(&pair, &fc)?.norm().powi(2);
                Ok(Outcome {
                    residual: (nsq - expect).abs(),
                    value: Some(nsq),
                    detail: None,
                })
            },
        );
        run_check(
            &mut records,
            format!("hb-norm/cross-route-{label}"),
            format!("hb-norm cross {label} n={n} b=(1+z)/2"),
            cross_tol,
            move || {
                let pair = PythagoreanPair::new(half_sum())?;
                let direct = hb_embed(&pair, &f)?.norm();
                let cross = hb_norm_crosscheck(&pair, &f, n)?;
                Ok(Outcome {
                    residual: (direct - cross).abs() / direct.max(1e-12),
                    value: Some(cross * cross),
                    detail: None,
                })
            },
        );
    }
    records
}

pub fn run_f_property(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let cases = b_cases(ctx);
    let total = 100usize;
    let per = total / cases.len();
    let extra = total % cases.len();
    for (i, case) in cases.into_iter().enumerate() {
        let count = per + usize::from(i < extra);
        let name = format!("f-property/{}", case.name);
        let seed = case_seed(ctx.seed, &name);
        let src = format!(
            "f-property {} count={count} seed={seed} b={}",
            case.name,
            fmt_poly(&case.b)
        );
        let b = case.b;
        run_check(&mut records, name, src, 1e-8, move || {
            let pair = PythagoreanPair::new(b)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..count {
                let g = random_poly(&mut rng, 5, 0.8);
                let r = rng.gen_range(0.05..0.75f64);
                let th = rng.gen_range(0.0..TAU);
                let mut zeros = vec![Complex64::new(r * th.cos(), r * th.sin())];
                if rng.gen_bool(0.5) {
                    let r2 = rng.gen_range(0.05..0.75f64);
                    let th2 = rng.gen_range(0.0..TAU);
                    let z2 = Complex64::new(r2 * th2.cos(), r2 * th2.sin());
                    if (z2 - zeros[0]).norm() > 0.1 {
                        zeros.push(z2);
                    }
                }
                let theta = BlaschkeProduct::from_zeros(&zeros)?;
                let mut f = g;
                for z in &zeros {
                    f = f.mul(&AnalyticPoly::new(vec![*z, Complex64::new(-1.0, 0.0)]));
                }
                let (nf, nq) = f_property_check(&pair, &f, &theta)?;
                worst = worst.max(nq - nf);
            }
            Ok(Outcome {
                detail: Some(format!("{count} divisible pairs")),
                ..out(worst)
            })
        });
    }
    records
}

pub fn run_spectral(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let m = resolved_grid(ctx, 4096);
    let mtol = tol_or(ctx, |t| t.moment, 1e-6);
    let cfg_f = config_poly(ctx, |c| &c.f);
    let cfg_g = config_poly(ctx, |c| &c.g);
    for case in b_cases(ctx) {
        let name = format!("spectral/{}", case.name);
        let seed = case_seed(ctx.seed, &name);
        let fg_desc = format!(
            "f={} g={}",
            cfg_f.as_ref().map_or("seeded".into(), fmt_poly),
            cfg_g.as_ref().map_or("seeded".into(), fmt_poly),
        );
        let src = format!(
            "spectral {} m={m} seed={seed} b={} {fg_desc}",
            case.name,
            fmt_poly(&case.b)
        );
        let b = case.b;
        let (cf, cg) = (cfg_f.clone(), cfg_g.clone());
        run_check(&mut records, name, src, mtol, move || {
            let pair = PythagoreanPair::new(b)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = cf.unwrap_or_else(|| random_poly(&mut rng, 6, 0.8));
            let g = cg.unwrap_or_else(|| random_poly(&mut rng, 5, 0.8));
            let density = spectral_density(&pair, &f, &g, m)?;
            let eg = hb_embed(&pair, &g)?;
            let mut shifted = f.clone();
            let mut worst = 0.0f64;
            for k in 0..=16usize {
                let lhs = hb_inner_product(&hb_embed(&pair, &shifted)?, &eg);
                worst = worst.max((lhs - density.moment(k)).norm());
                shifted = backward_shift(&shifted);
            }
            Ok(Outcome {
                detail: Some("moments n = 0..16".into()),
                ..out(worst)
            })
        });
    }
    records
}

pub fn run_theorem_c(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let mtol = tol_or(ctx, |t| t.moment, 1e-6);
    let cfg_f = config_poly(ctx, |c| &c.f);
    let cfg_g = config_poly(ctx, |c| &c.g);
    let cfg_phi = config_poly(ctx, |c| &c.phi);
    for case in b_cases(ctx) {
        let name = format!("theorem-c/{}", case.name);
        let seed = case_seed(ctx.seed, &name);
        let phi_desc = cfg_phi
            .as_ref()
            .map_or("10 seeded".into(), fmt_poly);
        let src = format!(
            "theorem-c {} seed={seed} b={} phi={phi_desc}",
            case.name,
            fmt_poly(&case.b)
        );
        let b = case.b;
        let (cf, cg, cphi) = (cfg_f.clone(), cfg_g.clone(), cfg_phi.clone());
        run_check(&mut records, name, src, mtol, move || {
            let pair = PythagoreanPair::new(b)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = cf.unwrap_or_else(|| random_poly(&mut rng, 5, 0.8));
            let g = cg.unwrap_or_else(|| random_poly(&mut rng, 4, 0.8));
            let phis: Vec<AnalyticPoly> = match cphi {
                Some(p) => vec![p],
                None => (0..10).map(|_| random_poly(&mut rng, 5, 0.7)).collect(),
            };
            let mut worst = 0.0f64;
            for phi in &phis {
                worst = worst.max(verify_theorem_c(&pair, phi, &f, &g)?);
            }
            Ok(Outcome {
                detail: Some(format!("{} multiplier symbols", phis.len())),
                ..out(worst)
            })
        });
    }
    records
}

pub fn run_invariance(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let itol = tol_or(ctx, |t| t.invariance, 1e-7);
    let ths = theta_specs(ctx);
    let space = ctx.config.as_ref().map(|c| c.space);
    let trace_cases: Vec<CorpusCase> = if space == Some(SpaceKind::Model) {
        Vec::new() // pure model space: lattice search only, no H(b) trace
    } else if let Some(case) = config_b_case(ctx) {
        vec![case]
    } else {
        corpus_bs(ctx.seed).into_iter().take(3).collect()
    };
    for case in &trace_cases {
        for (tname, spec) in &ths {
            let name = format!("invariance/trace/{}/{tname}", case.name);
            let src = format!(
                "invariance trace {} {tname} b={} theta={spec:?}",
                case.name,
                fmt_poly(&case.b)
            );
            let b = case.b.clone();
            let spec = spec.clone();
            run_check(&mut records, name, src, itol, move || {
                let pair = PythagoreanPair::new(b)?;
                let theta = spec.build()?;
                let report = invariant_trace_suite(&pair, &theta)?;
                let mut worst = 0.0f64;
                let mut min_action = f64::INFINITY;
                for s in &report.subspaces {
                    worst = worst
                        .max(s.witness_residual)
                        .max(s.sstar_residual)
                        .max(s.ta_closure_residual)
                        .max(s.divisor_gap);
                    min_action = min_action.min(s.ta_min_action);
                }
                if min_action <= 0.0 {
                    worst = f64::INFINITY;
                }
                Ok(Outcome {
                    residual: worst,
                    value: Some(min_action),
                    detail: Some(format!("{} lattice elements", report.subspaces.len())),
                })
            });
        }
    }
    for (tname, spec) in &ths {
        let name = format!("invariance/search/{tname}");
        let seed = case_seed(ctx.seed, &name);
        let src = format!("invariance search {tname} seed={seed} theta={spec:?}");
        let spec = spec.clone();
        run_check(&mut records, name, src, 0.0, move || {
            let theta = spec.build()?;
            let n = 64;
            let k = tm_basis(&theta, n)?;
            let lat = lattice_enumerate(&k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut violations = 0usize;
            for _ in 0..200 {
                let dim = rng.gen_range(1..=2usize);
                let raw: Vec<AnalyticPoly> = (0..dim)
                    .map(|_| {
                        let mut acc = AnalyticPoly::zero(n);
                        for e in k.basis() {
                            let w = Complex64::new(
                                rng.gen_range(-1.0..1.0),
                                rng.gen_range(-1.0..1.0),
                            );
                            acc = acc.add(&e.scaled(w));
                        }
                        acc
                    })
                    .collect();
                let span = orthonormalize(&raw, n)?;
                if invariance_residual(&span) <= 1e-6 {
                    let matched = lat
                        .iter()
                        .any(|e| subspace_gap(e.vectors(), &span) <= SUBSPACE_GAP_TOL);
                    if !matched {
                        violations += 1;
                    }
                }
            }
            Ok(Outcome {
                detail: Some("200 seeded candidates, threshold 1e-6".into()),
                ..out(violations as f64)
            })
        });
    }
    records
}

/// Max deviation of the observed Krylov saturation rank from `expect`,
/// infinite when a truncation level failed to saturate.
fn rank_residual(report: &CyclicityReport, expect: usize) -> f64 {
    report
        .samples
        .iter()
        .map(|s| match s.saturation {
            Some(r) => (r as f64 - expect as f64).abs(),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

type ProbeBuilder = Box<dyn FnOnce() -> Result<AnalyticPoly>>;

pub fn run_cyclicity(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let schedule: Vec<usize> = match ctx.n.or_else(|| ctx.config.as_ref().and_then(|c| c.n)) {
        Some(n) => vec![n],
        None => vec![128, 256, 512],
    };
    let b = config_b_case(ctx)
        .map(|c| c.b)
        .unwrap_or_else(half_sum);
    if let Some(f) = config_poly(ctx, |c| &c.f) {
        let sched = schedule.clone();
        let src = format!(
            "cyclicity config schedule={schedule:?} b={} f={}",
            fmt_poly(&b),
            fmt_poly(&f)
        );
        run_check(
            &mut records,
            "cyclicity/config".into(),
            src,
            0.0,
            move || {
                let pair = PythagoreanPair::new(b)?;
                let report = cyclicity_probe(&pair, &f, &sched)?;
                let sat = report.samples.last().and_then(|s| s.saturation);
                Ok(Outcome {
                    residual: 0.0,
                    value: sat.map(|r| r as f64),
                    detail: Some(report.verdict),
                })
            },
        );
        return records;
    }
    let probes: [(&str, ProbeBuilder, Option<usize>); 3] = [
        (
            "kernel-half",
            Box::new(|| kernel_poly(Complex64::new(0.5, 0.0), 512)),
            Some(1),
        ),
        (
            "double-pole-half",
            // 1/(1−z/2)² has coefficients (k+1)/2^k.
            Box::new(|| {
                Ok(AnalyticPoly::new(
                    (0..512)
                        .map(|k| Complex64::new((k as f64 + 1.0) * 0.5f64.powi(k), 0.0))
                        .collect(),
                ))
            }),
            Some(2),
        ),
        (
            "truncated-exp",
            Box::new(|| {
                let mut coeffs = Vec::with_capacity(256);
                let mut term = 1.0f64;
                for k in 0..256 {
                    coeffs.push(Complex64::new(term, 0.0));
                    term /= (k + 1) as f64;
                }
                Ok(AnalyticPoly::new(coeffs))
            }),
            None,
        ),
    ];
    for (label, build, expect) in probes {
        let sched = schedule.clone();
        let bc = b.clone();
        let src = format!(
            "cyclicity {label} schedule={schedule:?} b={}",
            fmt_poly(&b)
        );
        run_check(
            &mut records,
            format!("cyclicity/{label}"),
            src,
            0.0,
            move || {
                let pair = PythagoreanPair::new(bc)?;
                let f = build()?;
                let report = cyclicity_probe(&pair, &f, &sched)?;
                let residual = match expect {
                    Some(rank) => rank_residual(&report, rank),
                    // No saturation expected below rank 32 at any level.
                    None => report
                        .samples
                        .iter()
                        .map(|s| match s.saturation {
                            None => 0.0,
                            Some(r) if r > 32 => 0.0,
                            Some(_) => f64::INFINITY,
                        })
                        .fold(0.0, f64::max),
                };
                Ok(Outcome {
                    residual,
                    value: Some(report.hb_norm),
                    detail: Some(report.verdict),
                })
            },
        );
    }
    records
}

pub fn run_bergman(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let n = resolved_n(ctx, 128);
    let ptol = tol_or(ctx, |t| t.psd, 1e-10);
    for case in b_cases(ctx) {
        let name = format!("bergman/psd/{}", case.name);
        let src = format!("bergman psd {} n={n} b={}", case.name, fmt_poly(&case.b));
        let b = case.b;
        run_check(&mut records, name, src, ptol, move || {
            let report = lemma52_check(&b, n)?;
            Ok(Outcome {
                residual: (-report.min_eigenvalue).max(0.0),
                value: Some(report.min_eigenvalue),
                detail: Some(format!("G − T_z* G T_z over dim {}", report.dim)),
            })
        });
    }
    if ctx.config.is_none() {
        let b = half_shift();
        run_check(
            &mut records,
            "bergman/diag-left-gram".into(),
            format!("bergman diag n={n} b=z/sqrt2"),
            1e-12,
            move || {
                let g = subbergman_gram(&b, n, GramSide::Left)?;
                let mut worst = 0.0f64;
                for k in 0..n - 1 {
                    let expect = (k as f64 + 3.0) / (2.0 * (k as f64 + 2.0));
                    worst = worst.max((g[(k, k)] - Complex64::new(expect, 0.0)).norm());
                }
                Ok(Outcome {
                    detail: Some("diagonal (k+3)/(2(k+2))".into()),
                    ..out(worst)
                })
            },
        );
        let b = half_shift();
        run_check(
            &mut records,
            "bergman/diag-lemma52".into(),
            format!("bergman lemma diag n={n} b=z/sqrt2"),
            1e-12,
            move || {
                let g = subbergman_gram(&b, n, GramSide::Left)?;
                let tz = bergman_toeplitz_analytic(&AnalyticPoly::monomial(1), n);
                let diff = &g - tz.adjoint().mat() * &g * tz.mat();
                let mut worst = 0.0f64;
                for k in 0..n - 2 {
                    let expect =
                        (k as f64 + 5.0) / (2.0 * (k as f64 + 2.0) * (k as f64 + 3.0));
                    worst = worst.max((diff[(k, k)] - Complex64::new(expect, 0.0)).norm());
                }
                Ok(Outcome {
                    detail: Some("difference diagonal (k+5)/(2(k+2)(k+3))".into()),
                    ..out(worst)
                })
            },
        );
    }
    records
}

fn random_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<Complex64> {
    Mat::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn col_to_vec(m: &Mat<Complex64>) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

pub fn run_douglas(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let eq_seed = case_seed(ctx.seed, "douglas/equality");
    run_check(
        &mut records,
        "douglas/equality".into(),
        format!("douglas equality pairs=50 seed={eq_seed}"),
        0.0,
        move || {
            let mut rng = ChaCha8Rng::seed_from_u64(eq_seed);
            let mut mismatches = 0usize;
            for i in 0..50 {
                let a = random_mat(&mut rng, 6, 4);
                // Even cases share the range (unitary column rotation); odd
                // cases scale it, which range-norm probes must detect.
                let (expect_equal, bmat) = if i % 2 == 0 {
                    let h = random_mat(&mut rng, 4, 4);
                    let (_, u) = eigh(&h)?;
                    (true, &a * &u)
                } else {
                    (false, Mat::from_fn(6, 4, |r, k| a[(r, k)] * 2.0))
                };
                let (equal, _) = douglas_equal(&a, &bmat, 1e-10)?;
                let space_a = RangeSpace::new(a.clone())?;
                let space_b = RangeSpace::new(bmat)?;
                let mut agree = true;
                for _ in 0..20 {
                    let x = random_mat(&mut rng, 4, 1);
                    let h = col_to_vec(&(&a * &x));
                    let na = space_a.range_norm(&h)?;
                    let nb = space_b.range_norm(&h)?;
                    if (na - nb).abs() > 1e-6 * na.max(1e-12) {
                        agree = false;
                    }
                }
                if equal != agree || equal != expect_equal {
                    mismatches += 1;
                }
            }
            Ok(Outcome {
                detail: Some("verdict vs probe agreement, 50 pairs".into()),
                ..out(mismatches as f64)
            })
        },
    );
    let ct_seed = case_seed(ctx.seed, "douglas/contraction");
    run_check(
        &mut records,
        "douglas/contraction".into(),
        format!("douglas contraction pairs=50 seed={ct_seed}"),
        0.0,
        move || {
            let mut rng = ChaCha8Rng::seed_from_u64(ct_seed);
            let mut mismatches = 0usize;
            for i in 0..50 {
                let a = random_mat(&mut rng, 5, 5);
                let raw = random_mat(&mut rng, 5, 5);
                let sigma = RangeSpace::new(raw.clone())?.sigma()[0];
                let cmat = Mat::from_fn(5, 5, |r, k| raw[(r, k)] / (sigma * 1.05));
                let caac = &cmat * (&a * a.adjoint()) * cmat.adjoint();
                // Even cases add PSD slack (valid contraction); odd cases
                // shrink BB* below CAA*C*, so probes must find a violation.
                let bmat = if i % 2 == 0 {
                    let d = random_mat(&mut rng, 5, 5);
                    let slack = &d * d.adjoint();
                    principal_sqrt(&(&caac + &slack))?
                } else {
                    principal_sqrt(&Mat::from_fn(5, 5, |r, k| caac[(r, k)] * 0.5))?
                };
                let report = douglas_contraction(&cmat, &a, &bmat, 1e-10)?;
                let space_a = RangeSpace::new(a.clone())?;
                let space_b = RangeSpace::new(bmat)?;
                let mut probes_ok = true;
                for _ in 0..20 {
                    let x = random_mat(&mut rng, 5, 1);
                    let h = &a * &x;
                    let nh = space_a.range_norm(&col_to_vec(&h))?;
                    let nch = space_b.range_norm(&col_to_vec(&(&cmat * &h)))?;
                    if nch > nh + 1e-6 {
                        probes_ok = false;
                    }
                }
                if report.psd != probes_ok {
                    mismatches += 1;
                }
            }
            Ok(Outcome {
                detail: Some("PSD verdict vs probe inequality, 50 pairs".into()),
                ..out(mismatches as f64)
            })
        },
    );
    records
}

pub fn run_chain_probe(ctx: &RunContext) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let n = resolved_n(ctx, 64);
    if let Some(case) = config_b_case(ctx) {
        let b = case.b.clone();
        run_check(
            &mut records,
            "chain-probe/config-left-gram-vs-disc".into(),
            format!("chain config n={n} b={}", fmt_poly(&case.b)),
            1e-10,
            move || {
                let report = identity_chain_probe(&b, n)?;
                Ok(Outcome {
                    residual: report.discrepancy(0, 1),
                    value: Some(report.ratio),
                    detail: Some(format!("pairwise {:?}", report.pairwise)),
                })
            },
        );
        let b = case.b;
        run_check(
            &mut records,
            "chain-probe/config-ratio-doubling".into(),
            format!("chain config ratio n={n}..{}", 2 * n),
            0.05,
            move || {
                let r1 = identity_chain_probe(&b, n)?.ratio;
                let r2 = identity_chain_probe(&b, 2 * n)?.ratio;
                Ok(Outcome {
                    residual: (r2 / r1 - 1.0).abs(),
                    value: Some(r1),
                    detail: Some(format!("ratio {r1:.6} -> {r2:.6}")),
                })
            },
        );
        return records;
    }
    let b = half_shift();
    run_check(
        &mut records,
        "chain-probe/half-shift-discrepancy".into(),
        format!("chain discrepancy n={n} b=z/sqrt2"),
        1e-12,
        move || {
            let report = identity_chain_probe(&b, n)?;
            let d = report.discrepancy(0, 3);
            Ok(Outcome {
                residual: (d - 0.25).abs(),
                value: Some(d),
                detail: Some(format!("{} vs {}", report.names[0], report.names[3])),
            })
        },
    );
    let b = half_shift();
    run_check(
        &mut records,
        "chain-probe/half-shift-left-gram-vs-disc".into(),
        format!("chain co-analytic n={n} b=z/sqrt2"),
        1e-12,
        move || {
            let report = identity_chain_probe(&b, n)?;
            Ok(Outcome {
                residual: report.discrepancy(0, 1),
                value: None,
                detail: Some(format!("{} vs {}", report.names[0], report.names[1])),
            })
        },
    );
    let b = half_shift();
    run_check(
        &mut records,
        "chain-probe/ratio-doubling".into(),
        format!("chain ratio n={n}..{} b=z/sqrt2", 2 * n),
        0.05,
        move || {
            let r1 = identity_chain_probe(&b, n)?.ratio;
            let r2 = identity_chain_probe(&b, 2 * n)?.ratio;
            if !(r1.is_finite() && r2.is_finite()) {
                return Ok(Outcome {
                    residual: f64::INFINITY,
                    value: None,
                    detail: Some("non-finite ratio".into()),
                });
            }
            Ok(Outcome {
                residual: (r2 / r1 - 1.0).abs(),
                value: Some(r1),
                detail: Some(format!("ratio {r1:.6} -> {r2:.6}")),
            })
        },
    );
    records
}

/// Every command over the built-in corpus; a supplied config is ignored
/// apart from its seed (already folded into the context).
pub fn run_suite(ctx: &RunContext) -> Vec<CheckRecord> {
    let ctx = ctx.without_config();
    let mut records = Vec::new();
    records.extend(run_mate(&ctx));
    records.extend(run_hb_norm(&ctx));
    records.extend(run_f_property(&ctx));
    records.extend(run_spectral(&ctx));
    records.extend(run_theorem_c(&ctx));
    records.extend(run_invariance(&ctx));
    records.extend(run_cyclicity(&ctx));
    records.extend(run_bergman(&ctx));
    records.extend(run_douglas(&ctx));
    records.extend(run_chain_probe(&ctx));
    records
}
