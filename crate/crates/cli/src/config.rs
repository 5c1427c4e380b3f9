//! JSON experiment configuration: schema-validated, unknown keys rejected,
//! complex scalars encoded as two-element [re, im] arrays.

use crate::CliError;
use serde::Deserialize;
use shiftlab_core::hardy::AnalyticPoly;
use shiftlab_core::Complex64;
use std::fmt;
use std::path::Path;

/// Which space the config's coefficients describe.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Hb,
    Mphibar,
    Subbergman,
    Model,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Hb => "hb",
            SpaceKind::Mphibar => "mphibar",
            SpaceKind::Subbergman => "subbergman",
            SpaceKind::Model => "model",
        })
    }
}

/// Per-check tolerance overrides; absent fields keep the pinned defaults.
#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub identity: Option<f64>,
    pub moment: Option<f64>,
    pub psd: Option<f64>,
    pub invariance: Option<f64>,
    pub cross_route: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceKind,
    /// Symbol b (hb / subbergman) or φ (mphibar), as [re, im] pairs.
    pub b: Option<Vec<[f64; 2]>>,
    /// Analytic multiplier symbol for the weighted-moment checks.
    pub phi: Option<Vec<[f64; 2]>>,
    pub f: Option<Vec<[f64; 2]>>,
    pub g: Option<Vec<[f64; 2]>>,
    /// Zeros of the inner function Θ; mutually exclusive with `theta_power`.
    pub theta_zeros: Option<Vec<[f64; 2]>>,
    /// Θ = z^d.
    pub theta_power: Option<usize>,
    /// Truncation order.
    pub n: Option<usize>,
    /// Boundary grid size.
    pub grid: Option<usize>,
    /// Guard-band width, reserved for symbol-composition experiments.
    pub guard: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

pub fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn to_poly(pairs: &[[f64; 2]]) -> AnalyticPoly {
    AnalyticPoly::new(to_complex(pairs))
}

/// Parse and validate a config file. JSON-layer errors carry line/column and
/// field diagnostics; semantic errors name the offending field.
pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    validate(&cfg).map_err(CliError::Config)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), String> {
    if cfg.theta_zeros.is_some() && cfg.theta_power.is_some() {
        return Err("theta_zeros and theta_power are mutually exclusive".into());
    }
    let coeff_fields = [
        ("b", &cfg.b),
        ("phi", &cfg.phi),
        ("f", &cfg.f),
        ("g", &cfg.g),
        ("theta_zeros", &cfg.theta_zeros),
    ];
    for (name, field) in coeff_fields {
        if let Some(v) = field {
            if v.is_empty() {
                return Err(format!("field {name} must not be empty"));
            }
            if !v.iter().flatten().all(|x| x.is_finite()) {
                return Err(format!("field {name} contains a non-finite entry"));
            }
        }
    }
    if let Some(zs) = &cfg.theta_zeros {
        if zs.iter().any(|z| z[0].hypot(z[1]) >= 1.0) {
            return Err("theta_zeros must lie strictly inside the unit disc".into());
        }
    }
    Ok(())
}
