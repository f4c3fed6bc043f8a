//! Suite selection, tolerances and numeric parameters.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spectral_poisson_core::QuadratureConfig;

use crate::error::{AppError, AppResult};
use crate::formats::PotentialJson;

pub const SUITES: [&str; 5] = ["jacobi", "compat", "ch", "toda", "kdv"];

/// Expands `all` and rejects unknown names.
pub fn resolve_suites(names: &[String]) -> AppResult<Vec<String>> {
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend(SUITES.iter().map(|s| s.to_string()));
        } else if SUITES.contains(&name.as_str()) {
            out.push(name.clone());
        } else {
            return Err(AppError::config(format!(
                "unknown suite '{name}' (expected one of {}, all)",
                SUITES.join(", ")
            )));
        }
    }
    out.dedup();
    Ok(out)
}

/// File form of a run: `seed`, `suites`, `output_dir` and tolerance overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_seed() -> u64 {
    7
}

fn default_output() -> PathBuf {
    PathBuf::from("reports")
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: default_seed(),
            tolerances: BTreeMap::new(),
            suites: Vec::new(),
            output_dir: default_output(),
        }
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> AppResult<Self> {
        let cfg: SuiteConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> AppResult<()> {
        resolve_suites(&self.suites)?;
        Tolerances::default().overridden(&self.tolerances)?;
        Ok(())
    }
}

/// Pass thresholds, keyed by the names accepted in `[tolerances]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub jacobi: f64,
    pub second_kind: f64,
    pub toda_jacobi: f64,
    pub compat: f64,
    pub casimir: f64,
    pub antisymmetry: f64,
    pub closed_form: f64,
    pub weights: f64,
    pub toda_flow: f64,
    pub involution: f64,
    pub pushforward_antisymmetry: f64,
    pub ch_weyl: f64,
    pub ch_const: f64,
    pub isospectral: f64,
    pub conservation: f64,
    pub kdv_fields: f64,
    pub kdv_commute: f64,
    pub monodromy_det: f64,
    pub rpb: f64,
    /// Factor by which a tampered check must exceed its tolerance.
    pub negative_control_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            jacobi: 1e-6,
            second_kind: 1e-6,
            toda_jacobi: 1e-5,
            compat: 1e-6,
            casimir: 1e-5,
            antisymmetry: 1e-9,
            closed_form: 1e-9,
            weights: 1e-10,
            toda_flow: 1e-9,
            involution: 1e-7,
            pushforward_antisymmetry: 1e-8,
            ch_weyl: 1e-12,
            ch_const: 1e-9,
            isospectral: 1e-6,
            conservation: 1e-8,
            kdv_fields: 1e-6,
            kdv_commute: 1e-6,
            monodromy_det: 1e-8,
            rpb: 1e-3,
            negative_control_factor: 1e3,
        }
    }
}

impl Tolerances {
    pub fn overridden(mut self, map: &BTreeMap<String, f64>) -> AppResult<Self> {
        for (key, &v) in map {
            if !(v > 0.0 && v.is_finite()) {
                return Err(AppError::config(format!("tolerance '{key}' must be positive")));
            }
            let slot = match key.as_str() {
                "jacobi" => &mut self.jacobi,
                "second_kind" => &mut self.second_kind,
                "toda_jacobi" => &mut self.toda_jacobi,
                "compat" => &mut self.compat,
                "casimir" => &mut self.casimir,
                "antisymmetry" => &mut self.antisymmetry,
                "closed_form" => &mut self.closed_form,
                "weights" => &mut self.weights,
                "toda_flow" => &mut self.toda_flow,
                "involution" => &mut self.involution,
                "pushforward_antisymmetry" => &mut self.pushforward_antisymmetry,
                "ch_weyl" => &mut self.ch_weyl,
                "ch_const" => &mut self.ch_const,
                "isospectral" => &mut self.isospectral,
                "conservation" => &mut self.conservation,
                "kdv_fields" => &mut self.kdv_fields,
                "kdv_commute" => &mut self.kdv_commute,
                "monodromy_det" => &mut self.monodromy_det,
                "rpb" => &mut self.rpb,
                "negative_control_factor" => &mut self.negative_control_factor,
                _ => return Err(AppError::config(format!("unknown tolerance '{key}'"))),
            };
            *slot = v;
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChParams {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
}

impl Default for ChParams {
    fn default() -> Self {
        ChParams { x: vec![-1.0, 0.5], p: vec![1.5, 0.7], t_end: 10.0, dt: 1e-3, samples: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TodaParams {
    pub size: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Random states for the weight and positivity checks.
    pub weight_states: usize,
}

impl Default for TodaParams {
    fn default() -> Self {
        TodaParams { size: 3, t_end: 10.0, dt: 1e-3, weight_states: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdvParams {
    pub potential: PotentialJson,
    pub grid: usize,
    pub pairs: usize,
}

impl Default for KdvParams {
    fn default() -> Self {
        KdvParams { potential: PotentialJson::cosine(PI, 0.3), grid: 256, pairs: 10 }
    }
}

/// Everything a suite needs; defaults reproduce the acceptance settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteParams {
    pub seed: u64,
    /// Powers `n` in `f = z^n`.
    pub powers: Vec<u32>,
    /// Pole counts `N`.
    pub sizes: Vec<usize>,
    /// Random states per `(n, N)`.
    pub states: usize,
    pub tamper: bool,
    pub tamper_delta: f64,
    pub step: f64,
    pub quadrature: QuadratureConfig,
    pub compare_n: Vec<u32>,
    pub tolerances: Tolerances,
    pub ch: ChParams,
    pub toda: TodaParams,
    pub kdv: KdvParams,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: default_seed(),
            powers: vec![0, 1, 2, 3],
            sizes: vec![2, 3, 4],
            states: 10,
            tamper: false,
            tamper_delta: 0.1,
            step: spectral_poisson_core::verify::DEFAULT_STEP,
            quadrature: QuadratureConfig::default(),
            compare_n: vec![0, 1, 2],
            tolerances: Tolerances::default(),
            ch: ChParams::default(),
            toda: TodaParams::default(),
            kdv: KdvParams::default(),
        }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> AppResult<()> {
        if self.sizes.contains(&0) {
            return Err(AppError::config("pole counts must be positive"));
        }
        if self.powers.iter().any(|&n| n > spectral_poisson_core::bracket::MAX_POWER) {
            return Err(AppError::config("powers above 8 are not supported"));
        }
        if !(self.step > 0.0) || !(self.tamper_delta > 0.0) {
            return Err(AppError::config("step and tamper delta must be positive"));
        }
        self.quadrature.validate()?;
        Ok(())
    }
}
