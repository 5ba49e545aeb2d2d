//! Experiment configuration.
//!
//! A config file names an experiment `kind`; every other key falls back to the
//! preset for that kind. Overrides `a.b=value` are applied to the JSON tree
//! after the file and before validation, so the resolved config is exactly
//! what a file with those keys would produce.

use std::fmt;
use std::path::{Path, PathBuf};

use lpns::solver::SolverConfig;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Lemma1Ensemble,
    HeatDecay,
    TaylorGreen,
    SmallDataNse,
    Theorem1Window,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Lemma1Ensemble,
        ExperimentKind::HeatDecay,
        ExperimentKind::TaylorGreen,
        ExperimentKind::SmallDataNse,
        ExperimentKind::Theorem1Window,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Lemma1Ensemble => "lemma1-ensemble",
            ExperimentKind::HeatDecay => "heat-decay",
            ExperimentKind::TaylorGreen => "taylor-green",
            ExperimentKind::SmallDataNse => "small-data-nse",
            ExperimentKind::Theorem1Window => "theorem1-window",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
}

/// Time stepping settings; the regularity exponent lives at the top level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    pub dealias_fraction: f64,
    pub record_every: usize,
    pub nonlinear: bool,
}

/// Initial-data profile: band `j` gets sup norm `amplitude · 2^{−j·profile_exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub amplitude: f64,
    pub profile_exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: GridConfig,
    pub solver: SolverSection,
    /// Members use seeds `seed, seed + 1, …`.
    pub ensemble_size: usize,
    pub seed: u64,
    pub gamma: f64,
    /// Smallness threshold for the critical-norm criterion.
    pub m0: f64,
    pub output_dir: PathBuf,
    pub field: FieldSection,
    /// Heat-decay evaluation times.
    pub heat_times: Vec<f64>,
    /// Critical-norm levels for small-data runs; one level for window runs.
    pub critical_norms: Vec<f64>,
    /// Observation window; `null` means the whole run.
    pub window: Option<(f64, f64)>,
    /// Decay constant `c` used by the per-band a-priori audit.
    pub decay_c: f64,
    /// Write an `LPNS` checkpoint every this many samples; 0 disables.
    pub checkpoint_every: usize,
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

impl ExperimentConfig {
    /// Defaults for `kind`, sized for the acceptance runs.
    pub fn preset(kind: ExperimentKind) -> Self {
        let mut cfg = ExperimentConfig {
            kind,
            grid: GridConfig {
                dim: 3,
                n: 32,
                period: TWO_PI,
            },
            solver: SolverSection {
                dt: 0.02,
                t_end: 1.0,
                dealias_fraction: lpns::grid::DEFAULT_DEALIAS_FRACTION,
                record_every: 5,
                nonlinear: true,
            },
            ensemble_size: 10,
            seed: 1,
            gamma: lpns::monitor::DEFAULT_GAMMA,
            m0: 0.05,
            output_dir: PathBuf::from("out"),
            field: FieldSection {
                amplitude: 1.0,
                profile_exponent: 0.5,
            },
            heat_times: vec![0.01, 0.1, 1.0],
            critical_norms: vec![1e-1, 1e-2, 1e-3],
            window: None,
            decay_c: 0.2,
            checkpoint_every: 0,
        };
        match kind {
            ExperimentKind::Lemma1Ensemble => {
                cfg.grid.n = 64;
                cfg.ensemble_size = 100;
            }
            ExperimentKind::HeatDecay => {
                cfg.ensemble_size = 20;
            }
            ExperimentKind::TaylorGreen => {
                cfg.grid = GridConfig {
                    dim: 2,
                    n: 64,
                    period: TWO_PI,
                };
                cfg.solver.dt = 1e-3;
                cfg.solver.record_every = 100;
                cfg.ensemble_size = 1;
            }
            ExperimentKind::SmallDataNse => {}
            ExperimentKind::Theorem1Window => {
                cfg.ensemble_size = 1;
                cfg.critical_norms = vec![1e-2];
                cfg.window = Some((0.5, 1.0));
            }
        }
        cfg
    }

    /// Solver settings with the config's regularity exponent.
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.solver.dt,
            t_end: self.solver.t_end,
            dealias_fraction: self.solver.dealias_fraction,
            record_every: self.solver.record_every,
            gamma: self.gamma,
            nonlinear: self.solver.nonlinear,
        }
    }

    pub fn grid(&self) -> lpns::Result<lpns::grid::Grid> {
        lpns::grid::make_grid(self.grid.dim, self.grid.n, self.grid.period)
    }

    pub fn window(&self) -> (f64, f64) {
        self.window.unwrap_or((0.0, self.solver.t_end))
    }

    pub fn member_seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.ensemble_size as u64).map(|i| self.seed.wrapping_add(i))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        self.grid().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.solver_config()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.ensemble_size == 0 {
            return bad("ensemble_size must be at least 1".into());
        }
        if !(self.m0 > 0.0) {
            return bad(format!("m0 = {} must be positive", self.m0));
        }
        if !(self.field.amplitude > 0.0)
            || !self.field.amplitude.is_finite()
            || !self.field.profile_exponent.is_finite()
        {
            return bad("field.amplitude must be positive and field.profile_exponent finite".into());
        }
        if self.heat_times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return bad("heat_times must be positive".into());
        }
        if self.critical_norms.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
            return bad("critical_norms must be positive".into());
        }
        if !(self.decay_c > 0.0) {
            return bad(format!("decay_c = {} must be positive", self.decay_c));
        }
        if let Some((a, b)) = self.window {
            if !(a >= 0.0 && a <= b && b <= self.solver.t_end) {
                return bad(format!("window ({a}, {b}) must lie in [0, t_end]"));
            }
        }
        match self.kind {
            ExperimentKind::SmallDataNse | ExperimentKind::Theorem1Window if self.critical_norms.is_empty() => {
                bad("critical_norms must not be empty".into())
            }
            ExperimentKind::HeatDecay if self.heat_times.is_empty() => bad("heat_times must not be empty".into()),
            ExperimentKind::TaylorGreen if self.grid.dim != 2 => bad("taylor-green runs in two dimensions".into()),
            _ => Ok(()),
        }
    }

    /// First 16 hex digits of SHA-256 over the canonical JSON form, with the
    /// output directory blanked so relocated reruns share a hash.
    pub fn config_hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses `a.b=value`. The value is read as JSON when possible and as a
/// string otherwise.
pub fn parse_override(s: &str) -> Result<(Vec<String>, Value), HarnessError> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override `{s}` is not key=value")))?;
    let path: Vec<String> = key.split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(HarnessError::Config(format!(
            "override key `{key}` has an empty segment"
        )));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    Ok((path, value))
}

fn set_path(root: &mut Value, path: &[String], value: Value) -> Result<(), HarnessError> {
    let mut node = root;
    for (i, key) in path.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| HarnessError::Config(format!("`{}` is not an object", path[..i].join("."))))?;
        if i + 1 == path.len() {
            obj.insert(key.clone(), value);
            return Ok(());
        }
        node = obj.entry(key.clone()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("override paths are nonempty")
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Resolves a config from file contents plus overrides.
pub fn resolve(text: &str, overrides: &[String]) -> Result<ExperimentConfig, HarnessError> {
    let mut user: Value = serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("invalid JSON: {e}")))?;
    if !user.is_object() {
        return Err(HarnessError::Config("config must be a JSON object".into()));
    }
    for o in overrides {
        let (path, value) = parse_override(o)?;
        set_path(&mut user, &path, value)?;
    }
    let kind_value = user
        .get("kind")
        .cloned()
        .ok_or_else(|| HarnessError::Config("config needs a `kind`".into()))?;
    let kind: ExperimentKind =
        serde_json::from_value(kind_value).map_err(|e| HarnessError::Config(format!("kind: {e}")))?;
    let mut tree = serde_json::to_value(ExperimentConfig::preset(kind)).expect("preset serializes");
    merge(&mut tree, user);
    let cfg: ExperimentConfig = serde_json::from_value(tree).map_err(|e| HarnessError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    resolve(&text, overrides)
}
