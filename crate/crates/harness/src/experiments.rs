//! Experiment runners. Each writes its data files under `output_dir`, named
//! `<kind>_seed<seed>…`, plus a `metadata.json` that alone carries wall-clock
//! timestamps. Every data row carries the member seed and the config hash.

use std::cell::RefCell;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use lpns::checkpoint;
use lpns::field::{to_physical, RealVectorField, SpectralVectorField};
use lpns::heat::band_decay_check;
use lpns::littlewood_paley::{make_cutoff, BandIndexRange};
use lpns::monitor::{check_theorem1, duhamel_band_audit, MonitorReport, NormSampler, TrajectoryRecord};
use lpns::paraproduct::lemma1_scan;
use lpns::solver::{simulate, SimulationError, SolverState};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::HarnessError;
use crate::random::{default_range, random_divfree_field, scale_to_critical_norm, RandomFieldSpec};
use crate::rng::ALGORITHM_ID;

/// Divergence residual above which a generated or evolved field is rejected.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// What a run produced and whether anything went wrong numerically.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub files: Vec<PathBuf>,
    pub blow_ups: usize,
    pub invariant_violations: Vec<String>,
}

impl RunSummary {
    /// 0 when clean, 2 on any suspected blow-up, 3 on any invariant violation.
    pub fn exit_code(&self) -> i32 {
        if !self.invariant_violations.is_empty() {
            3
        } else if self.blow_ups > 0 {
            2
        } else {
            0
        }
    }
}

struct Outputs {
    dir: PathBuf,
    stem: String,
    hash: String,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn new(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        fs::create_dir_all(&cfg.output_dir)?;
        Ok(Self {
            dir: cfg.output_dir.clone(),
            stem: format!("{}_seed{}", cfg.kind, cfg.seed),
            hash: cfg.config_hash(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, suffix: &str) -> PathBuf {
        let p = self.dir.join(format!("{}{}", self.stem, suffix));
        self.files.push(p.clone());
        p
    }

    fn write_csv(&mut self, suffix: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), HarnessError> {
        let path = self.path(suffix);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<(), HarnessError> {
        let path = self.path(suffix);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Shortest round-trip form; exponent notation for very large or small values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Runs `cfg` to completion and writes its outputs.
///
/// Numerical trouble (blow-up, broken invariants) is reported in the summary
/// rather than as an error so that partial data is still written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, HarnessError> {
    cfg.validate()?;
    let started = unix_now();
    let mut out = Outputs::new(cfg)?;
    let mut summary = RunSummary {
        kind: cfg.kind,
        config_hash: out.hash.clone(),
        files: Vec::new(),
        blow_ups: 0,
        invariant_violations: Vec::new(),
    };
    match cfg.kind {
        ExperimentKind::Lemma1Ensemble => run_lemma1(cfg, &mut out, &mut summary)?,
        ExperimentKind::HeatDecay => run_heat(cfg, &mut out, &mut summary)?,
        ExperimentKind::TaylorGreen => run_taylor_green(cfg, &mut out, &mut summary)?,
        ExperimentKind::SmallDataNse | ExperimentKind::Theorem1Window => run_nse(cfg, &mut out, &mut summary)?,
    }
    summary.files = out.files.clone();
    let metadata = serde_json::json!({
        "kind": cfg.kind,
        "config_hash": summary.config_hash,
        "rng_algorithm": ALGORITHM_ID,
        "lpns_version": env!("CARGO_PKG_VERSION"),
        "started_unix": started,
        "finished_unix": unix_now(),
        "config": cfg,
        "files": summary.files,
        "blow_ups": summary.blow_ups,
        "invariant_violations": summary.invariant_violations,
    });
    fs::write(
        cfg.output_dir.join("metadata.json"),
        serde_json::to_string_pretty(&metadata)? + "\n",
    )?;
    Ok(summary)
}

fn initial_field(
    cfg: &ExperimentConfig,
    range: &BandIndexRange,
    seed: u64,
) -> Result<SpectralVectorField, HarnessError> {
    let grid = cfg.grid()?;
    let spec = RandomFieldSpec::profile(range, cfg.field.amplitude, cfg.field.profile_exponent, seed);
    Ok(random_divfree_field(&grid, &spec)?)
}

fn check_divergence(v: &SpectralVectorField, what: &str, violations: &mut Vec<String>) {
    let r = v.divergence_residual();
    if !(r <= DIVERGENCE_TOLERANCE) {
        violations.push(format!("{what}: divergence residual {r:e}"));
    }
}

fn run_lemma1(cfg: &ExperimentConfig, out: &mut Outputs, summary: &mut RunSummary) -> Result<(), HarnessError> {
    let grid = cfg.grid()?;
    let range = default_range(&grid)?;
    let cutoff = make_cutoff();
    let seeds: Vec<u64> = cfg.member_seeds().collect();
    let members: Vec<Result<(Vec<Vec<String>>, Vec<String>), HarnessError>> = seeds
        .par_iter()
        .map(|&seed| {
            let v = initial_field(cfg, &range, seed)?;
            let mut violations = Vec::new();
            check_divergence(&v, &format!("seed {seed}"), &mut violations);
            let reports = match lemma1_scan(&v, &cutoff, cfg.gamma, &range) {
                Ok(r) => r,
                Err(lpns::Error::Inconsistent(msg)) => {
                    violations.push(format!("seed {seed}: {msg}"));
                    Vec::new()
                }
                Err(e) => return Err(e.into()),
            };
            let mut rows = Vec::new();
            for r in reports {
                if !r.ratio.is_finite() {
                    violations.push(format!("seed {seed} band {}: ratio {}", r.j, r.ratio));
                }
                rows.push(vec![
                    seed.to_string(),
                    r.j.to_string(),
                    num(r.gamma),
                    num(r.lhs),
                    num(r.rhs_factor),
                    num(r.ratio),
                    out.hash.clone(),
                ]);
            }
            Ok((rows, violations))
        })
        .collect();
    let mut rows = Vec::new();
    for m in members {
        let (r, v) = m?;
        rows.extend(r);
        summary.invariant_violations.extend(v);
    }
    let header = strings(["seed", "j", "gamma", "lhs", "rhs_factor", "ratio", "config_hash"]);
    out.write_csv(".csv", &header, &rows)
}

fn run_heat(cfg: &ExperimentConfig, out: &mut Outputs, summary: &mut RunSummary) -> Result<(), HarnessError> {
    let grid = cfg.grid()?;
    let range = default_range(&grid)?;
    let cutoff = make_cutoff();
    let seeds: Vec<u64> = cfg.member_seeds().collect();
    let members: Vec<Result<(Vec<Vec<String>>, Vec<String>), HarnessError>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rows = Vec::new();
            let mut violations = Vec::new();
            for j in range.iter() {
                let target = cfg.field.amplitude * 2f64.powf(-(j as f64) * cfg.field.profile_exponent);
                let f = random_divfree_field(&grid, &RandomFieldSpec::single_band(j, target, seed))?;
                check_divergence(&f, &format!("seed {seed} band {j}"), &mut violations);
                for &t in &cfg.heat_times {
                    let fit = band_decay_check(&f, &cutoff, &range, j, t)?;
                    if !(fit.observed_ratio <= 1.0 + 1e-12) {
                        violations.push(format!("seed {seed} band {j} t {t}: heat flow grew the band"));
                    }
                    rows.push(vec![
                        seed.to_string(),
                        j.to_string(),
                        num(t),
                        num(fit.observed_ratio),
                        num(fit.fitted_c),
                        out.hash.clone(),
                    ]);
                }
            }
            Ok((rows, violations))
        })
        .collect();
    let mut rows = Vec::new();
    for m in members {
        let (r, v) = m?;
        rows.extend(r);
        summary.invariant_violations.extend(v);
    }
    let header = strings(["seed", "j", "t", "observed_ratio", "fitted_c", "config_hash"]);
    out.write_csv(".csv", &header, &rows)
}

/// `(sin κx cos κy, −cos κx sin κy)`, which decays like `e^{−2κ²t}` under the
/// full equations at unit viscosity.
pub fn taylor_green(grid: &lpns::grid::Grid) -> lpns::Result<SpectralVectorField> {
    let kappa = 2.0 * std::f64::consts::PI / grid.period();
    let v = RealVectorField::from_fn(grid, |x| {
        let (sx, cx) = (kappa * x[0]).sin_cos();
        let (sy, cy) = (kappa * x[1]).sin_cos();
        vec![sx * cy, -cx * sy]
    })?;
    Ok(v.to_spectral())
}

fn trajectory_header(range: &BandIndexRange, with_level: bool) -> Vec<String> {
    let mut h = vec!["seed".to_string()];
    if with_level {
        h.push("level".into());
    }
    h.extend(strings([
        "t",
        "critical_norm",
        "gamma_norm",
        "sup_norm",
        "unresolved_sup",
    ]));
    h.extend(range.iter().map(|j| format!("band_{j}")));
    h.push("config_hash".into());
    h
}

fn trajectory_rows(rec: &TrajectoryRecord, seed: u64, level: Option<f64>, hash: &str) -> Vec<Vec<String>> {
    (0..rec.len())
        .map(|i| {
            let mut row = vec![seed.to_string()];
            if let Some(l) = level {
                row.push(num(l));
            }
            row.extend([
                num(rec.times[i]),
                num(rec.critical_norms[i]),
                num(rec.gamma_norms[i]),
                num(rec.sup_norms[i]),
                num(rec.unresolved_sup[i]),
            ]);
            row.extend(rec.per_band_sup[i].iter().map(|&x| num(x)));
            row.push(hash.to_string());
            row
        })
        .collect()
}

fn run_taylor_green(cfg: &ExperimentConfig, out: &mut Outputs, summary: &mut RunSummary) -> Result<(), HarnessError> {
    let grid = cfg.grid()?;
    let range = default_range(&grid)?;
    let sampler = NormSampler::new(make_cutoff(), range, cfg.gamma)?;
    let solver = cfg.solver_config();
    let v0 = taylor_green(&grid)?;
    let u0 = to_physical(&v0);
    let rate = 2.0 * (2.0 * std::f64::consts::PI / grid.period()).powi(2);
    let mut error_rows = Vec::new();
    let mut traj_rows = Vec::new();
    for seed in cfg.member_seeds() {
        let samples = RefCell::new(Vec::new());
        let result = simulate(&v0, &solver, &sampler, |s: &SolverState| {
            let u = to_physical(&s.v);
            let decay = (-rate * s.t).exp();
            let err = u
                .values()
                .iter()
                .zip(u0.values())
                .flat_map(|(a, b)| a.iter().zip(b).map(move |(x, y)| (x - decay * y).abs()))
                .fold(0.0, f64::max);
            samples
                .borrow_mut()
                .push((s.t, u.sup_norm(), decay * u0.sup_norm(), err));
        });
        let rec = match result {
            Ok(rec) => rec,
            Err(SimulationError::BlowUp { cause, partial }) => {
                summary.blow_ups += 1;
                eprintln!("seed {seed}: {cause}");
                partial
            }
            Err(SimulationError::Invalid(e)) => return Err(e.into()),
        };
        for (t, sup, analytic, err) in samples.into_inner() {
            error_rows.push(vec![
                seed.to_string(),
                num(t),
                num(sup),
                num(analytic),
                num(err),
                out.hash.clone(),
            ]);
        }
        traj_rows.extend(trajectory_rows(&rec, seed, None, &out.hash));
    }
    let header = strings(["seed", "t", "sup_norm", "analytic_sup", "sup_error", "config_hash"]);
    out.write_csv(".csv", &header, &error_rows)?;
    out.write_csv("_trajectory.csv", &trajectory_header(&range, false), &traj_rows)
}

/// One small-data or window run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub level: f64,
    pub terminated_early: bool,
    pub blow_up: Option<String>,
    pub report: Option<MonitorReport>,
    /// `(j, K_j)` from the per-band a-priori audit over the whole run.
    pub k_per_band: Vec<(i32, f64)>,
    pub max_k: f64,
    pub config_hash: String,
}

struct NseMember {
    report: RunReport,
    trajectory: Vec<Vec<String>>,
    violations: Vec<String>,
}

fn checkpoint_path(dir: &Path, stem: &str, level_index: usize, member_seed: u64, step: usize) -> PathBuf {
    dir.join("checkpoints").join(format!(
        "{stem}_member{member_seed}_level{level_index}_step{step:08}.lpns"
    ))
}

fn run_nse_member(
    cfg: &ExperimentConfig,
    range: &BandIndexRange,
    sampler: &NormSampler,
    stem: &str,
    hash: &str,
    (level_index, level, seed): (usize, f64, u64),
) -> Result<NseMember, HarnessError> {
    let base = initial_field(cfg, range, seed)?;
    let v0 = scale_to_critical_norm(&base, level)?;
    let mut violations = Vec::new();
    check_divergence(&v0, &format!("seed {seed} level {level}"), &mut violations);

    let solver = cfg.solver_config();
    let samples = RefCell::new(0usize);
    let failures = RefCell::new(Vec::<String>::new());
    let result = simulate(&v0, &solver, sampler, |s: &SolverState| {
        let residual = s.v.divergence_residual();
        if !(residual <= DIVERGENCE_TOLERANCE) {
            failures.borrow_mut().push(format!(
                "seed {seed} level {level} t {}: divergence residual {residual:e}",
                s.t
            ));
        }
        let k = *samples.borrow();
        *samples.borrow_mut() += 1;
        if cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0 {
            let path = checkpoint_path(&cfg.output_dir, stem, level_index, seed, s.step_count);
            let written = path
                .parent()
                .map(fs::create_dir_all)
                .transpose()
                .map_err(lpns::Error::from)
                .and_then(|_| checkpoint::save(&path, &to_physical(&s.v)));
            if let Err(e) = written {
                failures
                    .borrow_mut()
                    .push(format!("checkpoint {}: {e}", path.display()));
            }
        }
    });
    violations.extend(failures.into_inner());

    let (rec, blow_up) = match result {
        Ok(rec) => (rec, None),
        Err(SimulationError::BlowUp { cause, partial }) => (partial, Some(cause.to_string())),
        Err(SimulationError::Invalid(e)) => return Err(e.into()),
    };
    let report = if blow_up.is_none() {
        match check_theorem1(&rec, cfg.m0, cfg.window()) {
            Ok(r) => Some(r),
            Err(lpns::Error::Inconsistent(msg)) => {
                violations.push(format!("seed {seed} level {level}: {msg}"));
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let mut k_per_band = Vec::new();
    for j in range.iter() {
        k_per_band.push((j, duhamel_band_audit(&rec, j, cfg.decay_c)?));
    }
    let max_k = k_per_band.iter().map(|&(_, k)| k).fold(0.0, f64::max);
    Ok(NseMember {
        trajectory: trajectory_rows(&rec, seed, Some(level), hash),
        report: RunReport {
            seed,
            level,
            terminated_early: rec.terminated_early,
            blow_up,
            report,
            k_per_band,
            max_k,
            config_hash: hash.to_string(),
        },
        violations,
    })
}

fn run_nse(cfg: &ExperimentConfig, out: &mut Outputs, summary: &mut RunSummary) -> Result<(), HarnessError> {
    let grid = cfg.grid()?;
    let range = default_range(&grid)?;
    let sampler = NormSampler::new(make_cutoff(), range, cfg.gamma)?;
    // rows come out ordered by (seed, level, t)
    let jobs: Vec<(usize, f64, u64)> = cfg
        .member_seeds()
        .flat_map(|seed| {
            cfg.critical_norms
                .iter()
                .enumerate()
                .map(move |(i, &level)| (i, level, seed))
        })
        .collect();
    let stem = out.stem.clone();
    let hash = out.hash.clone();
    let members: Vec<Result<NseMember, HarnessError>> = jobs
        .par_iter()
        .map(|&job| run_nse_member(cfg, &range, &sampler, &stem, &hash, job))
        .collect();

    let mut trajectories = Vec::new();
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for m in members {
        let m = m?;
        let r = &m.report;
        if r.blow_up.is_some() {
            summary.blow_ups += 1;
        }
        let verdict = match (&r.blow_up, &r.report) {
            (Some(_), _) => "blow-up-suspected".to_string(),
            (None, Some(rep)) => serde_json::to_value(rep.verdict)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            (None, None) => "invariant-violation".to_string(),
        };
        let (c1, delta) = r
            .report
            .as_ref()
            .map(|rep| (rep.lemma2_c1, rep.lemma2_delta_used))
            .unwrap_or((f64::NAN, f64::NAN));
        rows.push(vec![
            r.seed.to_string(),
            num(r.level),
            r.terminated_early.to_string(),
            num(c1),
            num(delta),
            num(r.max_k),
            verdict,
            hash.clone(),
        ]);
        trajectories.extend(m.trajectory);
        summary.invariant_violations.extend(m.violations);
        reports.push(m.report);
    }
    out.write_csv("_trajectories.csv", &trajectory_header(&range, true), &trajectories)?;
    let header = strings([
        "seed",
        "level",
        "terminated_early",
        "lemma2_c1",
        "lemma2_delta_used",
        "max_k",
        "verdict",
        "config_hash",
    ]);
    out.write_csv("_summary.csv", &header, &rows)?;
    out.write_json("_reports.json", &reports)
}
