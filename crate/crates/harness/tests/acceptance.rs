//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Experiment outputs are kept under `$CARGO_TARGET_TMPDIR/acceptance` for inspection.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use lpns::littlewood_paley::OUTER_RADIUS;
use lpns::monitor::Sample;
use lpns::prelude::*;
use lpns::solver::SolverState;
use lpns_harness::config::{ExperimentConfig, ExperimentKind};
use lpns_harness::experiments::{run_experiment, RunSummary};
use lpns_harness::fit::fit_constants;
use lpns_harness::random::{default_range, random_divfree_field, RandomFieldSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn work_dir() -> PathBuf {
    let base = option_env!("CARGO_TARGET_TMPDIR")
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    base.join("acceptance")
}

fn run_in(kind: ExperimentKind, dir: &Path) -> Result<(ExperimentConfig, RunSummary), String> {
    let mut cfg = ExperimentConfig::preset(kind);
    cfg.output_dir = dir.to_path_buf();
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(|e| e.to_string())?;
    }
    let summary = run_experiment(&cfg).map_err(|e| e.to_string())?;
    Ok((cfg, summary))
}

fn pi2() -> f64 {
    2.0 * std::f64::consts::PI
}

fn criterion_1() -> Outcome {
    let c = make_cutoff();
    for i in 0..1000 {
        let r = 3.0 * i as f64 / 999.0;
        let p0 = c.phi0(r);
        if r <= 1.0 {
            ensure(p0 == 1.0, || format!("phi0({r}) = {p0}"))?;
        }
        if r >= OUTER_RADIUS {
            ensure(p0 == 0.0, || format!("phi0({r}) = {p0}"))?;
        }
        let p = c.phi(r);
        if r <= 0.5 || r >= OUTER_RADIUS {
            ensure(p == 0.0, || format!("phi({r}) = {p} outside its support"))?;
        }
    }
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for (d, n) in [(2, 64), (3, 64)] {
        let g = make_grid(d, n, pi2()).map_err(|e| e.to_string())?;
        let range = default_range(&g).map_err(|e| e.to_string())?;
        let limit = 2f64.powi(range.j_max - 1);
        let mut moduli: Vec<f64> = (1..g.len()).map(|f| g.modulus(f)).filter(|&m| m < limit).collect();
        moduli.sort_by(f64::total_cmp);
        moduli.dedup();
        for r in moduli {
            let s: f64 = range.iter().map(|j| c.phi(2f64.powi(-j) * r)).sum();
            worst = worst.max((s - 1.0).abs());
            checked += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("partition of unity off by {worst:e}"))?;
    Ok(format!(
        "1000 radii exact; {checked} lattice moduli, max |Σφ − 1| = {worst:e}"
    ))
}

fn criterion_2() -> Outcome {
    let mut pairs = 0;
    for (d, n) in [(2, 64), (3, 32)] {
        let g = make_grid(d, n, pi2()).map_err(|e| e.to_string())?;
        let range = default_range(&g).map_err(|e| e.to_string())?;
        let c = make_cutoff();
        // full spectrum so every band is populated
        let v = lpns::field::to_spectral(
            &RealVectorField::from_fn(&g, |x| {
                (0..d)
                    .map(|m| (0..d).map(|a| ((a + m + 1) as f64 * 7.3 * x[a]).sin().powi(3)).sum())
                    .collect()
            })
            .map_err(|e| e.to_string())?,
        );
        for j in range.iter() {
            let pj = project_band(&v, &c, &range, j).map_err(|e| e.to_string())?;
            ensure(pj.max_abs() > 0.0, || format!("band {j} empty in test field"))?;
            for k in range.iter().filter(|k| (k - j).abs() > 1) {
                let pk = project_band(&pj, &c, &range, k).map_err(|e| e.to_string())?;
                let nonzero = pk
                    .coeffs()
                    .iter()
                    .flatten()
                    .filter(|z| z.re != 0.0 || z.im != 0.0)
                    .count();
                ensure(nonzero == 0, || {
                    format!("d={d}: P_{k}P_{j} has {nonzero} nonzero coefficients")
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} band pairs exactly zero"))
}

fn criterion_3() -> Outcome {
    let g = make_grid(3, 32, pi2()).map_err(|e| e.to_string())?;
    let range = default_range(&g).map_err(|e| e.to_string())?;
    let c = make_cutoff();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let spec = RandomFieldSpec::profile(&range, 1.0, 0.5, 1000 + seed);
        let v = random_divfree_field(&g, &spec).map_err(|e| e.to_string())?;
        let split = bony_split(&v, &c, &range).map_err(|e| e.to_string())?;
        ensure(!split.truncated, || format!("seed {seed}: field not resolved"))?;
        let conv = convection(&v);
        let err = to_physical(&split.total().sub(&conv).unwrap()).sup_norm() / to_physical(&conv).sup_norm();
        worst = worst.max(err);
    }
    ensure(worst <= 1e-10, || format!("relative reconstruction error {worst:e}"))?;
    Ok(format!("50 fields, max relative sup error {worst:e}"))
}

fn criterion_4(dir: &Path) -> Outcome {
    let start = Instant::now();
    let (_, summary) = run_in(ExperimentKind::Lemma1Ensemble, dir)?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(summary.invariant_violations.is_empty(), || {
        format!("{:?}", summary.invariant_violations)
    })?;
    let csv: Vec<&PathBuf> = summary
        .files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    let fit = fit_constants(&csv).map_err(|e| e.to_string())?;
    let p = fit
        .product_estimate
        .ok_or("fit-constants reported no product-estimate constant")?;
    ensure(p.rows == 100 * p.per_band_max.len(), || format!("{} rows", p.rows))?;
    ensure(p.all_finite, || "non-finite ratio".into())?;
    ensure(p.global_constant.is_finite() && p.global_constant > 0.0, || {
        "no global constant".into()
    })?;
    ensure(p.spread < 10.0, || {
        format!("per-band maxima spread {:.3}× ({:?})", p.spread, p.per_band_max)
    })?;
    ensure(elapsed < 600.0, || format!("runtime {elapsed:.0}s"))?;
    Ok(format!(
        "C_emp = {:.4}, per-band spread {:.2}×, {:.0}s",
        p.global_constant, p.spread, elapsed
    ))
}

fn criterion_5(dir: &Path) -> Outcome {
    let (cfg, summary) = run_in(ExperimentKind::HeatDecay, dir)?;
    ensure(summary.invariant_violations.is_empty(), || {
        format!("{:?}", summary.invariant_violations)
    })?;
    let fit = fit_constants(&summary.files).map_err(|e| e.to_string())?;
    let h = fit.heat_decay.ok_or("no heat-decay rows")?;
    ensure(h.fitted_c.min >= 0.2 && h.fitted_c.max <= 1.4, || {
        format!("fitted_c in [{}, {}]", h.fitted_c.min, h.fitted_c.max)
    })?;
    let g = cfg.grid().map_err(|e| e.to_string())?;
    let range = default_range(&g).map_err(|e| e.to_string())?;
    let c = make_cutoff();
    let mut worst: f64 = 0.0;
    for j in range.iter() {
        // |ξ| = 2^j gives c = 1; |ξ| = 3·2^{j−2} gives c = 9/16
        let mut cases = vec![(1i64 << j, 1.0)];
        if j >= 2 {
            cases.push((3 << (j - 2), 9.0 / 16.0));
        }
        for (k, want) in cases {
            let f = SpectralVectorField::cosine(&g, &[0, k, 0], 0, 0.7).map_err(|e| e.to_string())?;
            for &t in &cfg.heat_times {
                let fit = band_decay_check(&f, &c, &range, j, t).map_err(|e| e.to_string())?;
                worst = worst.max((fit.fitted_c - want).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("pure-mode exponent off by {worst:e}"))?;
    Ok(format!(
        "{} rows, fitted_c ∈ [{:.4}, {:.4}]; pure modes within {worst:e}",
        h.rows, h.fitted_c.min, h.fitted_c.max
    ))
}

fn run_steps(v0: &SpectralVectorField, dt: f64, t_end: f64) -> SpectralVectorField {
    let cfg = SolverConfig {
        dt,
        t_end,
        ..Default::default()
    };
    let integrator = Integrator::new(v0.grid(), &cfg).unwrap();
    let mut s = SolverState::new(v0, cfg.dealias_fraction);
    for _ in 0..cfg.steps() {
        s = integrator.step(&s).unwrap();
    }
    s.v
}

fn criterion_6(dir: &Path) -> Outcome {
    let (_, summary) = run_in(ExperimentKind::TaylorGreen, dir)?;
    ensure(summary.exit_code() == 0, || {
        format!("exit code {}", summary.exit_code())
    })?;
    let csv = summary
        .files
        .iter()
        .find(|p| !p.to_string_lossy().contains("trajectory"))
        .unwrap();
    let mut reader = csv::Reader::from_path(csv).map_err(|e| e.to_string())?;
    let mut last = (0.0, f64::NAN);
    let mut max_err: f64 = 0.0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let t: f64 = rec[1].parse().unwrap();
        let err: f64 = rec[4].parse().unwrap();
        max_err = max_err.max(err);
        last = (t, err);
    }
    ensure(last.0 == 1.0, || format!("run ended at t = {}", last.0))?;
    ensure(max_err <= 1e-6, || format!("Taylor–Green sup error {max_err:e}"))?;

    // Taylor–Green is reproduced to round-off by the integrating factor, so the
    // order comes from self-convergence on a generic nonlinear 2D flow on the
    // same grid, with steps bracketing the oracle's dt. Coarser steps sit in
    // the pre-asymptotic regime |ξ|²dt ≳ 1 where the observed order drops.
    let g = make_grid(2, 64, pi2()).unwrap();
    let range = default_range(&g).unwrap();
    let spec = RandomFieldSpec::profile(&range, 1.0, 0.0, 77);
    let v0 = random_divfree_field(&g, &spec).unwrap();
    let runs: Vec<_> = [2e-3, 1e-3, 5e-4].iter().map(|&dt| run_steps(&v0, dt, 0.2)).collect();
    let e1 = to_physical(&runs[0].sub(&runs[1]).unwrap()).sup_norm();
    let e2 = to_physical(&runs[1].sub(&runs[2]).unwrap()).sup_norm();
    let order = (e1 / e2).log2();
    ensure(order >= 3.7, || format!("observed order {order:.3} ({e1:e}, {e2:e})"))?;
    Ok(format!("sup error {:e} at t = 1; observed order {order:.3}", last.1))
}

fn criterion_7(dir: &Path) -> Outcome {
    let (cfg, summary) = run_in(ExperimentKind::SmallDataNse, dir)?;
    ensure(
        cfg.grid.dim == 3 && cfg.ensemble_size == 10 && cfg.solver.t_end == 1.0,
        || "preset drifted".into(),
    )?;
    ensure(summary.blow_ups == 0, || {
        format!("{} blow-up terminations", summary.blow_ups)
    })?;
    ensure(summary.invariant_violations.is_empty(), || {
        format!("{:?}", summary.invariant_violations)
    })?;
    let fit = fit_constants(
        &summary
            .files
            .iter()
            .filter(|p| p.to_string_lossy().ends_with("_summary.csv"))
            .collect::<Vec<_>>(),
    )
    .map_err(|e| e.to_string())?;
    let mut by_level: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
    for (level, s) in &fit.small_data {
        let l: f64 = level.parse().unwrap();
        by_level.insert(l.to_bits(), (l, s.max_lemma2_c1, s.runs));
        ensure(s.max_k.is_finite(), || format!("level {level}: max K_j = {}", s.max_k))?;
        ensure(s.blow_ups == 0, || format!("level {level}: blow-ups"))?;
    }
    // largest data first
    let mut levels: Vec<(f64, f64, usize)> = by_level.into_values().collect();
    levels.sort_by(|a, b| b.0.total_cmp(&a.0));
    ensure(levels.len() == 3 && levels.iter().all(|l| l.2 == 10), || {
        format!("{levels:?}")
    })?;
    for w in levels.windows(2) {
        ensure(w[0].1.is_finite() && w[1].1 <= w[0].1, || {
            format!(
                "C1 bound {} at level {} exceeds {} at level {}",
                w[1].1, w[1].0, w[0].1, w[0].0
            )
        })?;
    }
    let max_k = fit.small_data.values().map(|s| s.max_k).fold(0.0, f64::max);
    let c1: Vec<String> = levels.iter().map(|l| format!("{:e}: {:.6}", l.0, l.1)).collect();
    Ok(format!(
        "30 runs, max C1 per level [{}], max K_j = {max_k:.4}",
        c1.join(", ")
    ))
}

fn synthetic_record(norms: &[(f64, f64)]) -> TrajectoryRecord {
    let range = BandIndexRange::new(0, 3).unwrap();
    let mut rec = TrajectoryRecord::new(1.5, range);
    for (i, &(c, g)) in norms.iter().enumerate() {
        rec.push(Sample {
            t: i as f64 * 0.05,
            band_sups: (0..4).map(|j| c * 2f64.powi(j)).collect(),
            critical_norm: c,
            gamma_norm: g,
            sup_norm: 2.0 * c,
            unresolved_sup: 0.0,
        });
    }
    rec
}

fn criterion_8() -> Outcome {
    let mut runner = TestRunner::new(RunnerConfig {
        cases: 1000,
        failure_persistence: None,
        ..RunnerConfig::default()
    });
    let strategy = (
        prop::collection::vec((0.0f64..1.0, 1e-6f64..10.0), 2..40),
        1e-4f64..1.0,
        1.0f64..1e3,
        0usize..40,
    );
    let cases = std::cell::Cell::new(0usize);
    let result = runner.run(&strategy, |(norms, m0, factor, cut)| {
        cases.set(cases.get() + 1);
        let rec = synthetic_record(&norms);
        let t_last = *rec.times.last().unwrap();
        let t0 = rec.times[cut.min(rec.len() - 1)];
        let window = (t0, t_last);
        let low = check_theorem1(&rec, m0, window).unwrap();
        let high = check_theorem1(&rec, m0 * factor, window).unwrap();
        let recorded = rec
            .times
            .iter()
            .zip(&rec.critical_norms)
            .filter(|(t, _)| **t >= t0 && **t <= t_last)
            .map(|(_, c)| *c)
            .fold(0.0, f64::max);
        prop_assert_eq!(low.sup_critical_norm, recorded);
        prop_assert_eq!(low.smallness_holds, recorded <= m0);
        prop_assert_eq!(low.verdict == Verdict::CriterionSatisfied, recorded <= m0);
        prop_assert_eq!(high.verdict == Verdict::CriterionSatisfied, recorded <= m0 * factor);
        prop_assert!(low.verdict != Verdict::CriterionSatisfied || high.verdict == Verdict::CriterionSatisfied);
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    let cases = cases.get();
    ensure(cases >= 1000, || format!("only {cases} cases ran"))?;
    Ok(format!("{cases} synthetic trajectories"))
}

fn data_files(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if p.is_file() && name != "metadata.json" {
            out.insert(name, fs::read(&p).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

fn criterion_9(base: &Path) -> Outcome {
    let mut compared = 0;
    for kind in ExperimentKind::ALL {
        let first = base.join(kind.name());
        // the criteria above already produced a first run for these kinds
        if !first.join("metadata.json").exists() {
            run_in(kind, &first)?;
        }
        let second = base.join(format!("{}-rerun", kind.name()));
        run_in(kind, &second)?;
        let (a, b) = (data_files(&first)?, data_files(&second)?);
        ensure(!a.is_empty() && a.keys().eq(b.keys()), || {
            format!("{kind}: file sets differ")
        })?;
        for (name, bytes) in &a {
            ensure(b[name] == *bytes, || format!("{kind}: {name} differs"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} data files byte-identical across reruns"))
}

fn main() -> ExitCode {
    let base = work_dir();
    fs::create_dir_all(&base).expect("acceptance work dir");
    let dir = |k: ExperimentKind| base.join(k.name());
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "cutoff contract", Box::new(criterion_1)),
        (2, "almost-orthogonality", Box::new(criterion_2)),
        (3, "Bony reconstruction", Box::new(criterion_3)),
        (
            4,
            "product estimate ensemble",
            Box::new(move || criterion_4(&dir(ExperimentKind::Lemma1Ensemble))),
        ),
        (
            5,
            "heat band decay",
            Box::new(move || criterion_5(&dir(ExperimentKind::HeatDecay))),
        ),
        (
            6,
            "solver oracle",
            Box::new(move || criterion_6(&dir(ExperimentKind::TaylorGreen))),
        ),
        (
            7,
            "small-data regime",
            Box::new(move || criterion_7(&dir(ExperimentKind::SmallDataNse))),
        ),
        (8, "threshold logic", Box::new(criterion_8)),
        (
            9,
            "determinism",
            Box::new({
                let base = base.clone();
                move || criterion_9(&base)
            }),
        ),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, check) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check())).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name} ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL {name} ({detail}) [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
