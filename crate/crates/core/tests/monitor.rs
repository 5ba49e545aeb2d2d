mod common;

use common::range;
use lpns::monitor::Sample;
use lpns::prelude::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn heat_record(v0: &SpectralVectorField, record_every: usize) -> TrajectoryRecord {
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.4,
        record_every,
        nonlinear: false,
        ..Default::default()
    };
    let sampler = NormSampler::new(make_cutoff(), range(v0.grid()), 1.5).unwrap();
    simulate(v0, &cfg, &sampler, |_| {}).unwrap()
}

/// One exact cosine per band, along alternating axes.
fn one_mode_per_band(g: &Grid, amps: &[f64]) -> SpectralVectorField {
    let r = range(g);
    let mut v = SpectralVectorField::zeros(g);
    for (j, &a) in r.iter().zip(amps) {
        let k = 1i64 << j;
        let (wave, comp) = if j % 2 == 0 { ([0, k, 0], 0) } else { ([k, 0, 0], 1) };
        v.add_assign(&SpectralVectorField::cosine(g, &wave[..g.dim()], comp, a).unwrap())
            .unwrap();
    }
    v
}

#[test]
fn heat_flow_never_grows_the_subcritical_norm() {
    let g = make_grid(3, 32, 2.0 * PI).unwrap();
    let v0 = one_mode_per_band(&g, &[0.3, 1.0, 0.2, 0.7]);
    let rec = heat_record(&v0, 1);
    let audit = lemma2_audit(&rec).unwrap();
    assert!(audit.lemma2_c1 <= 1.0 + 1e-10, "{}", audit.lemma2_c1);
    assert!(audit.passes);
}

#[test]
fn growth_constant_is_scale_invariant_for_the_heat_flow() {
    let g = make_grid(3, 16, 2.0 * PI).unwrap();
    let v0 = common::random_solenoidal(&g, 4, 0.0, 8.0);
    let a = lemma2_audit(&heat_record(&v0, 2)).unwrap().lemma2_c1;
    let b = lemma2_audit(&heat_record(&v0.scale(1e-3), 2)).unwrap().lemma2_c1;
    assert!((a - b).abs() <= 1e-12 * a);
}

#[test]
fn band_constants_grow_under_refinement_when_sups_are_shared() {
    // heat-only norms peak at t = 0, a sample common to both records
    let g = make_grid(3, 16, 2.0 * PI).unwrap();
    let v0 = common::random_solenoidal(&g, 6, 0.0, 8.0);
    let fine = heat_record(&v0, 1);
    let coarse = heat_record(&v0, 4);
    for j in fine.range.iter() {
        let kf = duhamel_band_audit(&fine, j, 0.2).unwrap();
        let kc = duhamel_band_audit(&coarse, j, 0.2).unwrap();
        assert!(kf.is_finite());
        assert!(kf >= kc, "band {j}: {kf} < {kc}");
    }
}

fn synthetic(crit: &[f64], gam: &[f64]) -> TrajectoryRecord {
    let r = BandIndexRange::new(0, 2).unwrap();
    let mut rec = TrajectoryRecord::new(1.5, r);
    for (i, (&c, &g)) in crit.iter().zip(gam).enumerate() {
        rec.push(Sample {
            t: i as f64 * 0.1,
            band_sups: vec![c, c * 0.5, c * 0.25],
            critical_norm: c,
            gamma_norm: g,
            sup_norm: c,
            unresolved_sup: 0.0,
        });
    }
    rec
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn smallness_verdict_is_monotone_in_the_threshold(
        norms in prop::collection::vec((1e-6f64..1.0, 1e-6f64..10.0), 2..20),
        m0 in 1e-4f64..1.0,
        factor in 1.0f64..100.0,
    ) {
        let crit: Vec<f64> = norms.iter().map(|p| p.0).collect();
        let gam: Vec<f64> = norms.iter().map(|p| p.1).collect();
        let rec = synthetic(&crit, &gam);
        let window = (0.0, *rec.times.last().unwrap());
        let low = check_theorem1(&rec, m0, window).unwrap();
        let high = check_theorem1(&rec, m0 * factor, window).unwrap();
        prop_assert!(!low.smallness_holds || high.smallness_holds);
        if low.verdict == Verdict::CriterionSatisfied {
            prop_assert_eq!(high.verdict, Verdict::CriterionSatisfied);
        }
        prop_assert_eq!(low.smallness_holds, low.sup_critical_norm <= m0);
        prop_assert_eq!(low.verdict == Verdict::CriterionSatisfied, low.smallness_holds);
    }
}

#[test]
fn heat_flow_band_constants_stay_below_one() {
    let g = make_grid(3, 32, 2.0 * PI).unwrap();
    let rec = heat_record(&one_mode_per_band(&g, &[0.3, 1.0, 0.2, 0.7]), 1);
    for j in rec.range.iter() {
        let k = duhamel_band_audit(&rec, j, 0.2).unwrap();
        assert!(k <= 1.0 + 1e-6, "band {j}: {k}");
    }
}

#[test]
fn taylor_green_growth_constant_is_one() {
    let g = make_grid(2, 32, 2.0 * PI).unwrap();
    let v0 = RealVectorField::from_fn(&g, |x| vec![x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin()])
        .unwrap()
        .to_spectral();
    let cfg = SolverConfig {
        dt: 0.01,
        t_end: 0.5,
        record_every: 5,
        ..Default::default()
    };
    let sampler = NormSampler::new(make_cutoff(), range(&g), 1.5).unwrap();
    let rec = simulate(&v0, &cfg, &sampler, |_| {}).unwrap();
    assert_eq!(lemma2_audit(&rec).unwrap().lemma2_c1, 1.0);
}

#[test]
fn zero_solution_is_trivially_small() {
    let g = make_grid(2, 16, 2.0 * PI).unwrap();
    let rec = heat_record(&SpectralVectorField::zeros(&g), 5);
    let report = check_theorem1(&rec, 1e-9, (0.0, 0.4)).unwrap();
    assert_eq!(report.verdict, Verdict::CriterionSatisfied);
    assert_eq!(report.lemma2_c1, 1.0);
    for j in rec.range.iter() {
        assert_eq!(duhamel_band_audit(&rec, j, 0.2).unwrap(), 0.0);
    }
}
