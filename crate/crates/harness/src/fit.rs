//! Empirical constants from experiment CSV files.
//!
//! The file type is recognised from its header: product-estimate ensembles
//! (`ratio`), heat-decay fits (`fitted_c`) and small-data summaries
//! (`lemma2_c1`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::HarnessError;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RatioFit {
    pub rows: usize,
    /// Largest ratio over every seed and band.
    pub global_constant: f64,
    /// Largest ratio per band.
    pub per_band_max: BTreeMap<i32, f64>,
    /// Largest over smallest positive per-band maximum.
    pub spread: f64,
    pub all_finite: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn empty() -> Self {
        Range {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn include(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFitSummary {
    pub rows: usize,
    pub fitted_c: Range,
    pub per_band: BTreeMap<i32, Range>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LevelSummary {
    pub runs: usize,
    pub blow_ups: usize,
    /// Largest growth constant of the subcritical norm.
    pub max_lemma2_c1: f64,
    pub max_k: f64,
    pub verdicts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FitReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_estimate: Option<RatioFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heat_decay: Option<DecayFitSummary>,
    /// Keyed by the level as written in the CSV.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub small_data: BTreeMap<String, LevelSummary>,
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn need(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize, HarnessError> {
    column(headers, name).ok_or_else(|| HarnessError::Config(format!("{}: missing column `{name}`", path.display())))
}

fn parse<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T, HarnessError> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("{}: cannot parse `{raw}`", path.display())))
}

fn absorb(report: &mut FitReport, path: &Path) -> Result<(), HarnessError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    if column(&headers, "ratio").is_some() {
        let (j, ratio) = (need(&headers, "j", path)?, need(&headers, "ratio", path)?);
        let fit = report.product_estimate.get_or_insert_with(|| RatioFit {
            all_finite: true,
            ..Default::default()
        });
        for rec in reader.records() {
            let rec = rec?;
            let band: i32 = parse(&rec, j, path)?;
            let r: f64 = parse(&rec, ratio, path)?;
            fit.rows += 1;
            fit.all_finite &= r.is_finite();
            fit.global_constant = fit.global_constant.max(r);
            let slot = fit.per_band_max.entry(band).or_insert(0.0);
            *slot = slot.max(r);
        }
    } else if column(&headers, "fitted_c").is_some() {
        let (j, c) = (need(&headers, "j", path)?, need(&headers, "fitted_c", path)?);
        let fit = report.heat_decay.get_or_insert_with(|| DecayFitSummary {
            rows: 0,
            fitted_c: Range::empty(),
            per_band: BTreeMap::new(),
        });
        for rec in reader.records() {
            let rec = rec?;
            let band: i32 = parse(&rec, j, path)?;
            let value: f64 = parse(&rec, c, path)?;
            fit.rows += 1;
            fit.fitted_c.include(value);
            fit.per_band.entry(band).or_insert_with(Range::empty).include(value);
        }
    } else if column(&headers, "lemma2_c1").is_some() {
        let level = need(&headers, "level", path)?;
        let c1 = need(&headers, "lemma2_c1", path)?;
        let k = need(&headers, "max_k", path)?;
        let verdict = need(&headers, "verdict", path)?;
        for rec in reader.records() {
            let rec = rec?;
            let key = rec.get(level).unwrap_or("").trim().to_string();
            let s = report.small_data.entry(key).or_default();
            let c1: f64 = parse(&rec, c1, path)?;
            let k: f64 = parse(&rec, k, path)?;
            let v = rec.get(verdict).unwrap_or("").to_string();
            s.runs += 1;
            if v == "blow-up-suspected" {
                s.blow_ups += 1;
            }
            // NaN marks a run without a report; f64::max skips it
            s.max_lemma2_c1 = s.max_lemma2_c1.max(c1);
            s.max_k = s.max_k.max(k);
            *s.verdicts.entry(v).or_insert(0) += 1;
        }
    } else {
        return Err(HarnessError::Config(format!(
            "{}: unrecognised header {:?}",
            path.display(),
            headers.iter().collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// Aggregates every CSV in `paths` into one report.
pub fn fit_constants<P: AsRef<Path>>(paths: &[P]) -> Result<FitReport, HarnessError> {
    if paths.is_empty() {
        return Err(HarnessError::Config("fit-constants needs at least one CSV".into()));
    }
    let mut report = FitReport::default();
    for p in paths {
        absorb(&mut report, p.as_ref())?;
    }
    if let Some(fit) = report.product_estimate.as_mut() {
        let positive: Vec<f64> = fit.per_band_max.values().copied().filter(|&x| x > 0.0).collect();
        let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = positive.iter().copied().fold(0.0, f64::max);
        fit.spread = if positive.is_empty() { 1.0 } else { hi / lo };
    }
    Ok(report)
}
