//! Critical and subcritical Besov norms along a trajectory, the a-priori
//! bound audit, and the smallness criterion check.
//!
//! The criterion is evaluated on recorded samples only, so the supremum over
//! a window is approximated from below. A satisfied verdict means the
//! hypotheses hold on the sampled window; it says nothing about what happens
//! after the window.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{to_physical, SpectralVectorField};
use crate::littlewood_paley::{
    band_sup_norms, band_unchecked, besov_from_band_sups, besov_norm, BandIndexRange, CutoffProfile,
};

/// Default subcritical index.
pub const DEFAULT_GAMMA: f64 = 1.5;

/// Largest tolerated ratio of content outside the resolvable bands to the
/// full sup norm before a verdict is marked inconclusive.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;

/// `‖v‖_{Ḃ^{-1}_{∞,∞}}` truncated to `range`.
pub fn critical_norm(v: &SpectralVectorField, cutoff: &CutoffProfile, range: &BandIndexRange) -> Result<f64> {
    besov_norm(v, cutoff, -1.0, range)
}

/// Norms of one sampled state.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub band_sups: Vec<f64>,
    pub critical_norm: f64,
    pub gamma_norm: f64,
    pub sup_norm: f64,
    /// Sup norm of `v − Σ_{j ∈ range} P_j v`.
    pub unresolved_sup: f64,
}

/// Computes [`Sample`]s for a fixed cutoff, band range and `γ`.
#[derive(Clone, Debug)]
pub struct NormSampler {
    cutoff: CutoffProfile,
    range: BandIndexRange,
    gamma: f64,
}

impl NormSampler {
    pub fn new(cutoff: CutoffProfile, range: BandIndexRange, gamma: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} must exceed 1")));
        }
        Ok(Self { cutoff, range, gamma })
    }

    pub fn range(&self) -> &BandIndexRange {
        &self.range
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cutoff(&self) -> &CutoffProfile {
        &self.cutoff
    }

    pub fn sample(&self, t: f64, v: &SpectralVectorField) -> Sample {
        let band_sups = band_sup_norms(v, &self.cutoff, &self.range);
        let mut resolved = SpectralVectorField::zeros(v.grid());
        for j in self.range.iter() {
            resolved
                .add_assign(&band_unchecked(v, &self.cutoff, j))
                .expect("same grid");
        }
        let unresolved_sup = to_physical(&v.sub(&resolved).expect("same grid")).sup_norm();
        Sample {
            t,
            critical_norm: besov_from_band_sups(&band_sups, &self.range, -1.0),
            gamma_norm: besov_from_band_sups(&band_sups, &self.range, self.gamma),
            sup_norm: to_physical(v).sup_norm(),
            unresolved_sup,
            band_sups,
        }
    }
}

/// Time series of norms along one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub gamma: f64,
    pub range: BandIndexRange,
    pub times: Vec<f64>,
    pub critical_norms: Vec<f64>,
    pub gamma_norms: Vec<f64>,
    /// `per_band_sup[sample][j − j_min] = ‖P_j v(t)‖_∞`.
    pub per_band_sup: Vec<Vec<f64>>,
    pub sup_norms: Vec<f64>,
    pub unresolved_sup: Vec<f64>,
    pub terminated_early: bool,
}

impl TrajectoryRecord {
    pub fn new(gamma: f64, range: BandIndexRange) -> Self {
        Self {
            gamma,
            range,
            times: Vec::new(),
            critical_norms: Vec::new(),
            gamma_norms: Vec::new(),
            per_band_sup: Vec::new(),
            sup_norms: Vec::new(),
            unresolved_sup: Vec::new(),
            terminated_early: false,
        }
    }

    /// Appends a sample. Panics if `t` does not increase.
    pub fn push(&mut self, s: Sample) {
        if let Some(&last) = self.times.last() {
            assert!(s.t > last, "sample times must increase ({} after {last})", s.t);
        }
        assert_eq!(s.band_sups.len(), self.range.len());
        self.times.push(s.t);
        self.critical_norms.push(s.critical_norm);
        self.gamma_norms.push(s.gamma_norm);
        self.per_band_sup.push(s.band_sups);
        self.sup_norms.push(s.sup_norm);
        self.unresolved_sup.push(s.unresolved_sup);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Recorded `‖P_j v‖_∞` series for band `j`.
    pub fn band_series(&self, j: i32) -> Result<Vec<f64>> {
        if !self.range.contains(j) {
            return Err(Error::UnresolvableBand {
                j,
                j_min: self.range.j_min,
                j_max: self.range.j_max,
            });
        }
        let col = (j - self.range.j_min) as usize;
        Ok(self.per_band_sup.iter().map(|row| row[col]).collect())
    }

    /// The samples with `t_start ≤ t ≤ t_end`.
    pub fn window(&self, t_start: f64, t_end: f64) -> Result<TrajectoryRecord> {
        if self.is_empty() || !(t_start <= t_end) {
            return Err(Error::EmptyWindow(t_start, t_end));
        }
        let slack = 1e-12 * (1.0 + t_end.abs());
        let first = self.times[0];
        let last = *self.times.last().unwrap();
        if t_start < first - slack || t_end > last + slack {
            return Err(Error::InvalidParameter(format!(
                "window [{t_start}, {t_end}] not inside recorded span [{first}, {last}]"
            )));
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.times[i] >= t_start - slack && self.times[i] <= t_end + slack)
            .collect();
        if keep.is_empty() {
            return Err(Error::EmptyWindow(t_start, t_end));
        }
        let pick = |v: &Vec<f64>| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        Ok(TrajectoryRecord {
            gamma: self.gamma,
            range: self.range,
            times: pick(&self.times),
            critical_norms: pick(&self.critical_norms),
            gamma_norms: pick(&self.gamma_norms),
            per_band_sup: keep.iter().map(|&i| self.per_band_sup[i].clone()).collect(),
            sup_norms: pick(&self.sup_norms),
            unresolved_sup: pick(&self.unresolved_sup),
            terminated_early: self.terminated_early,
        })
    }

    /// CSV with columns `t, critical_norm, gamma_norm, band_<j>` for `j_min..=j_max`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t,critical_norm,gamma_norm")?;
        for j in self.range.iter() {
            write!(w, ",band_{j}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(
                w,
                "{},{},{}",
                self.times[i], self.critical_norms[i], self.gamma_norms[i]
            )?;
            for x in &self.per_band_sup[i] {
                write!(w, ",{x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    fn max_unresolved_fraction(&self) -> f64 {
        self.unresolved_sup
            .iter()
            .zip(&self.sup_norms)
            .map(|(&u, &s)| if s > 0.0 { u / s } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CriterionSatisfied,
    CriterionViolated,
    InconclusiveTruncation,
}

/// Result of the a-priori bound audit on a record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Audit {
    /// `max_t ‖v(t)‖_{Ḃ^γ} / ‖v(t_0)‖_{Ḃ^γ}`
    pub lemma2_c1: f64,
    /// `sup_t ‖v(t)‖_{Ḃ^{-1}}`
    pub lemma2_delta_used: f64,
    pub passes: bool,
}

/// Fits the growth constant of the subcritical norm relative to the first sample.
///
/// An identically zero record gets `lemma2_c1 = 1`.
pub fn lemma2_audit(rec: &TrajectoryRecord) -> Result<Lemma2Audit> {
    if rec.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    let g0 = rec.gamma_norms[0];
    let g_max = rec.gamma_norms.iter().copied().fold(0.0, f64::max);
    let lemma2_c1 = if g0 > 0.0 {
        g_max / g0
    } else if g_max == 0.0 {
        1.0
    } else {
        return Err(Error::Inconsistent(format!(
            "subcritical norm vanishes initially but reaches {g_max}"
        )));
    };
    let lemma2_delta_used = rec.critical_norms.iter().copied().fold(0.0, f64::max);
    Ok(Lemma2Audit {
        lemma2_c1,
        lemma2_delta_used,
        passes: lemma2_c1.is_finite(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub m0: f64,
    pub smallness_holds: bool,
    pub window: (f64, f64),
    /// Largest sampled critical norm in the window.
    pub sup_critical_norm: f64,
    pub lemma2_c1: f64,
    pub lemma2_delta_used: f64,
    /// Largest unresolved-to-total sup ratio in the window.
    pub unresolved_fraction: f64,
    pub verdict: Verdict,
}

/// Checks `sup_{t ∈ window} ‖v(t)‖_{Ḃ^{-1}} ≤ m0` on the samples inside `window`,
/// auditing the subcritical bound with the window start as initial time.
pub fn check_theorem1(rec: &TrajectoryRecord, m0: f64, window: (f64, f64)) -> Result<MonitorReport> {
    if !(m0 > 0.0) {
        return Err(Error::InvalidParameter(format!("m0 = {m0} must be positive")));
    }
    let sub = rec.window(window.0, window.1)?;
    let audit = lemma2_audit(&sub)?;
    let sup_critical_norm = audit.lemma2_delta_used;
    let smallness_holds = sup_critical_norm <= m0;
    let unresolved_fraction = sub.max_unresolved_fraction();
    let verdict = if unresolved_fraction > TRUNCATION_TOLERANCE {
        Verdict::InconclusiveTruncation
    } else if smallness_holds && audit.passes {
        Verdict::CriterionSatisfied
    } else {
        Verdict::CriterionViolated
    };
    Ok(MonitorReport {
        m0,
        smallness_holds,
        window,
        sup_critical_norm,
        lemma2_c1: audit.lemma2_c1,
        lemma2_delta_used: audit.lemma2_delta_used,
        unresolved_fraction,
        verdict,
    })
}

/// Smallest `K_j` with
/// `‖v_j(t)‖_∞ ≤ K_j [e^{−c4^j τ}‖v_j(t_0)‖_∞ + (1 − e^{−c4^j τ}) 2^{−jγ} sup_{s≤t}‖v(s)‖_{Ḃ^{-1}} max_{s≤t}‖v(s)‖_{Ḃ^γ}]`
/// over all samples, `τ = t − t_0`. Samples with both sides zero are skipped;
/// a positive left side over a zero right side makes `K_j` infinite.
pub fn duhamel_band_audit(rec: &TrajectoryRecord, j: i32, c_const: f64) -> Result<f64> {
    if !(c_const > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decay constant {c_const} must be positive"
        )));
    }
    let series = rec.band_series(j)?;
    if series.is_empty() {
        return Ok(0.0);
    }
    let t0 = rec.times[0];
    let rate = c_const * 4f64.powi(j);
    let weight = 2f64.powf(-(j as f64) * rec.gamma);
    let mut crit_sup = 0.0f64;
    let mut gamma_max = 0.0f64;
    let mut k = 0.0f64;
    for i in 0..rec.len() {
        crit_sup = crit_sup.max(rec.critical_norms[i]);
        gamma_max = gamma_max.max(rec.gamma_norms[i]);
        let decay = (-rate * (rec.times[i] - t0)).exp();
        let bound = decay * series[0] + (1.0 - decay) * weight * crit_sup * gamma_max;
        let lhs = series[i];
        if lhs == 0.0 {
            continue;
        }
        k = k.max(if bound > 0.0 { lhs / bound } else { f64::INFINITY });
    }
    Ok(k)
}
