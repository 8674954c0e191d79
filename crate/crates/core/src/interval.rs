//! Individual and joint confidence intervals, and the end-to-end `analyze`
//! pipeline: moments, estimates, influence vectors, covariance (optionally
//! blurred), correlation, equicoordinate quantile, intervals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::covariance::{correct, correlation, covariance_matrix, influence, CovarianceEstimate};
use crate::error::{Error, Result};
use crate::measure::{Catalog, MeasureSpec};
use crate::moments::{compute_moments, BinaryDataset, EvaluationTarget};
use crate::quantile::{inv_norm_cdf, max_abs_quantile, QuantileRequest, DEFAULT_DRAWS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Individual,
    Joint,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Individual => "individual",
            Mode::Joint => "joint",
        })
    }
}

/// Which variance estimate backs the intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Choice {
    /// Plain delta-method estimate.
    #[serde(rename = "I")]
    Uncorrected,
    /// Estimate plus the blurring diagonal.
    #[serde(rename = "II")]
    Blurred,
}

impl Choice {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Choice::Uncorrected),
            2 => Some(Choice::Blurred),
            _ => None,
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Choice::Uncorrected => "I",
            Choice::Blurred => "II",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub alpha: f64,
    pub mode: Mode,
    pub choice: Choice,
    /// Positions in the analyzed target list.
    pub target_set: Vec<usize>,
    pub draws: usize,
    pub seed: u64,
    /// Clip interval ends to the measure's natural range.
    pub clamp: bool,
}

impl IntervalSpec {
    pub fn new(alpha: f64, mode: Mode, choice: Choice, target_set: Vec<usize>) -> Self {
        Self {
            alpha,
            mode,
            choice,
            target_set,
            draws: DEFAULT_DRAWS,
            seed: 0,
            clamp: false,
        }
    }

    pub fn quantile_knobs(mut self, draws: usize, seed: u64) -> Self {
        self.draws = draws;
        self.seed = seed;
        self
    }

    pub fn clamped(mut self, clamp: bool) -> Self {
        self.clamp = clamp;
        self
    }

    fn validate(&self, num_targets: usize) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} is outside (0, 1)",
                self.alpha
            )));
        }
        if self.target_set.is_empty() {
            return Err(Error::InvalidArgument("target set is empty".into()));
        }
        let mut seen = vec![false; num_targets];
        for &k in &self.target_set {
            if k >= num_targets {
                return Err(Error::InvalidArgument(format!(
                    "target index {k} out of range for {num_targets} targets"
                )));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidArgument(format!(
                    "target index {k} appears twice in the target set"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub n: usize,
    pub alpha: f64,
    pub choice: Choice,
    pub mode: Mode,
    pub q: f64,
    pub mc_stderr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetInterval {
    pub rule: String,
    pub measure: String,
    pub estimate: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TargetInterval {
    fn failed(target: &EvaluationTarget, estimate: Option<f64>, err: &Error) -> Self {
        Self {
            rule: target.rule.clone(),
            measure: target.measure.clone(),
            estimate,
            lower: None,
            upper: None,
            half_width: None,
            error: Some(err.to_string()),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        match (self.lower, self.upper) {
            (Some(lo), Some(hi)) => lo <= value && value <= hi,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub meta: ReportMeta,
    pub targets: Vec<TargetInterval>,
}

impl IntervalReport {
    pub fn failures(&self) -> usize {
        self.targets.iter().filter(|t| t.error.is_some()).count()
    }
}

/// `estimate -/+ Phi^-1(1 - alpha/2) sqrt(v_kk / n)`.
pub fn individual_ci(estimate: f64, v_kk: f64, n: usize, alpha: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    if !(v_kk > 0.0) {
        return Err(Error::SingularVariance(0));
    }
    let half = inv_norm_cdf(1.0 - alpha / 2.0)? * (v_kk / n as f64).sqrt();
    Ok((estimate - half, estimate + half))
}

/// Critical value shared by every target in `cov`: the scalar normal
/// quantile for individual intervals, `q(alpha, R)` for joint ones.
fn critical_value(cov: &CovarianceEstimate, spec: &IntervalSpec) -> Result<(f64, f64)> {
    match spec.mode {
        Mode::Individual => Ok((inv_norm_cdf(1.0 - spec.alpha / 2.0)?, 0.0)),
        Mode::Joint => {
            let r = correlation(cov)?;
            let req = QuantileRequest::new(spec.alpha, r)
                .draws(spec.draws)
                .seed(spec.seed);
            let res = max_abs_quantile(&req)?;
            Ok((res.q, res.mc_stderr))
        }
    }
}

fn clamp_to(measure: Option<&MeasureSpec>, lo: f64, hi: f64) -> (f64, f64) {
    match measure.and_then(MeasureSpec::natural_range) {
        Some((min, max)) => (lo.max(min), hi.min(max)),
        None => (lo, hi),
    }
}

/// Intervals for `spec.target_set`, all sharing one critical value.
///
/// `estimates` and `cov` are indexed by analyzed-target position; `cov` must
/// be corrected exactly when `spec.choice` is [`Choice::Blurred`].
pub fn joint_cis(
    estimates: &[f64],
    cov: &CovarianceEstimate,
    spec: &IntervalSpec,
) -> Result<IntervalReport> {
    intervals(estimates, cov, spec, &[])
}

fn intervals(
    estimates: &[f64],
    cov: &CovarianceEstimate,
    spec: &IntervalSpec,
    measures: &[Option<MeasureSpec>],
) -> Result<IntervalReport> {
    spec.validate(cov.dim())?;
    if estimates.len() != cov.dim() {
        return Err(Error::DimensionMismatch {
            expected: cov.dim(),
            found: estimates.len(),
        });
    }
    if cov.corrected != (spec.choice == Choice::Blurred) {
        return Err(Error::InvalidArgument(format!(
            "covariance estimate does not match choice {}",
            spec.choice
        )));
    }
    if let Some(&k) = spec.target_set.iter().find(|&&k| !(cov.variance(k) > 0.0)) {
        return Err(Error::SingularVariance(k));
    }
    let sub = cov.restrict(&spec.target_set)?;
    let (q, mc_stderr) = critical_value(&sub, spec)?;
    let n = cov.n as f64;
    let targets = spec
        .target_set
        .iter()
        .map(|&k| {
            let half = q * (cov.variance(k) / n).sqrt();
            let est = estimates[k];
            let (mut lo, mut hi) = (est - half, est + half);
            if spec.clamp {
                (lo, hi) = clamp_to(measures.get(k).and_then(Option::as_ref), lo, hi);
            }
            TargetInterval {
                rule: cov.targets[k].rule.clone(),
                measure: cov.targets[k].measure.clone(),
                estimate: Some(est),
                lower: Some(lo),
                upper: Some(hi),
                half_width: Some(half),
                error: None,
            }
        })
        .collect();
    Ok(IntervalReport {
        meta: ReportMeta {
            n: cov.n,
            alpha: spec.alpha,
            choice: spec.choice,
            mode: spec.mode,
            q,
            mc_stderr,
            seed: spec.seed,
        },
        targets,
    })
}

/// Full pipeline for the targets in `spec.target_set`.
///
/// A target whose measure is undefined at its sample moments, or whose
/// variance estimate is zero, is reported with an inline error and left out
/// of the correlation matrix; the call itself fails only when every
/// requested target fails.
pub fn analyze(
    data: &BinaryDataset,
    targets: &[EvaluationTarget],
    spec: &IntervalSpec,
    catalog: &Catalog,
) -> Result<IntervalReport> {
    spec.validate(targets.len())?;

    let mut failures: Vec<(usize, Option<f64>, Error)> = Vec::new();
    let mut ok = Vec::new();
    let mut ok_measures = Vec::new();
    for &k in &spec.target_set {
        let target = &targets[k];
        let measure = match catalog.get(&target.measure) {
            Ok(m) => m,
            Err(e) => {
                failures.push((k, None, e));
                continue;
            }
        };
        match influence(data, target, &measure) {
            Ok(h) => {
                ok.push((k, h));
                ok_measures.push(measure);
            }
            Err(e) => {
                let estimate = compute_moments(data, &target.rule)
                    .ok()
                    .and_then(|m| measure.evaluate(&m).ok());
                failures.push((k, estimate, e));
            }
        }
    }

    let mut report_targets: Vec<(usize, TargetInterval)> = failures
        .iter()
        .map(|(k, est, e)| (*k, TargetInterval::failed(&targets[*k], *est, e)))
        .collect();

    let mut meta = None;
    if !ok.is_empty() {
        let hs: Vec<_> = ok.iter().map(|(_, h)| h.clone()).collect();
        let mut cov = covariance_matrix(&hs)?;
        if spec.choice == Choice::Blurred {
            cov = correct(&cov, spec.alpha)?;
        }
        let mut usable = Vec::new();
        for (pos, (k, h)) in ok.iter().enumerate() {
            if cov.variance(pos) > 0.0 {
                usable.push(pos);
                continue;
            }
            let err = if spec.choice == Choice::Blurred && h.gradient.is_zero() {
                Error::ZeroGradient(*k)
            } else {
                Error::SingularVariance(*k)
            };
            report_targets.push((
                *k,
                TargetInterval::failed(&targets[*k], Some(h.estimate), &err),
            ));
            failures.push((*k, Some(h.estimate), err));
        }
        if !usable.is_empty() {
            let estimates: Vec<f64> = ok.iter().map(|(_, h)| h.estimate).collect();
            let measures: Vec<Option<MeasureSpec>> =
                ok_measures.iter().cloned().map(Some).collect();
            let sub_spec = IntervalSpec {
                target_set: usable.clone(),
                ..spec.clone()
            };
            let report = intervals(&estimates, &cov, &sub_spec, &measures)?;
            for (pos, interval) in usable.iter().zip(report.targets) {
                report_targets.push((ok[*pos].0, interval));
            }
            meta = Some(report.meta);
        }
    }

    let Some(meta) = meta else {
        return Err(Error::AllTargetsFailed(
            failures.into_iter().map(|(k, _, e)| (k, e)).collect(),
        ));
    };
    let order = |k: usize| {
        spec.target_set
            .iter()
            .position(|&s| s == k)
            .unwrap_or(usize::MAX)
    };
    report_targets.sort_by_key(|(k, _)| order(*k));
    Ok(IntervalReport {
        meta,
        targets: report_targets.into_iter().map(|(_, t)| t).collect(),
    })
}
