//! Coverage simulations: draw test sets from a known process, build
//! individual and joint intervals on each, and count how often they cover
//! the true measure values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::covariance::{correct, correlation, covariance_matrix, influence, CovarianceEstimate};
use crate::error::{Error, Result};
use crate::interval::Choice;
use crate::measure::{Catalog, MeasureSpec, MomentTriple};
use crate::moments::{count_columns, BinaryDataset, EvaluationTarget};
use crate::quantile::{inv_norm_cdf, max_abs_quantile, norm_cdf, QuantileRequest, DEFAULT_DRAWS};

/// Two-class Gaussian location mixture with unit variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    /// `P(Z = 1)`.
    pub prior: f64,
    pub mean0: f64,
    pub mean1: f64,
}

impl Default for GaussianMixture {
    fn default() -> Self {
        Self {
            prior: 0.5,
            mean0: 0.0,
            mean1: 1.0,
        }
    }
}

impl GaussianMixture {
    fn sample<R: Rng>(&self, rng: &mut R) -> (f64, u8) {
        let z = u8::from(rng.random::<f64>() < self.prior);
        let mean = if z == 1 { self.mean1 } else { self.mean0 };
        let noise: f64 = StandardNormal.sample(rng);
        (mean + noise, z)
    }

    /// `P(lo < X <= hi | Z = z)`.
    fn interval_prob(&self, z: u8, lo: f64, hi: f64) -> f64 {
        let mean = if z == 1 { self.mean1 } else { self.mean0 };
        let upper = if hi.is_finite() {
            norm_cdf(hi - mean)
        } else {
            1.0
        };
        let lower = if lo.is_finite() {
            norm_cdf(lo - mean)
        } else {
            0.0
        };
        upper - lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataProcess {
    GaussianMixture(GaussianMixture),
    /// Test sets are resampled from a finite population of fixed predictions.
    /// Sampling without replacement is only used as a degenerate check.
    EmpiricalBootstrap {
        population: BinaryDataset,
        with_replacement: bool,
    },
}

/// 1-nearest-neighbour rule on a one-dimensional training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneNn {
    xs: Vec<f64>,
    labels: Vec<u8>,
}

impl OneNn {
    pub fn new(mut points: Vec<(f64, u8)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("1-NN training set is empty".into()));
        }
        if points.iter().any(|(x, z)| !x.is_finite() || *z > 1) {
            return Err(Error::InvalidArgument(
                "1-NN training points need finite x and 0/1 labels".into(),
            ));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (xs, labels) = points.into_iter().unzip();
        Ok(Self { xs, labels })
    }

    /// Trains on `size` draws from `mixture` using the stream of `seed`.
    pub fn sample(mixture: &GaussianMixture, size: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..size).map(|_| mixture.sample(&mut rng)).collect())
    }

    pub fn predict(&self, x: f64) -> u8 {
        let i = self.xs.partition_point(|&t| t < x);
        if i == 0 {
            return self.labels[0];
        }
        if i == self.xs.len() {
            return self.labels[i - 1];
        }
        // Ties go to the left neighbour.
        if x - self.xs[i - 1] <= self.xs[i] - x {
            self.labels[i - 1]
        } else {
            self.labels[i]
        }
    }

    /// Maximal intervals `(lo, hi]` on which the rule predicts 1.
    fn positive_regions(&self) -> Vec<(f64, f64)> {
        let n = self.xs.len();
        let mut regions: Vec<(f64, f64)> = Vec::new();
        for i in 0..n {
            if self.labels[i] == 0 {
                continue;
            }
            let lo = if i == 0 {
                f64::NEG_INFINITY
            } else {
                (self.xs[i - 1] + self.xs[i]) / 2.0
            };
            let hi = if i + 1 == n {
                f64::INFINITY
            } else {
                (self.xs[i] + self.xs[i + 1]) / 2.0
            };
            match regions.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => regions.push((lo, hi)),
            }
        }
        regions
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleSpec {
    /// Predict 1 iff `x > theta`.
    Threshold {
        theta: f64,
    },
    OneNn(OneNn),
    /// A prediction column of the bootstrap population.
    FixedPredictions {
        column: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedRule {
    pub name: String,
    pub spec: RuleSpec,
}

impl NamedRule {
    pub fn new(name: impl Into<String>, spec: RuleSpec) -> Self {
        Self {
            name: name.into(),
            spec,
        }
    }

    pub fn threshold(theta: f64) -> Self {
        Self::new(format!("threshold({theta})"), RuleSpec::Threshold { theta })
    }

    fn predict(&self, x: f64) -> u8 {
        match &self.spec {
            RuleSpec::Threshold { theta } => u8::from(x > *theta),
            RuleSpec::OneNn(nn) => nn.predict(x),
            RuleSpec::FixedPredictions { .. } => unreachable!("checked by SimConfig::validate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruthMethod {
    /// Closed-form normal integrals, or exact enumeration of a population.
    Analytic,
    MonteCarlo {
        size: usize,
        seed: u64,
    },
}

pub const MIN_TRUTH_MC_SIZE: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueValue {
    pub rule: String,
    pub measure: String,
    pub value: f64,
    pub moments: MomentTriple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueParams {
    pub provenance: TruthMethod,
    pub values: Vec<TrueValue>,
}

fn rule_moments_analytic(process: &DataProcess, rule: &NamedRule) -> Result<MomentTriple> {
    match process {
        DataProcess::GaussianMixture(mix) => {
            let regions = match &rule.spec {
                RuleSpec::Threshold { theta } => vec![(*theta, f64::INFINITY)],
                RuleSpec::OneNn(nn) => nn.positive_regions(),
                RuleSpec::FixedPredictions { .. } => {
                    return Err(Error::InvalidArgument(format!(
                        "rule `{}` has fixed predictions but the process is a Gaussian mixture",
                        rule.name
                    )))
                }
            };
            let (p0, p1) = regions.iter().fold((0.0, 0.0), |(s0, s1), &(lo, hi)| {
                (
                    s0 + mix.interval_prob(0, lo, hi),
                    s1 + mix.interval_prob(1, lo, hi),
                )
            });
            let za = mix.prior * p1;
            let a = (1.0 - mix.prior) * p0 + za;
            Ok(MomentTriple {
                za,
                a,
                z: mix.prior,
            })
        }
        DataProcess::EmpiricalBootstrap { population, .. } => {
            let column = fixed_column(rule)?;
            Ok(count_columns(population.truth(), population.predictions(column)?).triple())
        }
    }
}

fn fixed_column(rule: &NamedRule) -> Result<&str> {
    match &rule.spec {
        RuleSpec::FixedPredictions { column } => Ok(column),
        _ => Err(Error::InvalidArgument(format!(
            "rule `{}` needs features, but the bootstrap population only has predictions",
            rule.name
        ))),
    }
}

/// True measure values for every rule x measure, rule-major.
pub fn true_params(
    process: &DataProcess,
    rules: &[NamedRule],
    measures: &[MeasureSpec],
    method: TruthMethod,
) -> Result<TrueParams> {
    let moments: Vec<MomentTriple> = match method {
        TruthMethod::Analytic => rules
            .iter()
            .map(|r| rule_moments_analytic(process, r))
            .collect::<Result<_>>()?,
        TruthMethod::MonteCarlo { size, seed } => {
            if size < MIN_TRUTH_MC_SIZE {
                return Err(Error::InvalidArgument(format!(
                    "Monte-Carlo truth needs at least {MIN_TRUTH_MC_SIZE} draws, got {size}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sample = draw_test_set(process, rules, size, &mut rng)?;
            (0..rules.len())
                .map(|i| count_columns(sample.truth(), sample.predictions_at(i)).triple())
                .collect()
        }
    };
    let mut values = Vec::with_capacity(rules.len() * measures.len());
    for (rule, m) in rules.iter().zip(&moments) {
        for measure in measures {
            values.push(TrueValue {
                rule: rule.name.clone(),
                measure: measure.id().to_string(),
                value: measure.evaluate(m)?,
                moments: *m,
            });
        }
    }
    Ok(TrueParams {
        provenance: method,
        values,
    })
}

fn draw_test_set<R: Rng>(
    process: &DataProcess,
    rules: &[NamedRule],
    n: usize,
    rng: &mut R,
) -> Result<BinaryDataset> {
    match process {
        DataProcess::GaussianMixture(mix) => {
            let mut z = Vec::with_capacity(n);
            let mut preds = vec![Vec::with_capacity(n); rules.len()];
            for _ in 0..n {
                let (x, zi) = mix.sample(rng);
                z.push(zi);
                for (col, rule) in preds.iter_mut().zip(rules) {
                    col.push(rule.predict(x));
                }
            }
            let named = rules.iter().map(|r| r.name.clone()).zip(preds).collect();
            BinaryDataset::new(z, named)
        }
        DataProcess::EmpiricalBootstrap {
            population,
            with_replacement,
        } => {
            let size = population.n();
            let rows: Vec<usize> = if *with_replacement {
                (0..n).map(|_| rng.random_range(0..size)).collect()
            } else {
                if n > size {
                    return Err(Error::InvalidArgument(format!(
                        "cannot draw {n} rows without replacement from {size}"
                    )));
                }
                rand::seq::index::sample(rng, size, n).into_vec()
            };
            let z = rows.iter().map(|&i| population.truth()[i]).collect();
            let named = rules
                .iter()
                .map(|r| {
                    let col = population.predictions(fixed_column(r)?)?;
                    Ok((r.name.clone(), rows.iter().map(|&i| col[i]).collect()))
                })
                .collect::<Result<Vec<_>>>()?;
            BinaryDataset::new(z, named)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub process: DataProcess,
    pub rules: Vec<NamedRule>,
    pub measures: Vec<String>,
    pub n: usize,
    pub alpha: f64,
    pub replications: usize,
    pub choices: Vec<Choice>,
    /// Target index sets (rule-major positions) covered jointly.
    pub joint_sets: Vec<Vec<usize>>,
    pub draws: usize,
    pub seed: u64,
    pub truth: TruthMethod,
}

impl SimConfig {
    /// Thresholds 0.3, 0.5 and 0.7 on the default mixture with F0.5 and
    /// accuracy, n = 500, 2000 replications, one joint set over all six
    /// targets.
    pub fn mixture_thresholds(seed: u64) -> Self {
        Self {
            process: DataProcess::GaussianMixture(GaussianMixture::default()),
            rules: [0.3, 0.5, 0.7]
                .into_iter()
                .map(NamedRule::threshold)
                .collect(),
            measures: vec!["f_beta(0.5)".into(), "accuracy".into()],
            n: 500,
            alpha: 0.05,
            replications: 2000,
            choices: vec![Choice::Uncorrected],
            joint_sets: vec![(0..6).collect()],
            draws: DEFAULT_DRAWS,
            seed,
            truth: TruthMethod::Analytic,
        }
    }

    /// A bootstrap population with a 6.2% positive rate and a weak rule
    /// (4 true positives, 20 false positives in 3333 rows, true F0.5 about
    /// 0.066), tested at n = 3000 with the rule's F0.5 and accuracy covered
    /// jointly under both variance choices.
    pub fn rare_positive(seed: u64) -> Self {
        Self {
            process: DataProcess::EmpiricalBootstrap {
                population: rare_positive_population(),
                with_replacement: true,
            },
            rules: vec![NamedRule::new(
                "weak",
                RuleSpec::FixedPredictions {
                    column: "weak".into(),
                },
            )],
            measures: vec!["f_beta(0.5)".into(), "accuracy".into()],
            n: 3000,
            alpha: 0.05,
            replications: 2000,
            choices: vec![Choice::Uncorrected, Choice::Blurred],
            joint_sets: vec![vec![0, 1]],
            draws: DEFAULT_DRAWS,
            seed,
            truth: TruthMethod::Analytic,
        }
    }

    pub fn targets(&self) -> Vec<EvaluationTarget> {
        let rules: Vec<&str> = self.rules.iter().map(|r| r.name.as_str()).collect();
        let measures: Vec<&str> = self.measures.iter().map(String::as_str).collect();
        EvaluationTarget::cross(&rules, &measures)
    }

    /// Joint sets covering each rule's measures together.
    pub fn per_rule_sets(&self) -> Vec<Vec<usize>> {
        let m = self.measures.len();
        (0..self.rules.len())
            .map(|r| (r * m..(r + 1) * m).collect())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.rules.is_empty() || self.measures.is_empty() {
            return bad("need at least one rule and one measure".into());
        }
        if self.n < 2 {
            return Err(Error::TooFewRows(self.n));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} is outside (0, 1)", self.alpha));
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.choices.is_empty() {
            return bad("no variance choice requested".into());
        }
        let k = self.rules.len() * self.measures.len();
        for set in &self.joint_sets {
            if set.is_empty() || set.iter().any(|&i| i >= k) {
                return bad(format!("joint set {set:?} is empty or out of range"));
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != set.len() {
                return bad(format!("joint set {set:?} repeats a target"));
            }
        }
        let mut names: Vec<&str> = self.rules.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.rules.len() {
            return Err(Error::DuplicateRuleId("rule names must be unique".into()));
        }
        for rule in &self.rules {
            let fixed = matches!(rule.spec, RuleSpec::FixedPredictions { .. });
            let mixture = matches!(self.process, DataProcess::GaussianMixture(_));
            if fixed == mixture {
                return bad(format!(
                    "rule `{}` does not fit the data process (threshold and 1-NN rules need \
                     the Gaussian mixture, fixed predictions need a bootstrap population)",
                    rule.name
                ));
            }
            if let RuleSpec::Threshold { theta } = rule.spec {
                if !theta.is_finite() {
                    return bad(format!("threshold of `{}` is not finite", rule.name));
                }
            }
        }
        if let DataProcess::EmpiricalBootstrap { population, .. } = &self.process {
            for rule in &self.rules {
                population.predictions(fixed_column(rule)?)?;
            }
        }
        if let TruthMethod::MonteCarlo { size, .. } = self.truth {
            if size < MIN_TRUTH_MC_SIZE {
                return bad(format!(
                    "Monte-Carlo truth size {size} is below {MIN_TRUTH_MC_SIZE}"
                ));
            }
        }
        Ok(())
    }
}

/// 3333 rows, 207 positives; the `weak` rule has 4 true and 20 false
/// positives.
pub fn rare_positive_population() -> BinaryDataset {
    const ROWS: usize = 3333;
    const POSITIVES: usize = 207;
    const TRUE_POS: usize = 4;
    const FALSE_POS: usize = 20;
    let mut z = vec![0u8; ROWS];
    let mut a = vec![0u8; ROWS];
    z[..POSITIVES].fill(1);
    a[..TRUE_POS].fill(1);
    a[POSITIVES..POSITIVES + FALSE_POS].fill(1);
    BinaryDataset::new(z, vec![("weak".into(), a)]).expect("static population is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetCoverage {
    pub set: Vec<usize>,
    /// Proportion of replications where the joint intervals cover every
    /// target of the set.
    pub coverage: f64,
    /// Mean over replications of the mean joint interval length in the set.
    pub avg_length: Option<f64>,
    /// Same set, covered by individual intervals.
    pub individual_coverage: f64,
    pub individual_avg_length: Option<f64>,
    pub mean_q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceCoverage {
    pub choice: Choice,
    /// Per target, rule-major.
    pub individual_coverage: Vec<f64>,
    pub individual_avg_length: Vec<Option<f64>>,
    /// All targets covered at once by their individual intervals.
    pub all_individual_coverage: f64,
    pub joint: Vec<SetCoverage>,
    /// (replication, target) pairs with no interval.
    pub failed_targets: usize,
}

/// Counts of width-ordering checks and violations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthAudit {
    pub joint_checks: usize,
    /// Joint critical value below the scalar one by more than 3 MC standard
    /// errors.
    pub joint_below_individual: usize,
    pub choice_checks: usize,
    pub blurred_below_uncorrected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub n: usize,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    pub draws: usize,
    pub targets: Vec<EvaluationTarget>,
    pub truths: TrueParams,
    pub choices: Vec<ChoiceCoverage>,
    pub width_audit: WidthAudit,
}

impl CoverageResult {
    pub fn choice(&self, choice: Choice) -> Option<&ChoiceCoverage> {
        self.choices.iter().find(|c| c.choice == choice)
    }
}

#[derive(Debug, Clone, Default)]
struct SetOutcome {
    covered: bool,
    avg_len: Option<f64>,
    individual_covered: bool,
    individual_avg_len: Option<f64>,
    q: Option<f64>,
}

#[derive(Debug, Clone)]
struct ChoiceOutcome {
    covered: Vec<bool>,
    length: Vec<Option<f64>>,
    sets: Vec<SetOutcome>,
    failed: usize,
}

#[derive(Debug, Clone)]
struct RepOutcome {
    choices: Vec<ChoiceOutcome>,
    audit: WidthAudit,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-replication seed for the quantile solver.
fn quantile_seed(master: u64, rep: usize) -> u64 {
    splitmix64(master ^ splitmix64(rep as u64))
}

struct RepContext<'a> {
    config: &'a SimConfig,
    targets: &'a [EvaluationTarget],
    measures: &'a [MeasureSpec],
    truths: &'a [f64],
    z_crit: f64,
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn run_replication(ctx: &RepContext<'_>, rep: usize) -> Result<RepOutcome> {
    let config = ctx.config;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(rep as u64);
    let data = draw_test_set(&config.process, &config.rules, config.n, &mut rng)?;

    let mut ok = Vec::new();
    let mut influences = Vec::new();
    for (k, (target, measure)) in ctx
        .targets
        .iter()
        .zip(ctx.measures.iter().cycle())
        .enumerate()
    {
        if let Ok(h) = influence(&data, target, measure) {
            ok.push(k);
            influences.push(h);
        }
    }
    let k_all = ctx.targets.len();
    let n = config.n as f64;
    let base: Option<CovarianceEstimate> = if ok.is_empty() {
        None
    } else {
        Some(covariance_matrix(&influences)?)
    };
    let qseed = quantile_seed(config.seed, rep);
    let mut audit = WidthAudit::default();
    let mut choices = Vec::with_capacity(config.choices.len());
    let mut half_widths_by_choice: Vec<(Choice, Vec<Option<f64>>)> = Vec::new();

    for &choice in &config.choices {
        // position in `ok` for each target
        let mut half = vec![None; k_all];
        let mut estimate = vec![f64::NAN; k_all];
        let cov = match (&base, choice) {
            (None, _) => None,
            (Some(c), Choice::Uncorrected) => Some(c.clone()),
            (Some(c), Choice::Blurred) => Some(correct(c, config.alpha)?),
        };
        if let Some(cov) = &cov {
            for (pos, &k) in ok.iter().enumerate() {
                let v = cov.variance(pos);
                estimate[k] = influences[pos].estimate;
                if v > 0.0 {
                    half[k] = Some((v / n).sqrt());
                }
            }
        }
        let covers = |k: usize, hw: f64| (estimate[k] - ctx.truths[k]).abs() <= hw;
        let covered: Vec<bool> = (0..k_all)
            .map(|k| half[k].is_some_and(|s| covers(k, ctx.z_crit * s)))
            .collect();
        let length: Vec<Option<f64>> = half
            .iter()
            .map(|s| s.map(|s| 2.0 * ctx.z_crit * s))
            .collect();
        let failed = half.iter().filter(|s| s.is_none()).count();

        let mut sets = Vec::with_capacity(config.joint_sets.len());
        for set in &config.joint_sets {
            let usable: Vec<usize> = set.iter().copied().filter(|&k| half[k].is_some()).collect();
            let mut out = SetOutcome {
                individual_covered: set.iter().all(|&k| covered[k]),
                individual_avg_len: mean_of(usable.iter().map(|&k| length[k].unwrap())),
                ..SetOutcome::default()
            };
            if let Some(cov) = &cov {
                if !usable.is_empty() {
                    let positions: Vec<usize> = usable
                        .iter()
                        .map(|k| ok.iter().position(|o| o == k).unwrap())
                        .collect();
                    let r = correlation(&cov.restrict(&positions)?)?;
                    let req = QuantileRequest::new(config.alpha, r)
                        .draws(config.draws)
                        .seed(qseed);
                    let res = max_abs_quantile(&req)?;
                    audit.joint_checks += usable.len();
                    if res.q < ctx.z_crit - 3.0 * res.mc_stderr {
                        audit.joint_below_individual += usable.len();
                    }
                    out.q = Some(res.q);
                    out.covered = usable.len() == set.len()
                        && usable.iter().all(|&k| covers(k, res.q * half[k].unwrap()));
                    out.avg_len = mean_of(usable.iter().map(|&k| 2.0 * res.q * half[k].unwrap()));
                }
            }
            sets.push(out);
        }
        half_widths_by_choice.push((choice, half));
        choices.push(ChoiceOutcome {
            covered,
            length,
            sets,
            failed,
        });
    }

    let find = |c: Choice| {
        half_widths_by_choice
            .iter()
            .find(|(x, _)| *x == c)
            .map(|(_, h)| h)
    };
    if let (Some(plain), Some(blurred)) = (find(Choice::Uncorrected), find(Choice::Blurred)) {
        for (p, b) in plain.iter().zip(blurred) {
            if let Some(p) = p {
                audit.choice_checks += 1;
                if !b.is_some_and(|b| b >= *p) {
                    audit.blurred_below_uncorrected += 1;
                }
            }
        }
    }
    Ok(RepOutcome { choices, audit })
}

/// Runs `config.replications` independent test sets and tabulates coverage.
///
/// A target with no interval in a replication (undefined measure, or zero
/// variance under the uncorrected choice) counts as not covered.
pub fn run_coverage(config: &SimConfig, catalog: &Catalog) -> Result<CoverageResult> {
    config.validate()?;
    let measures: Vec<MeasureSpec> = config
        .measures
        .iter()
        .map(|m| catalog.get(m))
        .collect::<Result<_>>()?;
    let targets = config.targets();
    let truths = true_params(&config.process, &config.rules, &measures, config.truth)?;
    let truth_values: Vec<f64> = truths.values.iter().map(|t| t.value).collect();
    let ctx = RepContext {
        config,
        targets: &targets,
        measures: &measures,
        truths: &truth_values,
        z_crit: inv_norm_cdf(1.0 - config.alpha / 2.0)?,
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<RepOutcome> = {
        use rayon::prelude::*;
        (0..config.replications)
            .into_par_iter()
            .map(|rep| run_replication(&ctx, rep))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<RepOutcome> = (0..config.replications)
        .map(|rep| run_replication(&ctx, rep))
        .collect::<Result<_>>()?;

    Ok(aggregate(config, targets, truths, &outcomes))
}

fn proportion(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

fn aggregate(
    config: &SimConfig,
    targets: Vec<EvaluationTarget>,
    truths: TrueParams,
    outcomes: &[RepOutcome],
) -> CoverageResult {
    let reps = outcomes.len();
    let k_all = targets.len();
    let mut audit = WidthAudit::default();
    for o in outcomes {
        audit.joint_checks += o.audit.joint_checks;
        audit.joint_below_individual += o.audit.joint_below_individual;
        audit.choice_checks += o.audit.choice_checks;
        audit.blurred_below_uncorrected += o.audit.blurred_below_uncorrected;
    }
    let choices = config
        .choices
        .iter()
        .enumerate()
        .map(|(c, &choice)| {
            let per_rep = || outcomes.iter().map(move |o| &o.choices[c]);
            let individual_coverage = (0..k_all)
                .map(|k| proportion(per_rep().filter(|o| o.covered[k]).count(), reps))
                .collect();
            let individual_avg_length = (0..k_all)
                .map(|k| mean_of(per_rep().filter_map(|o| o.length[k])))
                .collect();
            let all_individual_coverage = proportion(
                per_rep().filter(|o| o.covered.iter().all(|&b| b)).count(),
                reps,
            );
            let joint = config
                .joint_sets
                .iter()
                .enumerate()
                .map(|(s, set)| SetCoverage {
                    set: set.clone(),
                    coverage: proportion(per_rep().filter(|o| o.sets[s].covered).count(), reps),
                    avg_length: mean_of(per_rep().filter_map(|o| o.sets[s].avg_len)),
                    individual_coverage: proportion(
                        per_rep().filter(|o| o.sets[s].individual_covered).count(),
                        reps,
                    ),
                    individual_avg_length: mean_of(
                        per_rep().filter_map(|o| o.sets[s].individual_avg_len),
                    ),
                    mean_q: mean_of(per_rep().filter_map(|o| o.sets[s].q)),
                })
                .collect();
            ChoiceCoverage {
                choice,
                individual_coverage,
                individual_avg_length,
                all_individual_coverage,
                joint,
                failed_targets: per_rep().map(|o| o.failed).sum(),
            }
        })
        .collect();
    CoverageResult {
        n: config.n,
        alpha: config.alpha,
        replications: reps,
        seed: config.seed,
        draws: config.draws,
        targets,
        truths,
        choices,
        width_audit: audit,
    }
}

/// Matched uncorrected/blurred coverage on the rare-positive population.
pub fn rare_positive_stress(
    seed: u64,
    replications: usize,
    draws: usize,
    catalog: &Catalog,
) -> Result<CoverageResult> {
    let config = SimConfig {
        replications,
        draws,
        ..SimConfig::rare_positive(seed)
    };
    run_coverage(&config, catalog)
}
