//! Performance measures as smooth functions of the moment triple
//! `(E[ZA], E[A], E[Z])`.
//!
//! Every measure of a binary rule `A` predicting a binary label `Z` is a
//! function of the 2x2 joint distribution of `(Z, A)`, and that distribution
//! is pinned down by the three moments. A measure therefore only needs an
//! evaluator, its gradient, and a domain predicate saying where both are
//! finite.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the Fréchet bounds when validating triples that were
/// produced by floating point division of integer counts.
const FRECHET_SLACK: f64 = 1e-12;

/// Estimated or true `(E[ZA], E[A], E[Z])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTriple {
    pub za: f64,
    pub a: f64,
    pub z: f64,
}

impl MomentTriple {
    /// Checked constructor: each entry is a probability and the triple lies
    /// inside the Fréchet bounds `max(0, a + z - 1) <= za <= min(a, z)`.
    pub fn new(za: f64, a: f64, z: f64) -> Result<Self> {
        let bad = |reason| Err(Error::InvalidMoments { za, a, z, reason });
        if ![za, a, z]
            .iter()
            .all(|v| v.is_finite() && (0.0..=1.0).contains(v))
        {
            return bad("entries must be probabilities in [0, 1]");
        }
        if za > a.min(z) + FRECHET_SLACK {
            return bad("EZA exceeds min(EA, EZ)");
        }
        if za + FRECHET_SLACK < a + z - 1.0 {
            return bad("EZA is below the Fréchet lower bound EA + EZ - 1");
        }
        Ok(Self { za, a, z })
    }

    /// Exact sample means from cell counts.
    pub fn from_counts(za: usize, a: usize, z: usize, n: usize) -> Self {
        let n = n as f64;
        Self {
            za: za as f64 / n,
            a: a as f64 / n,
            z: z as f64 / n,
        }
    }

    /// Cell probabilities `[p(0,0), p(0,1), p(1,0), p(1,1)]` indexed by `(z, a)`.
    pub fn cells(&self) -> [f64; 4] {
        [
            1.0 - self.z - self.a + self.za,
            self.a - self.za,
            self.z - self.za,
            self.za,
        ]
    }
}

/// `(dg/dEZA, dg/dEA, dg/dEZ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientTriple {
    pub d_za: f64,
    pub d_a: f64,
    pub d_z: f64,
}

impl GradientTriple {
    pub fn new(d_za: f64, d_a: f64, d_z: f64) -> Self {
        Self { d_za, d_a, d_z }
    }

    pub fn norm_sq(&self) -> f64 {
        self.d_za * self.d_za + self.d_a * self.d_a + self.d_z * self.d_z
    }

    pub fn is_zero(&self) -> bool {
        self.d_za == 0.0 && self.d_a == 0.0 && self.d_z == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.d_za.is_finite() && self.d_a.is_finite() && self.d_z.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.d_za, self.d_a, self.d_z]
    }
}

/// The behaviour behind a [`MeasureSpec`].
///
/// `evaluate` and `gradient` are only called where the corresponding domain
/// predicate holds.
pub trait Measure: Send + Sync {
    fn evaluate(&self, m: &MomentTriple) -> f64;
    fn gradient(&self, m: &MomentTriple) -> GradientTriple;
    fn domain_ok(&self, m: &MomentTriple) -> bool;

    fn gradient_domain_ok(&self, m: &MomentTriple) -> bool {
        self.domain_ok(m)
    }

    /// Range the measure can take on valid triples, if bounded.
    fn natural_range(&self) -> Option<(f64, f64)> {
        None
    }
}

/// The built-in measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Accuracy,
    /// `(1 + beta^2) EZA / (EA + beta^2 EZ)`; F1 is `beta = 1`.
    FBeta {
        beta: f64,
    },
    Jaccard,
    /// `EZA / ((1 - a - b) EZA + a EA + b EZ)`.
    Tversky {
        a: f64,
        b: f64,
    },
    Correlation,
    Cosine,
    Lift,
    Overlap,
}

impl Builtin {
    fn f_beta_weights(beta: f64) -> (f64, f64) {
        let w_a = 1.0 / (1.0 + beta * beta);
        (w_a, 1.0 - w_a)
    }

    fn tversky_denominator(a: f64, b: f64, m: &MomentTriple) -> f64 {
        (1.0 - a - b) * m.za + a * m.a + b * m.z
    }
}

impl Measure for Builtin {
    fn evaluate(&self, m: &MomentTriple) -> f64 {
        match *self {
            Builtin::Accuracy => 1.0 - (m.a + m.z - 2.0 * m.za),
            Builtin::FBeta { beta } => {
                let (w_a, w_z) = Self::f_beta_weights(beta);
                m.za / (w_a * m.a + w_z * m.z)
            }
            Builtin::Jaccard => m.za / (m.a + m.z - m.za),
            Builtin::Tversky { a, b } => m.za / Self::tversky_denominator(a, b, m),
            Builtin::Correlation => {
                let spread = ((m.z - m.z * m.z) * (m.a - m.a * m.a)).sqrt();
                (m.za - m.a * m.z) / spread
            }
            Builtin::Cosine => m.za / (m.z.sqrt() * m.a.sqrt()),
            Builtin::Lift => m.za / (m.a * m.z),
            Builtin::Overlap => m.za / m.a.min(m.z),
        }
    }

    fn gradient(&self, m: &MomentTriple) -> GradientTriple {
        match *self {
            Builtin::Accuracy => GradientTriple::new(2.0, -1.0, -1.0),
            Builtin::FBeta { beta } => {
                let (w_a, w_z) = Self::f_beta_weights(beta);
                let den = w_a * m.a + w_z * m.z;
                let g = m.za / den;
                GradientTriple::new(1.0 / den, -w_a * g / den, -w_z * g / den)
            }
            Builtin::Jaccard => {
                let den = m.a + m.z - m.za;
                let den2 = den * den;
                GradientTriple::new((m.a + m.z) / den2, -m.za / den2, -m.za / den2)
            }
            Builtin::Tversky { a, b } => {
                let den = Self::tversky_denominator(a, b, m);
                let den2 = den * den;
                GradientTriple::new(
                    (a * m.a + b * m.z) / den2,
                    -a * m.za / den2,
                    -b * m.za / den2,
                )
            }
            Builtin::Correlation => {
                // Differentiated directly from g; the tabulated closed form
                // for dg/dEA and dg/dEZ drops an EZA term.
                let var_a = m.a - m.a * m.a;
                let var_z = m.z - m.z * m.z;
                let spread = (var_a * var_z).sqrt();
                let cov = m.za - m.a * m.z;
                GradientTriple::new(
                    1.0 / spread,
                    (-m.z - cov * (1.0 - 2.0 * m.a) / (2.0 * var_a)) / spread,
                    (-m.a - cov * (1.0 - 2.0 * m.z) / (2.0 * var_z)) / spread,
                )
            }
            Builtin::Cosine => {
                let root = m.z.sqrt() * m.a.sqrt();
                GradientTriple::new(
                    1.0 / root,
                    -m.za / (2.0 * m.a * root),
                    -m.za / (2.0 * m.z * root),
                )
            }
            Builtin::Lift => {
                let prod = m.a * m.z;
                GradientTriple::new(1.0 / prod, -m.za / (m.a * prod), -m.za / (m.z * prod))
            }
            Builtin::Overlap => {
                let low = m.a.min(m.z);
                let d_a = if m.a < m.z { -m.za / (m.a * m.a) } else { 0.0 };
                let d_z = if m.z < m.a { -m.za / (m.z * m.z) } else { 0.0 };
                GradientTriple::new(1.0 / low, d_a, d_z)
            }
        }
    }

    fn domain_ok(&self, m: &MomentTriple) -> bool {
        match *self {
            Builtin::Accuracy => true,
            Builtin::FBeta { beta } => {
                let (w_a, w_z) = Self::f_beta_weights(beta);
                w_a * m.a + w_z * m.z > 0.0
            }
            Builtin::Jaccard => m.a + m.z - m.za > 0.0,
            Builtin::Tversky { a, b } => Self::tversky_denominator(a, b, m) > 0.0,
            Builtin::Correlation => m.a > 0.0 && m.a < 1.0 && m.z > 0.0 && m.z < 1.0,
            Builtin::Cosine | Builtin::Lift | Builtin::Overlap => m.a > 0.0 && m.z > 0.0,
        }
    }

    fn gradient_domain_ok(&self, m: &MomentTriple) -> bool {
        match self {
            Builtin::Overlap => self.domain_ok(m) && m.a != m.z,
            _ => self.domain_ok(m),
        }
    }

    fn natural_range(&self) -> Option<(f64, f64)> {
        match self {
            Builtin::Correlation => Some((-1.0, 1.0)),
            Builtin::Lift => Some((0.0, f64::INFINITY)),
            _ => Some((0.0, 1.0)),
        }
    }
}

type EvalFn = dyn Fn(&MomentTriple) -> f64 + Send + Sync;
type GradFn = dyn Fn(&MomentTriple) -> GradientTriple + Send + Sync;
type DomainFn = dyn Fn(&MomentTriple) -> bool + Send + Sync;

/// A user supplied measure built from closures.
pub struct CustomMeasure {
    eval: Box<EvalFn>,
    grad: Box<GradFn>,
    domain: Box<DomainFn>,
}

impl CustomMeasure {
    pub fn new(
        eval: impl Fn(&MomentTriple) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&MomentTriple) -> GradientTriple + Send + Sync + 'static,
        domain: impl Fn(&MomentTriple) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Box::new(eval),
            grad: Box::new(grad),
            domain: Box::new(domain),
        }
    }
}

impl Measure for CustomMeasure {
    fn evaluate(&self, m: &MomentTriple) -> f64 {
        (self.eval)(m)
    }

    fn gradient(&self, m: &MomentTriple) -> GradientTriple {
        (self.grad)(m)
    }

    fn domain_ok(&self, m: &MomentTriple) -> bool {
        (self.domain)(m)
    }
}

/// A named measure with fixed parameters.
#[derive(Clone)]
pub struct MeasureSpec {
    id: String,
    params: Vec<f64>,
    inner: Arc<dyn Measure>,
}

impl fmt::Debug for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureSpec")
            .field("id", &self.id)
            .field("params", &self.params)
            .finish()
    }
}

impl MeasureSpec {
    pub fn new(id: impl Into<String>, params: Vec<f64>, measure: impl Measure + 'static) -> Self {
        Self {
            id: id.into(),
            params,
            inner: Arc::new(measure),
        }
    }

    pub fn accuracy() -> Self {
        Self::new("accuracy", vec![], Builtin::Accuracy)
    }

    pub fn f1() -> Self {
        Self::new("f1", vec![], Builtin::FBeta { beta: 1.0 })
    }

    pub fn f_beta(beta: f64) -> Result<Self> {
        let id = format!("f_beta({beta})");
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidMeasureParams {
                id,
                reason: "beta must be finite and positive".into(),
            });
        }
        Ok(Self::new(id, vec![beta], Builtin::FBeta { beta }))
    }

    pub fn jaccard() -> Self {
        Self::new("jaccard", vec![], Builtin::Jaccard)
    }

    pub fn tversky(a: f64, b: f64) -> Result<Self> {
        let id = format!("tversky({a},{b})");
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(Error::InvalidMeasureParams {
                id,
                reason: "a and b must be finite and positive".into(),
            });
        }
        Ok(Self::new(id, vec![a, b], Builtin::Tversky { a, b }))
    }

    pub fn correlation() -> Self {
        Self::new("correlation", vec![], Builtin::Correlation)
    }

    pub fn cosine() -> Self {
        Self::new("cosine", vec![], Builtin::Cosine)
    }

    pub fn lift() -> Self {
        Self::new("lift", vec![], Builtin::Lift)
    }

    pub fn overlap() -> Self {
        Self::new("overlap", vec![], Builtin::Overlap)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn domain_ok(&self, m: &MomentTriple) -> bool {
        self.inner.domain_ok(m)
    }

    pub fn natural_range(&self) -> Option<(f64, f64)> {
        self.inner.natural_range()
    }

    pub fn evaluate(&self, m: &MomentTriple) -> Result<f64> {
        if !self.inner.domain_ok(m) {
            return Err(self.domain_error(m, "a denominator vanishes"));
        }
        Ok(self.inner.evaluate(m))
    }

    pub fn gradient(&self, m: &MomentTriple) -> Result<GradientTriple> {
        if !self.inner.domain_ok(m) {
            return Err(self.domain_error(m, "a denominator vanishes"));
        }
        if !self.inner.gradient_domain_ok(m) {
            return Err(self.domain_error(m, "the gradient is undefined here"));
        }
        let grad = self.inner.gradient(m);
        if !grad.is_finite() {
            return Err(self.domain_error(m, "the gradient is not finite"));
        }
        Ok(grad)
    }

    fn domain_error(&self, m: &MomentTriple, reason: &'static str) -> Error {
        Error::Domain {
            measure: self.id.clone(),
            za: m.za,
            a: m.a,
            z: m.z,
            reason,
        }
    }
}

/// One entry per row of the standard table of data-mining measures.
/// F-beta defaults to beta = 0.5 and Tversky to (a, b) = (0.3, 0.4).
pub fn builtin_measures() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::accuracy(),
        MeasureSpec::f1(),
        MeasureSpec::f_beta(0.5).expect("valid beta"),
        MeasureSpec::jaccard(),
        MeasureSpec::tversky(0.3, 0.4).expect("valid tversky weights"),
        MeasureSpec::correlation(),
        MeasureSpec::cosine(),
        MeasureSpec::lift(),
        MeasureSpec::overlap(),
    ]
}

/// Resolves measure ids, including parameterized built-ins such as
/// `f_beta(0.5)` or `tversky(0.3,0.4)`, and holds user registered measures.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    custom: BTreeMap<String, MeasureSpec>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Makes `measure` resolvable by its id. Built-in ids (including any
    /// parameterization of them) cannot be shadowed.
    pub fn register(&mut self, measure: MeasureSpec) -> Result<()> {
        if measure.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidMeasureParams {
                id: measure.id.clone(),
                reason: "parameters must be finite".into(),
            });
        }
        let key = normalize_id(&measure.id);
        if parse_builtin(&key).is_some() || self.custom.contains_key(&key) {
            return Err(Error::DuplicateId(measure.id));
        }
        self.custom.insert(key, measure);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<MeasureSpec> {
        let key = normalize_id(id);
        if let Some(parsed) = parse_builtin(&key) {
            return parsed;
        }
        self.custom
            .get(&key)
            .cloned()
            .ok_or_else(|| Error::UnknownMeasure(id.to_string()))
    }

    pub fn custom_ids(&self) -> impl Iterator<Item = &str> {
        self.custom.values().map(|m| m.id())
    }
}

/// Canonical spelling of a measure id: lowercase, no whitespace.
pub fn normalize_id(id: &str) -> String {
    id.chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase()
}

fn parse_builtin(key: &str) -> Option<Result<MeasureSpec>> {
    let spec = match key {
        "accuracy" => MeasureSpec::accuracy(),
        "f1" => MeasureSpec::f1(),
        "jaccard" => MeasureSpec::jaccard(),
        "correlation" => MeasureSpec::correlation(),
        "cosine" => MeasureSpec::cosine(),
        "lift" => MeasureSpec::lift(),
        "overlap" => MeasureSpec::overlap(),
        _ => {
            if let Some(args) = call_args(key, "f_beta") {
                return Some(match parse_params(key, &args, 1) {
                    Ok(p) => MeasureSpec::f_beta(p[0]),
                    Err(e) => Err(e),
                });
            }
            if let Some(args) = call_args(key, "tversky") {
                return Some(match parse_params(key, &args, 2) {
                    Ok(p) => MeasureSpec::tversky(p[0], p[1]),
                    Err(e) => Err(e),
                });
            }
            return None;
        }
    };
    Some(Ok(spec))
}

fn call_args(key: &str, name: &str) -> Option<String> {
    key.strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')
        .map(str::to_string)
}

fn parse_params(id: &str, args: &str, count: usize) -> Result<Vec<f64>> {
    let values = args
        .split(',')
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::InvalidMeasureParams {
            id: id.to_string(),
            reason: e.to_string(),
        })?;
    if values.len() != count {
        return Err(Error::InvalidMeasureParams {
            id: id.to_string(),
            reason: format!("expected {count} parameter(s), found {}", values.len()),
        });
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn m(za: f64, a: f64, z: f64) -> MomentTriple {
        MomentTriple::new(za, a, z).unwrap()
    }

    #[test]
    fn builtin_list_has_nine_rows() {
        let ids: Vec<_> = builtin_measures()
            .iter()
            .map(|s| s.id().to_string())
            .collect();
        assert_eq!(
            ids,
            [
                "accuracy",
                "f1",
                "f_beta(0.5)",
                "jaccard",
                "tversky(0.3,0.4)",
                "correlation",
                "cosine",
                "lift",
                "overlap"
            ]
        );
    }

    #[test]
    fn evaluate_examples() {
        let toy = m(0.25, 0.5, 0.5);
        assert_eq!(MeasureSpec::accuracy().evaluate(&toy).unwrap(), 0.5);
        assert_eq!(MeasureSpec::lift().evaluate(&toy).unwrap(), 1.0);
        assert!(close(
            MeasureSpec::jaccard().evaluate(&toy).unwrap(),
            1.0 / 3.0,
            1e-15
        ));
        assert_eq!(MeasureSpec::correlation().evaluate(&toy).unwrap(), 0.0);

        let good = m(0.4, 0.5, 0.5);
        assert!(close(
            MeasureSpec::f1().evaluate(&good).unwrap(),
            0.8,
            1e-15
        ));
        let tv = MeasureSpec::tversky(0.5, 0.5).unwrap();
        assert!(close(tv.evaluate(&good).unwrap(), 0.8, 1e-15));
    }

    #[test]
    fn gradient_examples() {
        let acc = MeasureSpec::accuracy().gradient(&m(0.1, 0.3, 0.6)).unwrap();
        assert_eq!(acc, GradientTriple::new(2.0, -1.0, -1.0));

        let f1 = MeasureSpec::f1().gradient(&m(0.4, 0.5, 0.5)).unwrap();
        assert!(close(f1.d_za, 2.0, 1e-12));
        assert!(close(f1.d_a, -0.8, 1e-12));
        assert!(close(f1.d_z, -0.8, 1e-12));

        let lift = MeasureSpec::lift().gradient(&m(0.25, 0.5, 0.5)).unwrap();
        assert!(close(lift.d_za, 4.0, 1e-12));
        assert!(close(lift.d_a, -2.0, 1e-12));
        assert!(close(lift.d_z, -2.0, 1e-12));
    }

    #[test]
    fn tabulated_closed_forms_agree_where_they_are_right() {
        // F_beta: (1, -a g, -b g) / (a EA + b EZ) with a = 1/(1+beta^2).
        let t = m(0.2, 0.35, 0.45);
        let beta: f64 = 2.0;
        let wa = 1.0 / (1.0 + beta * beta);
        let wb = 1.0 - wa;
        let spec = MeasureSpec::f_beta(beta).unwrap();
        let g = spec.evaluate(&t).unwrap();
        let d = spec.gradient(&t).unwrap();
        let den = wa * t.a + wb * t.z;
        assert!(close(d.d_za, 1.0 / den, 1e-12));
        assert!(close(d.d_a, -wa * g / den, 1e-12));
        assert!(close(d.d_z, -wb * g / den, 1e-12));

        // Tversky: (g/EZA)^2 (a EA + b EZ, -a EZA, -b EZA).
        let spec = MeasureSpec::tversky(0.3, 0.4).unwrap();
        let g = spec.evaluate(&t).unwrap();
        let d = spec.gradient(&t).unwrap();
        let s = (g / t.za).powi(2);
        assert!(close(d.d_za, s * (0.3 * t.a + 0.4 * t.z), 1e-12));
        assert!(close(d.d_a, -s * 0.3 * t.za, 1e-12));
        assert!(close(d.d_z, -s * 0.4 * t.za, 1e-12));

        // Correlation: dg/dEZA = g / (EZA - EA EZ).
        let spec = MeasureSpec::correlation();
        let g = spec.evaluate(&t).unwrap();
        let d = spec.gradient(&t).unwrap();
        assert!(close(d.d_za, g / (t.za - t.a * t.z), 1e-12));
    }

    #[test]
    fn domain_errors() {
        let zero = m(0.0, 0.0, 0.0);
        assert!(matches!(
            MeasureSpec::jaccard().evaluate(&zero),
            Err(Error::Domain { .. })
        ));
        assert!(MeasureSpec::lift().evaluate(&m(0.0, 0.0, 0.5)).is_err());
        assert!(MeasureSpec::lift().evaluate(&m(0.0, 0.5, 0.0)).is_err());
        assert!(MeasureSpec::correlation()
            .evaluate(&m(0.5, 1.0, 0.5))
            .is_err());
        assert!(MeasureSpec::correlation()
            .evaluate(&m(0.0, 0.5, 0.0))
            .is_err());
        // Accuracy is defined everywhere.
        assert!(MeasureSpec::accuracy().gradient(&zero).is_ok());
    }

    #[test]
    fn overlap_tie_only_blocks_gradient() {
        let tie = m(0.2, 0.4, 0.4);
        let overlap = MeasureSpec::overlap();
        assert!(close(overlap.evaluate(&tie).unwrap(), 0.5, 1e-15));
        assert!(matches!(overlap.gradient(&tie), Err(Error::Domain { .. })));
        let d = overlap.gradient(&m(0.2, 0.3, 0.5)).unwrap();
        assert!(close(d.d_za, 1.0 / 0.3, 1e-12));
        assert!(close(d.d_a, -0.2 / 0.09, 1e-12));
        assert_eq!(d.d_z, 0.0);
    }

    #[test]
    fn moment_triple_validation() {
        assert!(MomentTriple::new(0.6, 0.5, 0.7).is_err());
        assert!(MomentTriple::new(0.1, 0.8, 0.7).is_err());
        assert!(MomentTriple::new(-0.1, 0.5, 0.5).is_err());
        assert!(MomentTriple::new(0.5, 0.8, 0.7).is_ok());
        let cells = m(0.25, 0.5, 0.5).cells();
        assert_eq!(cells, [0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn catalog_resolves_and_registers() {
        let mut catalog = Catalog::new();
        assert_eq!(catalog.get("F_beta(0.50)").unwrap().id(), "f_beta(0.5)");
        assert_eq!(catalog.get("f_beta(2)").unwrap().id(), "f_beta(2)");
        assert_eq!(
            catalog.get("tversky(0.3, 0.4)").unwrap().params(),
            &[0.3, 0.4]
        );
        assert!(matches!(catalog.get("auc"), Err(Error::UnknownMeasure(_))));
        assert!(matches!(
            catalog.get("f_beta(-1)"),
            Err(Error::InvalidMeasureParams { .. })
        ));
        assert!(catalog.get("tversky(1)").is_err());

        let recall = MeasureSpec::new(
            "recall",
            vec![],
            CustomMeasure::new(
                |m| m.za / m.z,
                |m| GradientTriple::new(1.0 / m.z, 0.0, -m.za / (m.z * m.z)),
                |m| m.z > 0.0,
            ),
        );
        catalog.register(recall).unwrap();
        let r = catalog.get("recall").unwrap();
        assert!(close(r.evaluate(&m(0.2, 0.3, 0.4)).unwrap(), 0.5, 1e-15));
        assert!(r.evaluate(&m(0.0, 0.3, 0.0)).is_err());

        let clash = MeasureSpec::new("accuracy", vec![], Builtin::Accuracy);
        assert!(matches!(
            catalog.register(clash),
            Err(Error::DuplicateId(_))
        ));
        let again = MeasureSpec::new("Recall", vec![], Builtin::Accuracy);
        assert!(matches!(
            catalog.register(again),
            Err(Error::DuplicateId(_))
        ));
    }
}
