//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers and strings and returns a JSON string;
//! errors come back as `{"error": "..."}` so the page has a single code path.

use perfci::quantile::{inv_norm_cdf, sidak_quantile, QuantileRequest};
use perfci::{
    analyze, max_abs_quantile, BinaryDataset, Catalog, Choice, CorrelationMatrix, EvaluationTarget,
    IntervalSpec, Mode, MomentTriple,
};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn respond<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v)
            .unwrap_or_else(|e| json!({ "error": e.to_string() }).to_string()),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[derive(Debug, Serialize)]
pub struct QuantileComparison {
    pub q: f64,
    pub mc_stderr: f64,
    pub individual: f64,
    pub sidak: f64,
}

/// `q(alpha, R)` for an exchangeable `R` next to the scalar and independent
/// (Sidak) critical values.
pub fn compare_quantiles(
    dim: usize,
    rho: f64,
    alpha: f64,
    draws: usize,
    seed: u64,
) -> Result<QuantileComparison, String> {
    let r = CorrelationMatrix::exchangeable(dim, rho).map_err(|e| e.to_string())?;
    let req = QuantileRequest::new(alpha, r).draws(draws).seed(seed);
    let res = max_abs_quantile(&req).map_err(|e| e.to_string())?;
    Ok(QuantileComparison {
        q: res.q,
        mc_stderr: res.mc_stderr,
        individual: inv_norm_cdf(1.0 - alpha / 2.0).map_err(|e| e.to_string())?,
        sidak: sidak_quantile(alpha, dim).map_err(|e| e.to_string())?,
    })
}

/// Intervals for every rule x measure in `csv`, covered as one joint set
/// (or individually when `joint` is false).
pub fn analyze_text(
    csv: &str,
    measures: &str,
    alpha: f64,
    choice: u8,
    joint: bool,
    seed: u64,
) -> Result<perfci::IntervalReport, String> {
    let data = BinaryDataset::from_csv(csv.as_bytes()).map_err(|e| e.to_string())?;
    let measures: Vec<&str> = measures.split_whitespace().collect();
    if measures.is_empty() {
        return Err("no measures given".into());
    }
    let choice = Choice::from_number(choice).ok_or("choice must be 1 or 2")?;
    let rules: Vec<&str> = data.rule_ids().collect();
    let targets = EvaluationTarget::cross(&rules, &measures);
    let mode = if joint { Mode::Joint } else { Mode::Individual };
    let spec = IntervalSpec::new(alpha, mode, choice, (0..targets.len()).collect())
        .quantile_knobs(50_000, seed);
    analyze(&data, &targets, &spec, &Catalog::default()).map_err(|e| match e {
        perfci::Error::AllTargetsFailed(list) => list
            .iter()
            .map(|(k, e)| format!("{}: {e}", targets[*k]))
            .collect::<Vec<_>>()
            .join("; "),
        e => e.to_string(),
    })
}

#[derive(Debug, Serialize)]
pub struct BlurPoint {
    pub n: usize,
    pub plain: f64,
    pub blurred: f64,
}

/// Population covariance of `(ZA, A, Z)` at moments `m`.
fn moment_covariance(m: &MomentTriple) -> [[f64; 3]; 3] {
    let MomentTriple { za, a, z } = *m;
    [
        [za * (1.0 - za), za * (1.0 - a), za * (1.0 - z)],
        [za * (1.0 - a), a * (1.0 - a), za - a * z],
        [za * (1.0 - z), za - a * z, z * (1.0 - z)],
    ]
}

/// Individual half-widths with and without blurring for a measure at fixed
/// moments, over test sizes `n = 10 .. n_max` on a log grid.
pub fn blur_curve(
    measure: &str,
    za: f64,
    a: f64,
    z: f64,
    alpha: f64,
    n_max: usize,
) -> Result<Vec<BlurPoint>, String> {
    let m = MomentTriple::new(za, a, z).map_err(|e| e.to_string())?;
    let spec = Catalog::default().get(measure).map_err(|e| e.to_string())?;
    let g = spec.gradient(&m).map_err(|e| e.to_string())?;
    let crit = inv_norm_cdf(1.0 - alpha / 2.0).map_err(|e| e.to_string())?;
    let s = moment_covariance(&m);
    let ga = g.as_array();
    let v: f64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| ga[i] * s[i][j] * ga[j])
        .sum();
    let steps = 40;
    let hi = (n_max.max(20) as f64).ln();
    let lo = 10f64.ln();
    let mut points: Vec<BlurPoint> = (0..=steps)
        .map(|i| {
            let n = (lo + (hi - lo) * i as f64 / steps as f64).exp().round() as usize;
            let nf = n as f64;
            let d = g.norm_sq() * crit * crit / 2.0 / nf;
            BlurPoint {
                n,
                plain: crit * (v / nf).sqrt(),
                blurred: crit * ((v + d) / nf).sqrt(),
            }
        })
        .collect();
    points.dedup_by_key(|p| p.n);
    Ok(points)
}

#[wasm_bindgen]
pub fn quantile_json(dim: usize, rho: f64, alpha: f64, draws: usize, seed: u32) -> String {
    respond(compare_quantiles(dim, rho, alpha, draws, seed.into()))
}

#[wasm_bindgen]
pub fn analyze_json(
    csv: &str,
    measures: &str,
    alpha: f64,
    choice: u8,
    joint: bool,
    seed: u32,
) -> String {
    respond(analyze_text(
        csv,
        measures,
        alpha,
        choice,
        joint,
        seed.into(),
    ))
}

#[wasm_bindgen]
pub fn blur_json(measure: &str, za: f64, a: f64, z: f64, alpha: f64, n_max: usize) -> String {
    respond(blur_curve(measure, za, a, z, alpha, n_max))
}
