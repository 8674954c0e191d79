use std::fmt::Write;

use perfci::quantile::QuantileResult;
use perfci::{ChoiceCoverage, CoverageResult, ReportMeta, TargetInterval};
use serde::{Deserialize, Serialize};

/// One jointly covered set. `meta` is null when every target of the set
/// failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetReport {
    pub meta: Option<ReportMeta>,
    pub targets: Vec<TargetInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileReport {
    pub alpha: f64,
    pub dim: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub result: QuantileResult,
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn pad(s: &str, width: usize) -> String {
    format!("{s:<width$}")
}

fn fmt4(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

/// Rules down, measures across, `(lower, upper)` cells.
pub fn analyze_table(reports: &[SetReport], rules: &[String], measures: &[String]) -> String {
    let mut out = String::new();
    let all: Vec<&TargetInterval> = reports.iter().flat_map(|r| &r.targets).collect();
    if let Some(meta) = reports.iter().find_map(|r| r.meta.as_ref()) {
        let _ = writeln!(
            out,
            "n = {}, alpha = {}, choice {}, {} intervals",
            meta.n, meta.alpha, meta.choice, meta.mode
        );
    }
    for (i, r) in reports.iter().enumerate() {
        let names: Vec<String> = r
            .targets
            .iter()
            .map(|t| format!("{}:{}", t.rule, t.measure))
            .collect();
        match &r.meta {
            Some(meta) => {
                let _ = writeln!(
                    out,
                    "set {}: q = {:.4} (MC s.e. {:.4}) over {}",
                    i + 1,
                    meta.q,
                    meta.mc_stderr,
                    names.join(", ")
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "set {}: every target failed ({})",
                    i + 1,
                    names.join(", ")
                );
            }
        }
    }
    out.push('\n');

    let cell = |rule: &str, measure: &str| -> String {
        match all.iter().find(|t| t.rule == rule && t.measure == measure) {
            Some(t) => match (t.lower, t.upper) {
                (Some(lo), Some(hi)) => format!("({lo:.4}, {hi:.4})"),
                _ => "failed".into(),
            },
            None => "-".into(),
        }
    };
    let rule_w = rules.iter().map(String::len).max().unwrap_or(0).max(4);
    let widths: Vec<usize> = measures
        .iter()
        .map(|m| {
            rules
                .iter()
                .map(|r| cell(r, m).len())
                .chain([m.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut header = pad("rule", rule_w);
    for (m, w) in measures.iter().zip(&widths) {
        header.push_str("  ");
        header.push_str(&pad(m, *w));
    }
    let _ = writeln!(out, "{}", header.trim_end());
    for rule in rules {
        let mut line = pad(rule, rule_w);
        for (m, w) in measures.iter().zip(&widths) {
            line.push_str("  ");
            line.push_str(&pad(&cell(rule, m), *w));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }

    let errors: Vec<String> = all
        .iter()
        .filter_map(|t| {
            t.error
                .as_ref()
                .map(|e| format!("  {}:{}: {e}", t.rule, t.measure))
        })
        .collect();
    if !errors.is_empty() {
        let _ = writeln!(out, "\nfailed targets:\n{}", errors.join("\n"));
    }
    out
}

fn choice_table(out: &mut String, result: &CoverageResult, c: &ChoiceCoverage) {
    let names: Vec<String> = result.targets.iter().map(ToString::to_string).collect();
    let rule_w = result
        .targets
        .iter()
        .map(|t| t.rule.len())
        .max()
        .unwrap_or(0)
        .max(10);
    let measure_w = result
        .targets
        .iter()
        .map(|t| t.measure.len())
        .max()
        .unwrap_or(0)
        .max(7);
    let _ = writeln!(out, "choice {}", c.choice);
    let _ = writeln!(
        out,
        "{}  {}  true value  coverage  avg length",
        pad("classifier", rule_w),
        pad("measure", measure_w)
    );
    for (k, t) in result.targets.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}  {}  {:<10}  {:<8.4}  {}",
            pad(&t.rule, rule_w),
            pad(&t.measure, measure_w),
            format!("{:.4}", result.truths.values[k].value),
            c.individual_coverage[k],
            fmt4(c.individual_avg_length[k])
        );
    }
    let _ = writeln!(
        out,
        "all {} individual intervals together: coverage {:.4}",
        names.len(),
        c.all_individual_coverage
    );
    if c.failed_targets > 0 {
        let _ = writeln!(
            out,
            "targets without an interval: {} (scored as not covering)",
            c.failed_targets
        );
    }
    if !c.joint.is_empty() {
        let _ = writeln!(
            out,
            "joint coverage  avg length  individual coverage  individual avg length  mean q  set"
        );
        for s in &c.joint {
            let members: Vec<&str> = s.set.iter().map(|&k| names[k].as_str()).collect();
            let _ = writeln!(
                out,
                "{:<14.4}  {:<10}  {:<19.4}  {:<21}  {:<6}  {}",
                s.coverage,
                fmt4(s.avg_length),
                s.individual_coverage,
                fmt4(s.individual_avg_length),
                fmt4(s.mean_q),
                members.join(", ")
            );
        }
    }
}

pub fn coverage_table(result: &CoverageResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}, alpha = {}, {} replications, seed {}\n",
        result.n, result.alpha, result.replications, result.seed
    );
    for c in &result.choices {
        choice_table(&mut out, result, c);
        out.push('\n');
    }
    let a = &result.width_audit;
    let _ = writeln!(
        out,
        "width checks: joint below individual {}/{}, choice II below choice I {}/{}",
        a.joint_below_individual, a.joint_checks, a.blurred_below_uncorrected, a.choice_checks
    );
    out
}

pub fn quantile_table(report: &QuantileReport) -> String {
    format!(
        "q = {:.6} (MC s.e. {:.6}, {} draws, dim {}, alpha {})\n",
        report.result.q,
        report.result.mc_stderr,
        report.result.draws_used,
        report.dim,
        report.alpha
    )
}
