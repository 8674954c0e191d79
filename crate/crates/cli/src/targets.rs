use anyhow::{bail, Result};
use perfci::measure::normalize_id;

/// How targets are grouped into jointly covered sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JointSpec {
    PerRule,
    All,
    /// No joint sets: every target gets its own interval.
    Individual,
    /// Sets of `rule:measure` names.
    Sets(Vec<Vec<String>>),
}

impl JointSpec {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "per-rule" => Self::PerRule,
            "all" => Self::All,
            "individual" => Self::Individual,
            list => {
                let sets: Vec<Vec<String>> = list
                    .split(';')
                    .map(|set| {
                        split_top_level(set)
                            .into_iter()
                            .map(str::to_string)
                            .collect()
                    })
                    .collect();
                if sets.iter().any(Vec::is_empty) {
                    bail!("empty joint set in `{list}`");
                }
                Self::Sets(sets)
            }
        })
    }
}

/// Splits on commas outside parentheses, so `f_beta(0.5),tversky(0.3,0.4)`
/// gives two items. Empty items are dropped.
pub fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|item| !item.is_empty());
    out
}

/// Target index sets for rule-major targets over `rules x measures`, or
/// `None` for individual mode.
pub fn resolve_sets(
    joint: &JointSpec,
    rules: &[&str],
    measures: &[String],
) -> Result<Option<Vec<Vec<usize>>>> {
    let m = measures.len();
    let all = rules.len() * m;
    Ok(match joint {
        JointSpec::Individual => None,
        JointSpec::All => Some(vec![(0..all).collect()]),
        JointSpec::PerRule => Some(
            (0..rules.len())
                .map(|r| (r * m..(r + 1) * m).collect())
                .collect(),
        ),
        JointSpec::Sets(sets) => {
            let normalized: Vec<String> = measures.iter().map(|s| normalize_id(s)).collect();
            let mut out = Vec::with_capacity(sets.len());
            for set in sets {
                let mut indices = Vec::with_capacity(set.len());
                for item in set {
                    let Some((rule, measure)) = item.rsplit_once(':') else {
                        bail!("joint target `{item}` is not of the form rule:measure");
                    };
                    let Some(r) = rules.iter().position(|x| *x == rule.trim()) else {
                        bail!("joint target `{item}` names unknown rule `{}`", rule.trim());
                    };
                    let key = normalize_id(measure);
                    let Some(j) = normalized.iter().position(|x| *x == key) else {
                        bail!("joint target `{item}` uses measure `{measure}`, which is not among the requested measures");
                    };
                    let k = r * m + j;
                    if indices.contains(&k) {
                        bail!("joint target `{item}` is listed twice");
                    }
                    indices.push(k);
                }
                out.push(indices);
            }
            Some(out)
        }
    })
}
