//! Binary test sets and their sample moment triples.

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MomentTriple;

/// Name of the ground-truth column in tabular input.
pub const TRUTH_COLUMN: &str = "z";

/// A header plus string cells, exactly as read from a delimited file.
#[derive(Debug, Clone, Default)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.iter().map(str::to_string).collect();
        let rows = rdr
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self { header, rows })
    }
}

/// Ground truth `z` and the 0/1 predictions of one or more rules on the
/// same `n` test rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    z: Vec<u8>,
    rules: Vec<(String, Vec<u8>)>,
}

impl BinaryDataset {
    pub fn new(z: Vec<u8>, rules: Vec<(String, Vec<u8>)>) -> Result<Self> {
        let n = z.len();
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        if rules.is_empty() {
            return Err(Error::NoRules);
        }
        check_binary(TRUTH_COLUMN, &z)?;
        let mut seen = HashSet::new();
        for (id, preds) in &rules {
            if id == TRUTH_COLUMN || !seen.insert(id.as_str()) {
                return Err(Error::DuplicateRuleId(id.clone()));
            }
            if preds.len() != n {
                return Err(Error::LengthMismatch {
                    what: format!("column `{id}`"),
                    expected: n,
                    found: preds.len(),
                });
            }
            check_binary(id, preds)?;
        }
        Ok(Self { z, rules })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        validate(&RawTable::from_csv(reader)?)
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn truth(&self) -> &[u8] {
        &self.z
    }

    pub fn rule_ids(&self) -> impl Iterator<Item = &str> {
        self.rules.iter().map(|(id, _)| id.as_str())
    }

    pub fn num_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn rule_index(&self, rule_id: &str) -> Result<usize> {
        self.rules
            .iter()
            .position(|(id, _)| id == rule_id)
            .ok_or_else(|| Error::UnknownRule(rule_id.to_string()))
    }

    pub fn predictions(&self, rule_id: &str) -> Result<&[u8]> {
        Ok(&self.rules[self.rule_index(rule_id)?].1)
    }

    pub(crate) fn predictions_at(&self, index: usize) -> &[u8] {
        &self.rules[index].1
    }

    /// Rows `indices` of this dataset, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let pick = |col: &[u8]| indices.iter().map(|&i| col[i]).collect::<Vec<_>>();
        let rules = self
            .rules
            .iter()
            .map(|(id, col)| (id.clone(), pick(col)))
            .collect();
        Self::new(pick(&self.z), rules)
    }
}

fn check_binary(column: &str, values: &[u8]) -> Result<()> {
    match values.iter().position(|&v| v > 1) {
        Some(row) => Err(Error::NonBinaryValue {
            row: row + 1,
            column: column.to_string(),
            value: values[row].to_string(),
        }),
        None => Ok(()),
    }
}

fn parse_cell(cell: &str) -> Option<u8> {
    match cell {
        "0" | "0.0" => Some(0),
        "1" | "1.0" => Some(1),
        _ => None,
    }
}

/// Checks a raw table and converts it into a [`BinaryDataset`].
///
/// Rows are numbered from 1 (the first data row after the header). Cells must
/// be `0`, `1`, `0.0` or `1.0`; no thresholding is applied.
pub fn validate(raw: &RawTable) -> Result<BinaryDataset> {
    let mut seen = HashSet::new();
    for name in &raw.header {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateRuleId(name.clone()));
        }
    }
    let truth_col = raw
        .header
        .iter()
        .position(|h| h == TRUTH_COLUMN)
        .ok_or(Error::MissingTruthColumn)?;
    if raw.header.len() < 2 {
        return Err(Error::NoRules);
    }
    if raw.rows.len() < 2 {
        return Err(Error::TooFewRows(raw.rows.len()));
    }

    let width = raw.header.len();
    let mut columns = vec![Vec::with_capacity(raw.rows.len()); width];
    for (r, row) in raw.rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::LengthMismatch {
                what: format!("row {}", r + 1),
                expected: width,
                found: row.len(),
            });
        }
        for (c, cell) in row.iter().enumerate() {
            let v = parse_cell(cell).ok_or_else(|| Error::NonBinaryValue {
                row: r + 1,
                column: raw.header[c].clone(),
                value: cell.clone(),
            })?;
            columns[c].push(v);
        }
    }

    let z = std::mem::take(&mut columns[truth_col]);
    let rules = raw
        .header
        .iter()
        .zip(columns)
        .enumerate()
        .filter(|(c, _)| *c != truth_col)
        .map(|(_, (name, col))| (name.clone(), col))
        .collect();
    BinaryDataset::new(z, rules)
}

/// Integer cell counts behind a moment triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentCounts {
    pub n: usize,
    pub za: usize,
    pub a: usize,
    pub z: usize,
}

impl MomentCounts {
    pub fn triple(&self) -> MomentTriple {
        MomentTriple::from_counts(self.za, self.a, self.z, self.n)
    }
}

pub(crate) fn count_columns(z: &[u8], a: &[u8]) -> MomentCounts {
    let mut counts = MomentCounts {
        n: z.len(),
        za: 0,
        a: 0,
        z: 0,
    };
    for (&zi, &ai) in z.iter().zip(a) {
        counts.za += (zi & ai) as usize;
        counts.a += ai as usize;
        counts.z += zi as usize;
    }
    counts
}

pub fn compute_counts(data: &BinaryDataset, rule_id: &str) -> Result<MomentCounts> {
    Ok(count_columns(data.truth(), data.predictions(rule_id)?))
}

/// `(E_n[ZA], E_n[A], E_n[Z])` for one rule.
pub fn compute_moments(data: &BinaryDataset, rule_id: &str) -> Result<MomentTriple> {
    compute_counts(data, rule_id).map(|c| c.triple())
}

/// A `(rule, measure)` pair. Its position in a target list is its index `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvaluationTarget {
    pub rule: String,
    pub measure: String,
}

impl EvaluationTarget {
    pub fn new(rule: impl Into<String>, measure: impl Into<String>) -> Self {
        Self {
            rule: rule.into(),
            measure: measure.into(),
        }
    }

    /// Every rule crossed with every measure, rule-major.
    pub fn cross(rules: &[&str], measures: &[&str]) -> Vec<Self> {
        rules
            .iter()
            .flat_map(|r| measures.iter().map(move |m| Self::new(*r, *m)))
            .collect()
    }
}

impl std::fmt::Display for EvaluationTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.rule, self.measure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(header: &[&str], rows: &[&[&str]]) -> RawTable {
        RawTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }

    #[test]
    fn toy_moments() {
        let data =
            BinaryDataset::new(vec![1, 1, 0, 0], vec![("a".into(), vec![1, 0, 1, 0])]).unwrap();
        let m = compute_moments(&data, "a").unwrap();
        assert_eq!((m.za, m.a, m.z), (0.25, 0.5, 0.5));

        let disjoint = BinaryDataset::new(vec![1, 0], vec![("a".into(), vec![0, 1])]).unwrap();
        let m = compute_moments(&disjoint, "a").unwrap();
        assert_eq!((m.za, m.a, m.z), (0.0, 0.5, 0.5));

        let z = vec![1, 0, 0, 1, 1];
        let perfect = BinaryDataset::new(z.clone(), vec![("p".into(), z)]).unwrap();
        let m = compute_moments(&perfect, "p").unwrap();
        assert_eq!((m.za, m.a, m.z), (0.6, 0.6, 0.6));

        assert!(matches!(
            compute_moments(&perfect, "q"),
            Err(Error::UnknownRule(_))
        ));
    }

    #[test]
    fn validate_reports_first_offending_cell() {
        let raw = table(
            &["z", "r1", "r2"],
            &[&["1", "0", "1"], &["0", "2", "1"], &["0", "1", "x"]],
        );
        assert_eq!(
            validate(&raw),
            Err(Error::NonBinaryValue {
                row: 2,
                column: "r1".into(),
                value: "2".into()
            })
        );

        let single = table(&["z", "r1"], &[&["1", "0"]]);
        assert_eq!(validate(&single), Err(Error::TooFewRows(1)));

        let ragged = table(&["z", "r1"], &[&["1", "0"], &["1"]]);
        assert!(matches!(
            validate(&ragged),
            Err(Error::LengthMismatch { .. })
        ));

        let dup = table(&["z", "r1", "r1"], &[&["1", "0", "0"], &["0", "0", "0"]]);
        assert_eq!(validate(&dup), Err(Error::DuplicateRuleId("r1".into())));

        let no_truth = table(&["y", "r1"], &[&["1", "0"], &["0", "0"]]);
        assert_eq!(validate(&no_truth), Err(Error::MissingTruthColumn));
    }

    #[test]
    fn validate_accepts_well_formed_table() {
        let raw = table(
            &["r1", "z", "r2"],
            &[
                &["1", "1", "0.0"],
                &["0", "1", "1.0"],
                &["1", "0", "1"],
                &["0", "0", "0"],
            ],
        );
        let data = validate(&raw).unwrap();
        assert_eq!(data.n(), 4);
        assert_eq!(data.rule_ids().collect::<Vec<_>>(), ["r1", "r2"]);
        assert_eq!(data.truth(), &[1, 1, 0, 0]);
        assert_eq!(data.predictions("r2").unwrap(), &[0, 1, 1, 0]);
    }

    #[test]
    fn csv_input() {
        let text = "z,knn,logistic\n1,1,1\n0,1,0\n1,0,1\n";
        let data = BinaryDataset::from_csv(text.as_bytes()).unwrap();
        assert_eq!(data.n(), 3);
        let m = compute_moments(&data, "logistic").unwrap();
        assert_eq!(m.za, 2.0 / 3.0);

        let bad = "z,a\n1,yes\n0,1\n";
        assert!(matches!(
            BinaryDataset::from_csv(bad.as_bytes()),
            Err(Error::NonBinaryValue { row: 1, .. })
        ));
    }

    #[test]
    fn cross_is_rule_major() {
        let t = EvaluationTarget::cross(&["a", "b"], &["f1", "accuracy"]);
        let names: Vec<_> = t.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, ["a:f1", "a:accuracy", "b:f1", "b:accuracy"]);
    }
}
