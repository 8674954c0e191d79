//! The `perfci` command: `analyze`, `coverage` and `quantile`.
//!
//! Each subcommand is also callable as a function returning the rendered
//! report, which is what the binary prints.

pub mod args;
pub mod config;
pub mod report;
pub mod targets;

use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use perfci::quantile::QuantileRequest;
use perfci::{
    analyze, max_abs_quantile, run_coverage, BinaryDataset, Catalog, CorrelationMatrix, Error,
    EvaluationTarget, IntervalSpec, Matrix, Mode, SimConfig, TargetInterval,
};

use crate::args::{AnalyzeArgs, CoverageArgs, Format, Preset, QuantileArgs};
use crate::config::FileConfig;
use crate::report::{QuantileReport, SetReport};
use crate::targets::{resolve_sets, split_top_level, JointSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Some targets have no interval.
    Partial,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutput {
    pub status: Status,
    pub text: String,
}

fn read_dataset(path: &Path) -> Result<BinaryDataset> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    BinaryDataset::from_csv(file).with_context(|| format!("reading {}", path.display()))
}

fn failed_set(targets: &[EvaluationTarget], failures: &[(usize, Error)]) -> SetReport {
    SetReport {
        meta: None,
        targets: failures
            .iter()
            .map(|(k, e)| TargetInterval {
                rule: targets[*k].rule.clone(),
                measure: targets[*k].measure.clone(),
                estimate: None,
                lower: None,
                upper: None,
                half_width: None,
                error: Some(e.to_string()),
            })
            .collect(),
    }
}

pub fn analyze_cmd(args: &AnalyzeArgs) -> Result<CmdOutput> {
    let data = read_dataset(&args.input)?;
    let measures: Vec<String> = split_top_level(&args.measures)
        .into_iter()
        .map(str::to_string)
        .collect();
    if measures.is_empty() {
        bail!("no measures requested");
    }
    let catalog = Catalog::default();
    for m in &measures {
        catalog.get(m)?;
    }
    let rules: Vec<&str> = data.rule_ids().collect();
    let m_refs: Vec<&str> = measures.iter().map(String::as_str).collect();
    let targets = EvaluationTarget::cross(&rules, &m_refs);

    let joint = JointSpec::parse(&args.joint)?;
    let (mode, sets) = match resolve_sets(&joint, &rules, &measures)? {
        Some(sets) => (Mode::Joint, sets),
        None => (Mode::Individual, vec![(0..targets.len()).collect()]),
    };

    let mut reports = Vec::with_capacity(sets.len());
    for set in sets {
        let spec = IntervalSpec::new(args.alpha, mode, args.choice, set)
            .quantile_knobs(args.knobs.draws, args.knobs.seed)
            .clamped(args.clamp);
        match analyze(&data, &targets, &spec, &catalog) {
            Ok(r) => reports.push(SetReport {
                meta: Some(r.meta),
                targets: r.targets,
            }),
            Err(Error::AllTargetsFailed(failures)) => reports.push(failed_set(&targets, &failures)),
            Err(e) => return Err(e.into()),
        }
    }

    if reports.iter().all(|r| r.meta.is_none()) {
        let msgs: Vec<String> = reports
            .iter()
            .flat_map(|r| &r.targets)
            .map(|t| {
                format!(
                    "{}:{}: {}",
                    t.rule,
                    t.measure,
                    t.error.as_deref().unwrap_or("")
                )
            })
            .collect();
        bail!("every target failed\n  {}", msgs.join("\n  "));
    }
    let partial = reports
        .iter()
        .flat_map(|r| &r.targets)
        .any(|t| t.error.is_some());
    let text = match args.out.format {
        Format::Json if reports.len() == 1 => report::to_json(&reports[0]),
        Format::Json => report::to_json(&reports),
        Format::Table => {
            let rules: Vec<String> = rules.iter().map(|r| r.to_string()).collect();
            report::analyze_table(&reports, &rules, &measures)
        }
    };
    Ok(CmdOutput {
        status: if partial {
            Status::Partial
        } else {
            Status::Success
        },
        text,
    })
}

pub fn load_sim_config(args: &CoverageArgs) -> Result<SimConfig> {
    let mut config = match (&args.config, args.preset) {
        (Some(path), _) => FileConfig::from_path(path)?,
        (None, Some(Preset::Mixture)) => SimConfig::mixture_thresholds(0),
        (None, Some(Preset::RarePositive)) => SimConfig::rare_positive(0),
        (None, None) => bail!("either --config or --preset is required"),
    };
    if let Some(r) = args.replications {
        config.replications = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(d) = args.draws {
        config.draws = d;
    }
    Ok(config)
}

pub fn coverage_cmd(args: &CoverageArgs) -> Result<CmdOutput> {
    let config = load_sim_config(args)?;
    let result = run_coverage(&config, &Catalog::default())?;
    let text = match args.out.format {
        Format::Json => report::to_json(&result),
        Format::Table => report::coverage_table(&result),
    };
    Ok(CmdOutput {
        status: Status::Success,
        text,
    })
}

/// Rows separated by `;` or newlines, entries by `,`.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let rows = text
        .split([';', '\n'])
        .map(str::trim)
        .filter(|row| !row.is_empty())
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .with_context(|| format!("bad matrix entry `{}`", x.trim()))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        bail!("empty correlation matrix");
    }
    Ok(Matrix::from_rows(&rows)?)
}

pub fn quantile_cmd(args: &QuantileArgs) -> Result<CmdOutput> {
    let text = match (&args.corr, &args.corr_file) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, None) => bail!("either --corr or --corr-file is required"),
    };
    let r = CorrelationMatrix::new(parse_matrix(&text)?)?;
    let dim = r.dim();
    let req = QuantileRequest::new(args.alpha, r)
        .draws(args.knobs.draws)
        .seed(args.knobs.seed);
    let report = QuantileReport {
        alpha: args.alpha,
        dim,
        seed: args.knobs.seed,
        result: max_abs_quantile(&req)?,
    };
    let text = match args.out.format {
        Format::Json => report::to_json(&report),
        Format::Table => report::quantile_table(&report),
    };
    Ok(CmdOutput {
        status: Status::Success,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_parsing() {
        let m = parse_matrix("1, 0.5; 0.5, 1").unwrap();
        assert_eq!(m.rows(), vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        assert_eq!(parse_matrix("1,0\n0,1\n").unwrap(), Matrix::identity(2));
        assert!(parse_matrix("1,x;0,1").is_err());
        assert!(parse_matrix("1,0;0").is_err());
        assert!(parse_matrix("").is_err());
    }
}
