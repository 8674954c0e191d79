use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perfci::Choice;

#[derive(Debug, Parser)]
#[command(
    name = "perfci",
    version,
    about = "Simultaneous confidence intervals for classifier performance measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point estimates and intervals for a CSV of 0/1 predictions.
    Analyze(AnalyzeArgs),
    /// Coverage simulation from a config file or a preset.
    Coverage(CoverageArgs),
    /// Equicoordinate normal quantile for a correlation matrix.
    Quantile(QuantileArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct QuantileKnobs {
    /// Monte-Carlo draws for the joint quantile.
    #[arg(long, default_value_t = perfci::quantile::DEFAULT_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// CSV with a `z` column and one 0/1 column per rule.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Comma-separated measure ids, e.g. `accuracy,f_beta(0.5)`.
    #[arg(long, default_value = "accuracy,f1")]
    pub measures: String,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
    /// 1 = plain variance estimate, 2 = blurred.
    #[arg(long, default_value = "2", value_parser = parse_choice)]
    pub choice: Choice,
    /// `per-rule`, `all`, `individual`, or sets like `r1:accuracy,r2:f1;r3:f1`.
    #[arg(long, default_value = "per-rule")]
    pub joint: String,
    /// Clip interval ends to each measure's natural range.
    #[arg(long)]
    pub clamp: bool,
    #[command(flatten)]
    pub knobs: QuantileKnobs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Threshold rules on the two-class Gaussian mixture.
    Mixture,
    /// Weak rule on a rare-positive bootstrap population.
    RarePositive,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    /// TOML simulation config.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QuantileArgs {
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
    /// Inline matrix, rows separated by `;`, e.g. `1,0.3;0.3,1`.
    #[arg(
        long,
        conflicts_with = "corr_file",
        required_unless_present = "corr_file"
    )]
    pub corr: Option<String>,
    /// Headerless CSV file holding the matrix.
    #[arg(long)]
    pub corr_file: Option<PathBuf>,
    #[command(flatten)]
    pub knobs: QuantileKnobs,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let alpha: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(format!("alpha must lie in (0, 1), got {alpha}"))
    }
}

fn parse_choice(s: &str) -> Result<Choice, String> {
    s.parse::<u8>()
        .ok()
        .and_then(Choice::from_number)
        .ok_or_else(|| format!("choice must be 1 or 2, got `{s}`"))
}
