use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use perfci_cli::args::{Cli, Command, OutputArgs};
use perfci_cli::{analyze_cmd, coverage_cmd, quantile_cmd, CmdOutput};

fn emit(out: &OutputArgs, result: anyhow::Result<CmdOutput>) -> anyhow::Result<u8> {
    let result = result?;
    match &out.output {
        Some(path) => std::fs::write(path, &result.text)?,
        None => std::io::stdout().write_all(result.text.as_bytes())?,
    }
    Ok(result.status.code())
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for partial failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match &cli.command {
        Command::Analyze(a) => emit(&a.out, analyze_cmd(a)),
        Command::Coverage(c) => emit(&c.out, coverage_cmd(c)),
        Command::Quantile(q) => emit(&q.out, quantile_cmd(q)),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
