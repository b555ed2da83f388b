use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use l0dual::io::{emit_report, parse_grid_spec, parse_instance, run, Command, Format, IoError, RunOptions};

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

/// Scenario-wise convex duality on instance files.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// conjugate, solve, check-young-fenchel, check-moreau-rockafellar,
    /// check-optimality, farkas or probe-regularity.
    #[arg(long)]
    command: String,
    /// Overrides the instance tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// One-dimensional dual grid `lo:hi:n`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Worker threads. Affects speed only.
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(cli: &Cli) -> Result<(Vec<u8>, i32), IoError> {
    let cmd: Command = cli.command.parse()?;
    let grid = cli.grid.as_deref().map(parse_grid_spec).transpose()?;
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(IoError::Usage(format!("tolerance {t} must be finite and nonnegative")));
        }
    }
    let inst = parse_instance(&cli.instance)?;
    let opts = RunOptions { tol: cli.tol, grid };
    let report = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| IoError::Usage(e.to_string()))?
            .install(|| run(&inst, cmd, &opts))?,
        None => run(&inst, cmd, &opts)?,
    };
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Text => Format::Text,
    };
    Ok((emit_report(&report, format), report.exit_code()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((bytes, code)) => {
            let _ = std::io::stdout().write_all(&bytes);
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(IoError::EXIT_CODE as u8)
        }
    }
}
