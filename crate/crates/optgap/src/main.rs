use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optgap::commands::{self, Outcome};
use optgap::config::{apply_step_budget_env, ExperimentConfig, Format};
use optgap::CliError;

#[derive(Debug, Parser)]
#[command(name = "optgap", version, about = "Optimizer gap tables, solver fooling and condition checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List families with their gap, norm, boundary parameter and solvers.
    List,
    /// Tabulate optimizers, values and cross-side distances along the path.
    Gap { family: String },
    /// Build a fooling pair for a solver and report its errors.
    Fool { family: String, solver: Option<String> },
    /// Check the seven hypotheses on path samples.
    Validate { family: String },
}

#[derive(Debug, Args)]
struct Options {
    /// Digit level at which solvers read their input.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Iteration budget for iterative solvers.
    #[arg(long, global = true)]
    iters: Option<u32>,
    /// Tolerance as p/q or a decimal.
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Seed recorded in every report.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Path samples per side for `validate`.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Number of dyadic exponents in the gap grid.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// JSON experiment configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit JSON only (and print JSON for `list`).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV only.
    #[arg(long, global = true)]
    csv: bool,
}

impl Options {
    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.precision {
            c.precision = v;
        }
        if let Some(v) = self.iters {
            c.iterations = v;
        }
        if let Some(v) = &self.tol {
            c.tol = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out_dir = v.clone();
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = self.depth {
            c.gap_depth = v;
        }
        if self.json {
            c.formats = vec![Format::Json];
        } else if self.csv {
            c.formats = vec![Format::Csv];
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    apply_step_budget_env()?;
    if let Command::List = cli.command {
        return commands::list(cli.options.json);
    }
    let config = cli.options.config()?;
    match &cli.command {
        Command::List => unreachable!("handled above"),
        Command::Gap { family } => commands::gap(commands::parse_family(family)?, &config),
        Command::Fool { family, solver } => commands::fool(commands::parse_family(family)?, solver.as_deref(), &config),
        Command::Validate { family } => commands::validate(commands::parse_family(family)?, &config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for path in &outcome.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("optgap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
