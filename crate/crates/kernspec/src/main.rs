use clap::{Parser, Subcommand};
use kernspec::harness::{self, ReferenceStrategy};
use kernspec::linalg::{sym_eig, SymMatrix, DEFAULT_RANK_TOL};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral KRR diagnostics and experiment harness.
#[derive(Parser)]
#[command(name = "kernspec", version, about)]
struct Cli {
    /// Worker threads for parallel sweep cells (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory override (also settable via KERNSPEC_OUTPUT_DIR).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config file: list resolved defaults and all errors.
    Validate { config: PathBuf },
    /// Run an experiment config; writes results.csv, summary.json and
    /// manifest.json.
    Run {
        config: PathBuf,
        /// Restore the full-size grids where desk-scale defaults shrink them.
        #[arg(long)]
        full_scale: bool,
    },
    /// Evaluate the perturbation bound against a reference kernel; writes
    /// bound_report.json.
    Bound {
        config: PathBuf,
        /// How the reference sample is drawn.
        #[arg(long, value_enum)]
        reference: ReferenceStrategy,
    },
    /// Print the eigenvalues of a symmetric matrix stored as numeric CSV.
    Eig { matrix: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), harness::HarnessError> {
    match cli.command {
        Command::Validate { config } => {
            let report = harness::validate_file(&config, false)?;
            for note in &report.notes {
                println!("resolved: {note}");
            }
            if report.errors.is_empty() {
                println!("valid");
                Ok(())
            } else {
                for err in &report.errors {
                    eprintln!("invalid: {err}");
                }
                Err(harness::HarnessError::Config(format!(
                    "{} problem(s) found in {}",
                    report.errors.len(),
                    config.display()
                )))
            }
        }
        Command::Run { config, full_scale } => {
            let parsed = harness::parse_config(&config)?;
            let report = harness::resolve(&parsed, full_scale, cli.output_dir.as_deref());
            let Some(resolved) = report.resolved else {
                for err in &report.errors {
                    eprintln!("invalid: {err}");
                }
                return Err(harness::HarnessError::Config(format!(
                    "{} problem(s) found in {}",
                    report.errors.len(),
                    config.display()
                )));
            };
            let artifacts = harness::run(&resolved)?;
            println!("wrote {}", artifacts.results_csv.display());
            println!("wrote {}", artifacts.summary_json.display());
            println!("wrote {}", artifacts.manifest_json.display());
            Ok(())
        }
        Command::Bound { config, reference } => {
            let parsed = harness::parse_config(&config)?;
            let report = harness::resolve(&parsed, false, cli.output_dir.as_deref());
            let Some(resolved) = report.resolved else {
                for err in &report.errors {
                    eprintln!("invalid: {err}");
                }
                return Err(harness::HarnessError::Config(format!(
                    "{} problem(s) found in {}",
                    report.errors.len(),
                    config.display()
                )));
            };
            let path = harness::run_bound(&resolved, reference)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Eig { matrix } => {
            let ds = kernspec::data::load_csv(&matrix, false)
                .map_err(|e| harness::HarnessError::Config(e.to_string()))?;
            let sym = SymMatrix::new(ds.features)
                .map_err(|e| harness::HarnessError::Config(e.to_string()))?;
            let eig = sym_eig(&sym, DEFAULT_RANK_TOL)?;
            for v in &eig.values {
                println!("{v}");
            }
            Ok(())
        }
    }
}
