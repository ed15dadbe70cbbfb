use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stokeslab::harness::{
    self, cmd_fit, cmd_norms, cmd_report, cmd_run, exit_code, output_root, run_selftest, Corruption, ExperimentConfig,
    SelftestOptions, EXIT_OK, EXIT_RUNTIME, EXIT_TEST_FAILURE, EXIT_VALIDATION,
};
use stokeslab::normlab::OrliczSpec;

#[derive(Parser)]
#[command(
    name = "stokeslab",
    version,
    about = "Stochastic p-Stokes laboratory",
    after_help = "Relative output paths resolve under $STOKESLAB_OUTPUT_ROOT (default ./runs)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a key=value config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the `output` key.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Besov-Orlicz seminorms of the stored increment series.
    Norms {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated smoothness orders in (0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        alpha: Vec<f64>,
        /// Comma-separated Orlicz functions: phi2, nq<q>, l<q> or <q>.
        #[arg(long, value_delimiter = ',', default_value = "2,phi2")]
        orlicz: Vec<String>,
    },
    /// Fit temporal exponents to the stored seminorm reports.
    Fit {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Summarise a run directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Run the invariant batteries of every module.
    Selftest {
        #[arg(long, hide = true)]
        corrupt: Option<CorruptArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CorruptArg {
    Adjointness,
}

/// A run directory as given, or under the output root when it does not exist.
fn resolve_dir(dir: &Path) -> PathBuf {
    if dir.exists() || dir.is_absolute() {
        dir.to_path_buf()
    } else {
        output_root().join(dir)
    }
}

fn fail(err: &stokeslab::Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, output } => {
            let cfg = match ExperimentConfig::from_file(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_VALIDATION;
                }
            };
            let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
            let dir = output.unwrap_or_else(|| cfg.output_dir(stem));
            match cmd_run(&cfg, &dir) {
                Ok(outcome) => {
                    println!("{} -> {} ({})", cfg.kind.name(), outcome.dir.display(), outcome.manifest.status);
                    if !outcome.failed_paths.is_empty() {
                        for p in &outcome.manifest.paths {
                            if let Some(m) = &p.message {
                                eprintln!("path {}: {m}", p.index);
                            }
                        }
                        EXIT_RUNTIME
                    } else if outcome.manifest.status == "failed" {
                        EXIT_TEST_FAILURE
                    } else {
                        EXIT_OK
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Norms { dir, alpha, orlicz } => {
            let specs: Result<Vec<OrliczSpec>, _> = orlicz.iter().map(|s| s.parse()).collect();
            let specs = match specs {
                Ok(s) => s,
                Err(e) => return fail(&e),
            };
            match cmd_norms(resolve_dir(&dir), &alpha, &specs) {
                Ok(out) => {
                    println!("quantity alpha kind paths median_sup");
                    for ((q, a, k), v) in &out.sups {
                        println!("{q} {a} {k} {} {:.4e}", v.len(), harness::quantile(v, 0.5));
                    }
                    EXIT_OK
                }
                Err(e) => fail(&e),
            }
        }
        Command::Fit { dir } => match cmd_fit(resolve_dir(&dir)) {
            Ok(out) => {
                println!("quantity kind alpha paths median_slope");
                for ((q, k, a), v) in &out.slopes {
                    println!("{q} {k} {a} {} {:.4}", v.len(), harness::quantile(v, 0.5));
                }
                EXIT_OK
            }
            Err(e) => fail(&e),
        },
        Command::Report { dir } => match cmd_report(resolve_dir(&dir)) {
            Ok(text) => {
                print!("{text}");
                EXIT_OK
            }
            Err(e) => fail(&e),
        },
        Command::Selftest { corrupt } => {
            let report = run_selftest(&SelftestOptions {
                corrupt: corrupt.map(|CorruptArg::Adjointness| Corruption::Adjointness),
            });
            print!("{}", report.render());
            if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_TEST_FAILURE
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(execute(cli) as u8)
}
