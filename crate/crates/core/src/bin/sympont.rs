use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sympont::catalog;
use sympont::harness::{run_sweep, ExperimentSpec, OracleChoice, RouteChoice};
use sympont::problem::verify_constants;

#[derive(Parser)]
#[command(name = "sympont", version, about = "Symplectic Pontryagin approximations of HJB value functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Exact,
    Grid,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Tpbvp,
    Variational,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (dt, delta) sweep and write cells.csv, summary.txt and plots.
    Run {
        #[arg(long)]
        problem: String,
        /// Start point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x0: Vec<f64>,
        /// Step sizes, comma separated and strictly decreasing.
        #[arg(long, value_delimiter = ',', required = true)]
        dt: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[arg(long, value_enum, default_value = "exact")]
        oracle: OracleArg,
        #[arg(long, value_enum, default_value = "tpbvp")]
        route: RouteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List catalog problems.
    ListProblems,
    /// Check the declared constants of a catalog problem by sampling.
    VerifyConstants {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> sympont::Result<u8> {
    match cli.command {
        Command::ListProblems => {
            for entry in catalog::list() {
                println!("{:<22} {}", entry.id, entry.description);
            }
            Ok(0)
        }
        Command::VerifyConstants { problem, samples, seed } => {
            let p = catalog::get(&problem)?.problem;
            let report = verify_constants(&p, samples, seed)?;
            print!("{report}");
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Run {
            problem,
            x0,
            dt,
            delta,
            oracle,
            route,
            seed,
            out,
        } => {
            let spec = ExperimentSpec {
                oracle: match oracle {
                    OracleArg::Exact => OracleChoice::Exact,
                    OracleArg::Grid => OracleChoice::Grid,
                    OracleArg::Both => OracleChoice::Both,
                },
                route: match route {
                    RouteArg::Tpbvp => RouteChoice::Tpbvp,
                    RouteArg::Variational => RouteChoice::Variational,
                    RouteArg::Both => RouteChoice::Both,
                },
                seed,
                output_dir: Some(out),
                ..ExperimentSpec::new(problem, x0, dt, delta)
            };
            let report = run_sweep(&spec)?;
            print!("{}", report.summary());
            Ok(report.exit_code() as u8)
        }
    }
}
