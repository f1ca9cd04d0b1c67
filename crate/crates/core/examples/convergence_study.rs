//! A full `(Δt, δ)` sweep on the costed eikonal problem with the grid
//! oracle, both routes, and the report files.
//!
//! `cargo run --release --example convergence_study [out-dir]`

use std::path::PathBuf;

use sympont::harness::{run_sweep, ExperimentSpec, OracleChoice, RouteChoice};

fn main() -> sympont::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("convergence_study"));
    let spec = ExperimentSpec {
        oracle: OracleChoice::Grid,
        route: RouteChoice::Both,
        output_dir: Some(out.clone()),
        ..ExperimentSpec::new(
            "eikonal-1d-costed",
            vec![2.0],
            vec![0.1, 0.05, 0.025, 0.0125],
            vec![1e-2, 1e-4, 1e-6],
        )
    };
    let report = run_sweep(&spec)?;
    print!("{}", report.summary());
    println!("reports in {}", out.display());
    std::process::exit(report.exit_code());
}
