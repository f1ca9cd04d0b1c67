//! Solve the symplectic forward–backward system for the 1-D eikonal
//! problem from `x = 2` and write the trajectory to CSV.
//!
//! `cargo run --example eikonal_tpbvp [out.csv]`

use std::path::PathBuf;

use sympont::catalog;
use sympont::oracle::exact_value;
use sympont::problem::{regularize, RegularizationMethod};
use sympont::{solve_tpbvp, SweepOptions};

fn main() -> sympont::Result<()> {
    let p = catalog::get("eikonal-1d")?.problem;
    let h = regularize(&p, 1e-4, RegularizationMethod::ProblemSupplied)?;
    let t = solve_tpbvp(&h, &[2.0], 20, &SweepOptions::default())?;

    println!("{:>4} {:>8} {:>12} {:>12}", "n", "t", "x", "lambda");
    for n in (0..=t.steps).step_by(4) {
        println!("{n:>4} {:>8.3} {:>12.8} {:>12.8}", t.time(n), t.states[n][0], t.duals[n][0]);
    }
    let exact = exact_value(&p, &[2.0], 0.0).unwrap();
    println!("discrete value {:.10}, exact {:.10}", t.value, exact);
    println!("sweeps {}, residual {:.1e}, route {:?}", t.diagnostics.sweeps, t.diagnostics.residual, t.diagnostics.route);

    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("eikonal_tpbvp.csv"));
    t.write_csv(&out)?;
    println!("trajectory written to {}", out.display());
    Ok(())
}
