//! Coarse symplectic solves against a fine-step reference flow on the
//! smooth problem.

use sympont::catalog;
use sympont::oracle::continuous_hamiltonian_flow;
use sympont::problem::{regularize, RegularizationMethod};
use sympont::{solve_tpbvp, SweepOptions};

fn main() -> sympont::Result<()> {
    let p = catalog::get("smooth-quadratic-1d")?.problem;
    let h = regularize(&p, 1e-6, RegularizationMethod::ProblemSupplied)?;
    let x = [2.0];
    let fine = continuous_hamiltonian_flow(&h, &x, 20_000)?;
    println!("reference value {:.10}, x(T) = {:.8}", fine.value, fine.states.last().unwrap()[0]);
    println!("{:>5} {:>14} {:>12}", "N", "value", "difference");
    for n in [5, 10, 20, 40, 80] {
        let t = solve_tpbvp(&h, &x, n, &SweepOptions::default())?;
        println!("{n:>5} {:>14.10} {:>12.3e}", t.value, t.value - fine.value);
    }
    Ok(())
}
