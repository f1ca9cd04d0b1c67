//! The Pontryagin route and direct minimization of the discrete cost give
//! the same value; exhaustive search over a control grid bounds it above.

use sympont::catalog;
use sympont::problem::{regularize, RegularizationMethod};
use sympont::variational::brute_force_value;
use sympont::{minimize_j, solve_tpbvp, SweepOptions, VariationalOptions};

fn main() -> sympont::Result<()> {
    println!("{:<22} {:>3} {:>16} {:>16} {:>16}", "problem", "N", "tpbvp", "minimize J", "brute force");
    for entry in catalog::list() {
        let p = &entry.problem;
        let h = regularize(p, 1e-3, RegularizationMethod::ProblemSupplied)?;
        let x = vec![1.5; p.dim()];
        for n in [1, 2, 4, 8] {
            let t = solve_tpbvp(&h, &x, n, &SweepOptions::default())?;
            let v = minimize_j(&h, &x, 0, n, &VariationalOptions::default())?;
            let brute = if p.dim() == 1 && n <= 2 {
                format!("{:>16.12}", brute_force_value(&h, &x, n, 201)?)
            } else {
                format!("{:>16}", "-")
            };
            println!("{:<22} {n:>3} {:>16.12} {:>16.12} {brute}", entry.id, t.value, v.value);
        }
    }
    Ok(())
}
