//! Define a problem outside the catalog with the builder: a 1-D control
//! problem with quadratic-like cost `L(α) = 1 − √(1 − α²)` steering
//! towards the minimum of `g(x) = log cosh x`.

use sympont::problem::{ControlProblem, Constants, ExtendedReal, Hamiltonian, RunningCost, StateCost};
use sympont::problem::{regularize, verify_constants, RegularizationMethod};
use sympont::{minimize_j, solve_tpbvp, SweepOptions, VariationalOptions};

fn main() -> sympont::Result<()> {
    let p = ControlProblem::builder("logcosh", 1)
        .description("H = 1 - sqrt(1 + lambda^2), g = log cosh x")
        .hamiltonian(Hamiltonian::new(
            |_x, l| 1.0 - (1.0 + l[0] * l[0]).sqrt(),
            |_x, l| vec![-l[0] / (1.0 + l[0] * l[0]).sqrt()],
            |_x, _l| vec![0.0],
        ))
        .running_cost(RunningCost::new(
            |_x, a| {
                let s = 1.0 - a[0] * a[0];
                if s < 0.0 { ExtendedReal::PosInfinity } else { ExtendedReal::Finite(1.0 - s.sqrt()) }
            },
            |_x, _a| vec![0.0],
            |_x, a| vec![a[0] / (1.0 - a[0] * a[0]).sqrt()],
        ))
        .terminal_cost(StateCost::new(|x| x[0].cosh().ln(), |x| vec![x[0].tanh()]))
        .constants(Constants::new(1.0, 0.0, 1.0))
        .horizon(2.0)
        .build()?;

    let report = verify_constants(&p, 5_000, 1)?;
    println!("{report}");

    let h = regularize(&p, 1e-6, RegularizationMethod::ProblemSupplied)?;
    let t = solve_tpbvp(&h, &[1.0], 16, &SweepOptions::default())?;
    let v = minimize_j(&h, &[1.0], 0, 16, &VariationalOptions::default())?;
    println!("tpbvp {:.12}, minimize J {:.12}", t.value, v.value);
    println!("final state {:.6}", t.states.last().unwrap()[0]);
    Ok(())
}
