//! Numerical Legendre transforms on the smooth catalog problem: compute
//! `L` from `H`, compare with the closed form, then recover `H` from it.

use sympont::catalog;
use sympont::problem::{recover_hamiltonian_with, running_cost_numeric, CostSource};

fn main() -> sympont::Result<()> {
    let p = catalog::get("smooth-quadratic-1d")?.problem;
    let analytic = p.running_cost().expect("catalog entry carries L");
    let x = [0.7];

    println!("{:>6} {:>14} {:>14}", "alpha", "L numeric", "L analytic");
    for a in [-0.9, -0.5, 0.0, 0.3, 0.8] {
        let num = running_cost_numeric(&p, &x, &[a], None)?;
        println!("{a:>6} {:>14.10} {:>14.10}", num.value.to_f64(), analytic.value(&x, &[a]).to_f64());
    }
    // outside the control ball the supremum runs off to infinity
    let outside = running_cost_numeric(&p, &x, &[1.5], None)?;
    println!("L(0.7, 1.5) = {:?}", outside.value);

    println!("\n{:>6} {:>14} {:>14}", "lambda", "H", "H from L");
    for l in [-3.0, -0.4, 0.0, 1.2] {
        let back = recover_hamiltonian_with(&p, &x, &[l], 1.0, CostSource::Numeric)?;
        println!("{l:>6} {:>14.10} {:>14.10}", p.hamiltonian().value(&x, &[l]), back);
    }
    Ok(())
}
