//! Semi-Lagrangian dynamic programming against closed forms, and the
//! two-level grid reference on a problem without one.

use sympont::catalog;
use sympont::oracle::{exact_value, grid_reference, solve_grid_dp, GridOracleConfig, GridSpec};

fn main() -> sympont::Result<()> {
    let p = catalog::get("eikonal-2d")?.problem;
    let grid = GridSpec::cube(2, -4.0, 4.0, 81)?;
    let u = solve_grid_dp(&p, &grid, 4, 64)?;
    println!("{:>14} {:>12} {:>12}", "x", "grid", "exact");
    for x in [[0.0, 0.0], [1.5, 1.0], [-2.0, 0.5], [0.3, -2.4]] {
        println!(
            "{:>14} {:>12.6} {:>12.6}",
            format!("{x:?}"),
            u.value_at(&x, 0)?,
            exact_value(&p, &x, 0.0).unwrap()
        );
    }
    let out = std::env::temp_dir().join("eikonal_2d_grid.csv");
    u.export(&out)?;
    println!("value function written to {}", out.display());

    let q = catalog::get("eikonal-1d-costed")?.problem;
    let r = grid_reference(&q, &[2.0], &GridOracleConfig::for_problem(&q))?;
    println!("\neikonal-1d-costed at x = 2: {:.10} +/- {:.1e}", r.value, r.accuracy);
    Ok(())
}
