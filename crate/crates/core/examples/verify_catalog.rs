//! Sample every catalog problem and check its declared constants,
//! concavity in `λ` and analytic gradients.

use sympont::catalog;
use sympont::problem::verify_constants;

fn main() -> sympont::Result<()> {
    let mut ok = true;
    for entry in catalog::list() {
        let report = verify_constants(&entry.problem, 10_000, 0)?;
        println!("{report}");
        ok &= report.passed();
    }
    if !ok {
        std::process::exit(1);
    }
    Ok(())
}
