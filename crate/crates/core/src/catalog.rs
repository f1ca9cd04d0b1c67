//! Ready-made problems with certified constants.
//!
//! | id                    | d | H(x, λ)                               | g(x)          |
//! |-----------------------|---|---------------------------------------|---------------|
//! | `eikonal-1d`          | 1 | `−|λ|`                                | `√(1 + x²)`   |
//! | `eikonal-1d-costed`   | 1 | `−|λ| + 0.1 sin x`                    | `√(1 + x²)`   |
//! | `eikonal-2d`          | 2 | `−|λ|`                                | `√(1 + |x|²)` |
//! | `smooth-quadratic-1d` | 1 | `1 − √(1 + λ²) + 0.1 (1 − cos x)`     | `√(1 + x²)`   |
//!
//! All use `T = 1` and the working box `[−4, 4]^d`.

use crate::error::{Error, Result};
use crate::linalg::{norm, scale};
use crate::problem::{
    hyperbolic_norm_smoothing, BoxDomain, Constants, ControlProblem, ExtendedReal, Hamiltonian,
    RunningCost, SmoothedForm, StateCost,
};

/// A named problem with notes on what is known in closed form.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub problem: ControlProblem,
    pub closed_form_notes: &'static str,
}

pub const IDS: [&str; 4] = [
    "eikonal-1d",
    "eikonal-1d-costed",
    "eikonal-2d",
    "smooth-quadratic-1d",
];

const HORIZON: f64 = 1.0;
const HALF_WIDTH: f64 = 4.0;

fn hyperbola() -> StateCost {
    StateCost::new(
        |x| (1.0 + norm(x).powi(2)).sqrt(),
        |x| scale(x, 1.0 / (1.0 + norm(x).powi(2)).sqrt()),
    )
}

/// `u(x, t) = √(1 + max(|x| − (T − t), 0)²)`: the nearest point of the
/// reachable ball to the origin.
fn hopf_lax_hyperbola(x: &[f64], t: f64) -> f64 {
    let r = (norm(x) - (HORIZON - t)).max(0.0);
    (1.0 + r * r).sqrt()
}

fn eikonal(id: &'static str, dim: usize) -> Result<ControlProblem> {
    ControlProblem::norm_cost(id, dim, 1.0, None)
        .description("unit-speed minimum time to the hyperbola")
        .horizon(HORIZON)
        .terminal_cost(hyperbola())
        .constants(Constants::new(1.0, 0.0, 1.0))
        .domain(BoxDomain::cube(dim, HALF_WIDTH))
        .exact_value(hopf_lax_hyperbola)
        .smooth_family(|delta| hyperbolic_norm_smoothing(1.0, None, delta))
        .build()
}

fn eikonal_costed() -> Result<ControlProblem> {
    let potential = StateCost::new(|x| 0.1 * x[0].sin(), |x| vec![0.1 * x[0].cos()]);
    let family_potential = potential.clone();
    ControlProblem::norm_cost("eikonal-1d-costed", 1, 1.0, Some(potential))
        .description("unit-speed eikonal with running cost 0.1 sin x")
        .smooth_family(move |delta| {
            hyperbolic_norm_smoothing(1.0, Some(family_potential.clone()), delta)
        })
        .horizon(HORIZON)
        .terminal_cost(hyperbola())
        .constants(Constants::new(1.0, 0.1, 1.0))
        .domain(BoxDomain::cube(1, HALF_WIDTH))
        .build()
}

fn smooth_quadratic() -> Result<ControlProblem> {
    let hamiltonian = Hamiltonian::new(
        |x, l| 1.0 - (1.0 + l[0] * l[0]).sqrt() + 0.1 * (1.0 - x[0].cos()),
        |_x, l| vec![-l[0] / (1.0 + l[0] * l[0]).sqrt()],
        |x, _l| vec![0.1 * x[0].sin()],
    );
    let running_cost = RunningCost::new(
        |x, a| {
            let s = 1.0 - a[0] * a[0];
            if s < 0.0 {
                ExtendedReal::PosInfinity
            } else {
                ExtendedReal::Finite(0.1 * (1.0 - x[0].cos()) + 1.0 - s.sqrt())
            }
        },
        |x, _a| vec![0.1 * x[0].sin()],
        |_x, a| vec![a[0] / (1.0 - a[0] * a[0]).sqrt()],
    );
    let (h, l) = (hamiltonian.clone(), running_cost.clone());
    ControlProblem::builder("smooth-quadratic-1d", 1)
        .description("differentiable Hamiltonian with bounded speed and a cosine potential")
        .horizon(HORIZON)
        .hamiltonian(hamiltonian)
        .running_cost(running_cost)
        .terminal_cost(hyperbola())
        .constants(Constants::new(1.0, 0.1, 1.0))
        .domain(BoxDomain::cube(1, HALF_WIDTH))
        .smooth_family(move |_delta| SmoothedForm {
            hamiltonian: h.clone(),
            running_cost: Some(l.clone()),
        })
        .build()
}

/// Look up a catalog problem by id.
pub fn get(id: &str) -> Result<CatalogEntry> {
    let entry = match id {
        "eikonal-1d" => CatalogEntry {
            id: "eikonal-1d",
            description: "H = -|lambda|, g = sqrt(1 + x^2), T = 1",
            problem: eikonal("eikonal-1d", 1)?,
            closed_form_notes: "u(x,t) = sqrt(1 + max(|x| - (T - t), 0)^2)",
        },
        "eikonal-1d-costed" => CatalogEntry {
            id: "eikonal-1d-costed",
            description: "H = -|lambda| + 0.1 sin x, g = sqrt(1 + x^2), T = 1",
            problem: eikonal_costed()?,
            closed_form_notes: "no closed form; use the grid oracle",
        },
        "eikonal-2d" => CatalogEntry {
            id: "eikonal-2d",
            description: "H = -|lambda|, g = sqrt(1 + |x|^2), T = 1, d = 2",
            problem: eikonal("eikonal-2d", 2)?,
            closed_form_notes: "u(x,t) = sqrt(1 + max(|x| - (T - t), 0)^2)",
        },
        "smooth-quadratic-1d" => CatalogEntry {
            id: "smooth-quadratic-1d",
            description: "H = 1 - sqrt(1 + lambda^2) + 0.1 (1 - cos x), g = sqrt(1 + x^2), T = 1",
            problem: smooth_quadratic()?,
            closed_form_notes: "no closed form; H is already smooth so H^delta = H",
        },
        other => return Err(Error::NotFound(other.to_string())),
    };
    Ok(entry)
}

/// All catalog entries in a fixed order.
pub fn list() -> Vec<CatalogEntry> {
    IDS.iter().map(|id| get(id).expect("catalog ids are valid")).collect()
}
