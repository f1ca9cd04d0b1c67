//! Numerical Legendre–Fenchel transforms between `H` and `L`.

use super::{evaluation_error, ControlProblem, ExtendedReal, Hamiltonian, RunningCost};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, project_ball, sub};

/// Outward slope of `−α·λ + H` at the boundary of the search ball above
/// which the supremum is declared infinite.
pub const RECESSION_SLOPE_TOL: f64 = 1e-6;

const MAX_ITERS: usize = 2000;
/// The outer search of a round trip pays a full conjugation per step.
const OUTER_ITERS: usize = 200;
const SIGMA: f64 = 1e-4;
/// Projected-gradient step length below which a search stops.
const STATIONARY: f64 = 1e-12;

/// Result of a numerical conjugation: the value and the best point found.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugatePoint {
    pub value: ExtendedReal,
    pub argmax: Vec<f64>,
}

/// Which representation of `L` to use when recovering `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CostSource {
    /// Analytic `L` if the problem carries one, numeric otherwise.
    #[default]
    Auto,
    Analytic,
    Numeric,
}

fn start_points(dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut starts = vec![vec![0.0; dim]];
    for axis in 0..dim {
        for s in [-1.0, -0.5, 0.5, 1.0] {
            let mut p = vec![0.0; dim];
            p[axis] = s * radius;
            starts.push(p);
        }
    }
    starts
}

/// Projected (super)gradient ascent of `phi` over the ball of `radius`.
fn ascend<F, G>(phi: &F, grad: &G, start: Vec<f64>, radius: f64) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<f64>,
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut p = project_ball(&start, radius);
    let mut val = phi(&p)?;
    let mut t = 1.0;
    for _ in 0..MAX_ITERS {
        let g = grad(&p)?;
        if norm(&sub(&project_ball(&axpy(&p, 1.0, &g), radius), &p)) <= STATIONARY {
            break;
        }
        let trial = project_ball(&axpy(&p, t, &g), radius);
        let moved = norm(&sub(&trial, &p));
        if moved < 1e-15 * (1.0 + norm(&p)) {
            break;
        }
        let tv = phi(&trial)?;
        if tv >= val + SIGMA * moved * moved / t {
            p = trial;
            val = tv;
            t *= 2.0;
        } else {
            t *= 0.5;
        }
    }
    Ok((p, val))
}

/// `sup_{|λ| ≤ radius} {−α·λ + H(x, λ)}` with recession detection.
pub(crate) fn conjugate_at(
    h: &Hamiltonian,
    x: &[f64],
    alpha: &[f64],
    radius: f64,
) -> Result<ConjugatePoint> {
    let phi = |l: &[f64]| -> Result<f64> { Ok(-dot(alpha, l) + h.checked_value(x, l)?) };
    let grad = |l: &[f64]| -> Result<Vec<f64>> { Ok(sub(&h.checked_grad_lambda(x, l)?, alpha)) };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in start_points(alpha.len(), radius) {
        let (p, v) = ascend(&phi, &grad, s, radius)?;
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((p, v));
        }
    }
    let (argmax, value) = best.expect("at least one start");
    let n = norm(&argmax);
    if n >= radius * (1.0 - 1e-9) && n > 0.0 {
        let slope = dot(&grad(&argmax)?, &argmax) / n;
        if slope > RECESSION_SLOPE_TOL {
            return Ok(ConjugatePoint {
                value: ExtendedReal::PosInfinity,
                argmax,
            });
        }
    }
    Ok(ConjugatePoint {
        value: ExtendedReal::Finite(value),
        argmax,
    })
}

/// Numerical `L(x, α)`, searching `λ` in the ball of the given radius
/// (default: [`ControlProblem::lambda_search_radius`]).
///
/// The radius must be at least `10·C3`; smaller radii cannot see the
/// recession behaviour of `H` reliably.
pub fn running_cost_numeric(
    problem: &ControlProblem,
    x: &[f64],
    alpha: &[f64],
    radius: Option<f64>,
) -> Result<ConjugatePoint> {
    problem.check_point(x, "state")?;
    problem.check_point(alpha, "control")?;
    let radius = radius.unwrap_or_else(|| problem.lambda_search_radius());
    let floor = 10.0 * problem.constants().c3;
    if !(radius >= floor && radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda search radius {radius} is below 10*C3 = {floor}"
        )));
    }
    conjugate_at(problem.hamiltonian(), x, alpha, radius)
}

/// `H(x, λ) = inf_{|α| ≤ α_radius} {λ·α + L(x, α)}` using the problem's
/// running cost (analytic if present).
pub fn recover_hamiltonian(
    problem: &ControlProblem,
    x: &[f64],
    lambda: &[f64],
    alpha_radius: f64,
) -> Result<f64> {
    recover_hamiltonian_with(problem, x, lambda, alpha_radius, CostSource::Auto)
}

pub fn recover_hamiltonian_with(
    problem: &ControlProblem,
    x: &[f64],
    lambda: &[f64],
    alpha_radius: f64,
    source: CostSource,
) -> Result<f64> {
    problem.check_point(x, "state")?;
    problem.check_point(lambda, "dual")?;
    let c1 = problem.constants().c1;
    if !(alpha_radius >= c1) {
        return Err(Error::InvalidArgument(format!(
            "control search radius {alpha_radius} is below C1 = {c1}"
        )));
    }
    let analytic = match source {
        CostSource::Numeric => None,
        CostSource::Auto => problem.running_cost(),
        CostSource::Analytic => Some(problem.running_cost().ok_or_else(|| {
            Error::OracleUnavailable(format!("problem `{}` has no analytic running cost", problem.id()))
        })?),
    };
    let lambda_radius = problem.lambda_search_radius();
    match analytic {
        Some(l) => minimize_dual(lambda, alpha_radius, |a| analytic_eval(l, x, a)),
        None => minimize_dual(lambda, alpha_radius, |a| {
            let cp = conjugate_at(problem.hamiltonian(), x, a, lambda_radius)?;
            // envelope: ∂L/∂α = −λ*(α)
            Ok(cp.value.finite().map(|v| (v, cp.argmax.iter().map(|z| -z).collect())))
        }),
    }
}

fn analytic_eval(l: &RunningCost, x: &[f64], a: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
    match l.value(x, a) {
        ExtendedReal::PosInfinity => Ok(None),
        ExtendedReal::Finite(v) if v.is_finite() => {
            let g = l.grad_alpha(x, a);
            if g.iter().all(|z| z.is_finite()) {
                Ok(Some((v, g)))
            } else {
                // gradient blows up at the edge of dom L: treat as a barrier
                Ok(Some((v, vec![f64::NAN; a.len()])))
            }
        }
        ExtendedReal::Finite(_) => Err(evaluation_error("running cost", x, a)),
    }
}

/// Projected descent of `λ·α + L(x, α)` over `|α| ≤ radius`; `+∞` trials
/// are rejected by backtracking. The objective is convex, so the first
/// start with finite cost is enough.
fn minimize_dual<E>(lambda: &[f64], radius: f64, eval: E) -> Result<f64>
where
    E: Fn(&[f64]) -> Result<Option<(f64, Vec<f64>)>>,
{
    let mut best = f64::INFINITY;
    for start in start_points(lambda.len(), radius) {
        let Some((lv, lg)) = eval(&start)? else {
            continue;
        };
        let mut a = start;
        let mut val = dot(lambda, &a) + lv;
        let mut grad: Vec<f64> = lambda.iter().zip(&lg).map(|(l, g)| l + g).collect();
        let mut t = 1.0;
        for _ in 0..OUTER_ITERS {
            if grad.iter().any(|g| !g.is_finite())
                || norm(&sub(&project_ball(&axpy(&a, -1.0, &grad), radius), &a)) <= STATIONARY
            {
                break;
            }
            let trial = project_ball(&axpy(&a, -t, &grad), radius);
            let moved = norm(&sub(&trial, &a));
            if moved < 1e-15 * (1.0 + norm(&a)) {
                break;
            }
            match eval(&trial)? {
                Some((tv, tg)) if dot(lambda, &trial) + tv <= val - SIGMA * moved * moved / t => {
                    val = dot(lambda, &trial) + tv;
                    grad = lambda.iter().zip(&tg).map(|(l, g)| l + g).collect();
                    a = trial;
                    t *= 2.0;
                }
                _ => t *= 0.5,
            }
        }
        best = best.min(val);
        if best.is_finite() {
            break;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::MalformedProblem(
            "running cost is +inf at every start of the control search".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn eikonal_running_cost_inside_and_outside() {
        let p = catalog::get("eikonal-1d").unwrap().problem;
        let inside = running_cost_numeric(&p, &[0.0], &[0.5], None).unwrap();
        assert!(inside.value.finite().unwrap().abs() <= 1e-8);
        let edge = running_cost_numeric(&p, &[0.0], &[1.0], None).unwrap();
        assert!(edge.value.finite().unwrap().abs() <= 1e-8);
        let outside = running_cost_numeric(&p, &[0.0], &[1.5], None).unwrap();
        assert_eq!(outside.value, ExtendedReal::PosInfinity);
    }

    #[test]
    fn small_radius_is_rejected() {
        let p = catalog::get("eikonal-1d").unwrap().problem;
        let err = running_cost_numeric(&p, &[0.0], &[0.5], Some(5.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn smooth_running_cost_matches_closed_form() {
        let p = catalog::get("smooth-quadratic-1d").unwrap().problem;
        for a in [-0.9, -0.3, 0.0, 0.4, 0.8] {
            let x = [0.7];
            let num = running_cost_numeric(&p, &x, &[a], None).unwrap();
            let exact = p.running_cost().unwrap().value(&x, &[a]).finite().unwrap();
            assert!(
                (num.value.finite().unwrap() - exact).abs() < 1e-8,
                "alpha {a}: {} vs {exact}",
                num.value
            );
        }
    }

    #[test]
    fn round_trip_recovers_eikonal_hamiltonian() {
        let p = catalog::get("eikonal-2d").unwrap().problem;
        let x = [0.3, -1.0];
        for l in [[0.0, 0.0], [1.0, 0.0], [-0.7, 2.2]] {
            let h = p.hamiltonian().value(&x, &l);
            let r = recover_hamiltonian_with(&p, &x, &l, 1.0, CostSource::Numeric).unwrap();
            assert!((h - r).abs() <= 1e-4 * (1.0 + h.abs()), "{h} vs {r}");
            let r = recover_hamiltonian(&p, &x, &l, 1.0).unwrap();
            assert!((h - r).abs() <= 1e-6 * (1.0 + h.abs()), "{h} vs {r}");
        }
    }

    #[test]
    fn recover_rejects_radius_below_c1() {
        let p = catalog::get("eikonal-1d").unwrap().problem;
        assert!(recover_hamiltonian(&p, &[0.0], &[1.0], 0.5).is_err());
    }
}
