//! Direct minimization of the discrete cost
//!
//! ```text
//! J(α) = Δt Σ_{n=m}^{N−1} L^δ(x_n, α_n) + g(x_N),   x_{n+1} = x_n + Δt α_n,  x_m = x_s,
//! ```
//!
//! over controls in the closed `C1`-ball, whose minimum is the discrete value
//! `ū(x_s, t_m)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{axpy, max_abs_diff, norm, scale};
use crate::optim::{bfgs, BfgsOptions};
use crate::problem::{conjugate_at, sample_ball, ControlProblem, ExtendedReal, RegularizedHamiltonian};

/// Stationarity tolerance used when extracting multipliers.
pub const STATIONARITY_TOL: f64 = 1e-6;

/// Largest number of control sequences [`brute_force_value`] will enumerate.
pub const BRUTE_FORCE_BUDGET: f64 = 1e8;

/// Controls `α_m, …, α_{N−1}` and the data needed to roll them out.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlVector {
    pub controls: Vec<Vec<f64>>,
    pub start_index: usize,
    pub dt: f64,
    pub x_s: Vec<f64>,
}

impl ControlVector {
    /// States `x_m, …, x_N` from `x_{n+1} = x_n + Δt α_n`.
    pub fn rollout(&self) -> Vec<Vec<f64>> {
        let mut states = Vec::with_capacity(self.controls.len() + 1);
        states.push(self.x_s.clone());
        for a in &self.controls {
            let next = axpy(states.last().unwrap(), self.dt, a);
            states.push(next);
        }
        states
    }

    /// Controls concatenated step by step.
    pub fn flat(&self) -> Vec<f64> {
        self.controls.iter().flatten().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StartReport {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Optimal value of `J` with its minimizer and extracted multipliers.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteValue {
    pub value: f64,
    pub minimizer: ControlVector,
    pub states: Vec<Vec<f64>>,
    /// `λ_m, …, λ_N` from the backward recursion along the minimizer.
    pub multipliers: Vec<Vec<f64>>,
    /// `max_n |α_n − H^δ_λ(x_n, λ_{n+1})|`.
    pub stationarity_violation: f64,
    pub starts: Vec<StartReport>,
    pub best_start: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalOptions {
    /// Number of starts: zero controls, a straight run down `−g'(x_s)`, then seeded random.
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub gradient_tol: f64,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        VariationalOptions {
            starts: 5,
            seed: 0,
            max_iterations: 2000,
            gradient_tol: 1e-11,
        }
    }
}

/// Running cost with `α`- and `x`-gradients: analytic when available,
/// otherwise through the conjugate maximization and the envelope theorem.
fn cost_terms(p: &ControlProblem, x: &[f64], a: &[f64]) -> Result<Option<(f64, Vec<f64>, Vec<f64>)>> {
    if let Some(l) = p.running_cost() {
        return Ok(match l.value(x, a) {
            ExtendedReal::PosInfinity => None,
            ExtendedReal::Finite(v) => {
                let ga = l.grad_alpha(x, a);
                let gx = l.grad_x(x, a);
                (v.is_finite() && ga.iter().chain(&gx).all(|z| z.is_finite())).then_some((v, ga, gx))
            }
        });
    }
    let cp = conjugate_at(p.hamiltonian(), x, a, p.lambda_search_radius())?;
    Ok(match cp.value {
        ExtendedReal::PosInfinity => None,
        ExtendedReal::Finite(v) => {
            let gx = p.hamiltonian().checked_grad_x(x, &cp.argmax)?;
            Some((v, scale(&cp.argmax, -1.0), gx))
        }
    })
}

/// `J` and its adjoint gradient; `None` when some `L(x_n, α_n)` is `+∞`.
fn objective(p: &ControlProblem, cv: &ControlVector) -> Result<Option<(f64, Vec<f64>)>> {
    let states = cv.rollout();
    let n = cv.controls.len();
    let mut terms = Vec::with_capacity(n);
    let mut total = 0.0;
    for (x, a) in states.iter().zip(&cv.controls) {
        let Some(t) = cost_terms(p, x, a)? else {
            return Ok(None);
        };
        total += cv.dt * t.0;
        terms.push(t);
    }
    let last = states.last().unwrap();
    total += p.terminal_cost().checked_value(last)?;
    let mut adj = p.terminal_cost().checked_grad(last)?;
    let d = cv.x_s.len();
    let mut grad = vec![0.0; n * d];
    for k in (0..n).rev() {
        let (_, ga, gx) = &terms[k];
        for i in 0..d {
            grad[k * d + i] = cv.dt * (ga[i] + adj[i]);
        }
        adj = axpy(&adj, cv.dt, gx);
    }
    Ok(Some((total, grad)))
}

/// Value of `J` at the given controls, `+∞` if any running cost is.
pub fn cost_of(h: &RegularizedHamiltonian, cv: &ControlVector) -> Result<ExtendedReal> {
    Ok(match objective(h.problem(), cv)? {
        Some((v, _)) => ExtendedReal::Finite(v),
        None => ExtendedReal::PosInfinity,
    })
}

/// Adjoint gradient of `J`; `None` where `J` is `+∞` or not differentiable.
pub fn gradient_of(h: &RegularizedHamiltonian, cv: &ControlVector) -> Result<Option<Vec<f64>>> {
    Ok(objective(h.problem(), cv)?.map(|(_, g)| g))
}

fn check_horizon(p: &ControlProblem, x_s: &[f64], m: usize, n: usize) -> Result<f64> {
    p.check_point(x_s, "start point")?;
    if m >= n {
        return Err(Error::InvalidArgument(format!(
            "start index {m} must be below the number of steps {n}"
        )));
    }
    Ok(p.horizon() / n as f64)
}

/// Multi-start minimization of `J` over controls `α_m, …, α_{N−1}` in the
/// closed `C1`-ball, with `Δt = T/N`.
pub fn minimize_j(
    h: &RegularizedHamiltonian,
    x_s: &[f64],
    m: usize,
    n: usize,
    opts: &VariationalOptions,
) -> Result<DiscreteValue> {
    let p = h.problem();
    let dt = check_horizon(p, x_s, m, n)?;
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let d = p.dim();
    let c1 = p.constants().c1;
    let steps = n - m;

    let mut starts = vec![vec![vec![0.0; d]; steps]];
    let slope = p.terminal_cost().checked_grad(x_s)?;
    let toward = if norm(&slope) > 0.0 {
        scale(&slope, -0.9 * c1 / norm(&slope))
    } else {
        vec![0.0; d]
    };
    starts.push(vec![toward; steps]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(2) {
        starts.push((0..steps).map(|_| sample_ball(&mut rng, d, 0.9 * c1)).collect());
    }
    starts.truncate(opts.starts);

    let bfgs_opts = BfgsOptions {
        max_iterations: opts.max_iterations,
        gradient_tol: opts.gradient_tol,
        block: d,
        radius: c1,
    };
    let make = |flat: &[f64]| ControlVector {
        controls: flat.chunks(d).map(|c| c.to_vec()).collect(),
        start_index: m,
        dt,
        x_s: x_s.to_vec(),
    };

    let outcomes: Vec<std::result::Result<(Vec<f64>, StartReport), String>> = starts
        .par_iter()
        .map(|s| {
            let x0: Vec<f64> = s.iter().flatten().copied().collect();
            let error = std::sync::Mutex::new(None);
            let f = |flat: &[f64]| match objective(p, &make(flat)) {
                Ok(v) => v,
                Err(e) => {
                    error.lock().unwrap().get_or_insert(e.to_string());
                    None
                }
            };
            let res = bfgs(f, &x0, bfgs_opts);
            if let Some(e) = error.into_inner().unwrap() {
                if res.is_none() {
                    return Err(e);
                }
            }
            match res {
                Some(r) => Ok((
                    r.x,
                    StartReport {
                        value: r.value,
                        iterations: r.iterations,
                        converged: r.converged,
                    },
                )),
                None => Err("cost is +inf at the starting controls".to_string()),
            }
        })
        .collect();

    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((x, rep)) => {
                if best.as_ref().map_or(true, |(_, _, v)| rep.value < *v) {
                    best = Some((i, x, rep.value));
                }
                reports.push(rep);
            }
            Err(e) => {
                failures.push(format!("start {i}: {e}"));
                reports.push(StartReport {
                    value: f64::INFINITY,
                    iterations: 0,
                    converged: false,
                });
            }
        }
    }
    let Some((best_start, flat, _)) = best else {
        return Err(Error::OptimizationFailed { details: failures });
    };
    let minimizer = make(&flat);
    let value = cost_of(h, &minimizer)?
        .finite()
        .ok_or_else(|| Error::OptimizationFailed {
            details: vec!["best start ended at +inf".into()],
        })?;
    let states = minimizer.rollout();
    let (multipliers, violation) = multipliers_along(h, &minimizer, &states)?;
    Ok(DiscreteValue {
        value,
        minimizer,
        states,
        multipliers,
        stationarity_violation: violation.0,
        starts: reports,
        best_start,
    })
}

/// Backward dual recursion along a control sequence, with the worst
/// stationarity violation `(size, step)`.
fn multipliers_along(
    h: &RegularizedHamiltonian,
    cv: &ControlVector,
    states: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, (f64, usize))> {
    let ham = h.problem().hamiltonian();
    let steps = cv.controls.len();
    let mut duals = vec![Vec::new(); steps + 1];
    duals[steps] = h.problem().terminal_cost().checked_grad(&states[steps])?;
    let mut worst = (0.0, cv.start_index);
    for k in (0..steps).rev() {
        let next = &duals[k + 1];
        let hl = ham.checked_grad_lambda(&states[k], next)?;
        let v = max_abs_diff(&cv.controls[k], &hl);
        if v > worst.0 {
            worst = (v, cv.start_index + k);
        }
        duals[k] = axpy(next, cv.dt, &ham.checked_grad_x(&states[k], next)?);
    }
    Ok((duals, worst))
}

/// Recompute `λ_N = g'(x_N)`, `λ_n = λ_{n+1} + Δt H^δ_x(x_n, λ_{n+1})` along
/// the minimizer and check `α_n = H^δ_λ(x_n, λ_{n+1})` to [`STATIONARITY_TOL`].
pub fn extract_multipliers(dv: &DiscreteValue, h: &RegularizedHamiltonian) -> Result<Vec<Vec<f64>>> {
    let states = dv.minimizer.rollout();
    let (duals, (violation, step)) = multipliers_along(h, &dv.minimizer, &states)?;
    if violation > STATIONARITY_TOL {
        return Err(Error::ExtractionInconsistent { violation, step });
    }
    Ok(duals)
}

fn control_candidates(d: usize, c1: f64, k: usize) -> Vec<Vec<f64>> {
    if c1 == 0.0 || k == 1 {
        return vec![vec![0.0; d]];
    }
    let axis: Vec<f64> = (0..k)
        .map(|i| -c1 + 2.0 * c1 * i as f64 / (k - 1) as f64)
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    out.retain(|a| norm(a) <= c1 * (1.0 + 1e-12));
    out
}

/// Exhaustive minimum of `J` over a tensor grid of `grid_points` values per
/// control component, restricted to the `C1`-ball. Refuses when more than
/// [`BRUTE_FORCE_BUDGET`] sequences would be needed.
pub fn brute_force_value(
    h: &RegularizedHamiltonian,
    x_s: &[f64],
    n: usize,
    grid_points: usize,
) -> Result<f64> {
    let p = h.problem();
    let dt = check_horizon(p, x_s, 0, n)?;
    if grid_points == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    let d = p.dim();
    let required = (grid_points as f64).powi((d * n) as i32);
    let cands = control_candidates(d, p.constants().c1, grid_points);
    if cands.len() > 1 && required > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    let best: Vec<Result<f64>> = cands
        .par_iter()
        .map(|a0| {
            let Some(c0) = step_cost(p, x_s, a0)? else {
                return Ok(f64::INFINITY);
            };
            search(p, &cands, &axpy(x_s, dt, a0), dt * c0, n - 1, dt)
        })
        .collect();
    let mut out = f64::INFINITY;
    for b in best {
        out = out.min(b?);
    }
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::OptimizationFailed {
            details: vec!["every grid control sequence has infinite cost".into()],
        })
    }
}

fn step_cost(p: &ControlProblem, x: &[f64], a: &[f64]) -> Result<Option<f64>> {
    match p.running_cost() {
        Some(l) => Ok(l.value(x, a).finite()),
        None => Ok(conjugate_at(p.hamiltonian(), x, a, p.lambda_search_radius())?
            .value
            .finite()),
    }
}

fn search(
    p: &ControlProblem,
    cands: &[Vec<f64>],
    x: &[f64],
    acc: f64,
    remaining: usize,
    dt: f64,
) -> Result<f64> {
    if remaining == 0 {
        return Ok(acc + p.terminal_cost().checked_value(x)?);
    }
    let mut best = f64::INFINITY;
    for a in cands {
        if let Some(c) = step_cost(p, x, a)? {
            best = best.min(search(p, cands, &axpy(x, dt, a), acc + dt * c, remaining - 1, dt)?);
        }
    }
    Ok(best)
}
