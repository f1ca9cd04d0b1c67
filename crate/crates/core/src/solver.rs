//! Symplectic Euler discretization of the regularized Hamiltonian system
//!
//! ```text
//! x_{n+1} = x_n + Δt H^δ_λ(x_n, λ_{n+1}),    x_0 = x_s,
//! λ_n     = λ_{n+1} + Δt H^δ_x(x_n, λ_{n+1}), λ_N = g'(x_N),
//! ```
//!
//! solved by damped forward–backward sweeps, with an optional fallback that
//! minimizes the discrete cost directly and polishes the extracted duals by
//! Newton's method on the same system.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, max_abs, max_abs_diff, norm, sub};
use crate::problem::{ControlProblem, RegularizedHamiltonian};
use crate::variational::{minimize_j, VariationalOptions};

/// Tolerance on `|λ_n|` above the analytic dual bound.
pub const DUAL_BOUND_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fallback {
    None,
    Variational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    /// `None` means `10·N + 100`.
    pub max_sweeps: Option<usize>,
    pub residual_tol: f64,
    pub relaxation: f64,
    pub fallback: Fallback,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_sweeps: None,
            residual_tol: 1e-10,
            relaxation: 0.5,
            fallback: Fallback::Variational,
        }
    }
}

impl SweepOptions {
    fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "residual tolerance must be positive, got {}",
                self.residual_tol
            )));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "relaxation must lie in (0, 1], got {}",
                self.relaxation
            )));
        }
        Ok(())
    }
}

/// How an accepted trajectory was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveRoute {
    Sweeps,
    VariationalFallback,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveDiagnostics {
    pub sweeps: usize,
    /// Largest scheme residual of the accepted trajectory.
    pub residual: f64,
    /// Dual change per sweep.
    pub history: Vec<f64>,
    pub route: SolveRoute,
}

/// Solution `(x_n, λ_n, α_n)` of the discrete Hamiltonian system.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteTrajectory {
    pub dt: f64,
    pub steps: usize,
    /// `x_0, …, x_N`
    pub states: Vec<Vec<f64>>,
    /// `λ_0, …, λ_N`
    pub duals: Vec<Vec<f64>>,
    /// `α_0, …, α_{N−1}` with `α_n = H^δ_λ(x_n, λ_{n+1})`
    pub controls: Vec<Vec<f64>>,
    /// Discrete value `ū(x_s, 0)`, see [`value_of`].
    pub value: f64,
    pub diagnostics: SolveDiagnostics,
}

impl DiscreteTrajectory {
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// CSV with columns `n, t_n, x_*, lambda_*, alpha_*`; `alpha` is empty on the last row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let d = self.states[0].len();
        let mut header = vec!["n".to_string(), "t_n".to_string()];
        for prefix in ["x", "lambda", "alpha"] {
            header.extend((0..d).map(|i| format!("{prefix}_{i}")));
        }
        w.write_record(&header).map_err(csv_err)?;
        for n in 0..=self.steps {
            let mut row = vec![n.to_string(), fmt_float(self.time(n))];
            row.extend(self.states[n].iter().map(|v| fmt_float(*v)));
            row.extend(self.duals[n].iter().map(|v| fmt_float(*v)));
            match self.controls.get(n) {
                Some(a) => row.extend(a.iter().map(|v| fmt_float(*v))),
                None => row.extend(std::iter::repeat(String::new()).take(d)),
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// 17 significant digits.
pub(crate) fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn forward(h: &ControlProblem, x_s: &[f64], duals: &[Vec<f64>], dt: f64) -> Result<Vec<Vec<f64>>> {
    let n = duals.len() - 1;
    let mut states = Vec::with_capacity(n + 1);
    states.push(x_s.to_vec());
    for k in 0..n {
        let x = &states[k];
        let v = h.hamiltonian().checked_grad_lambda(x, &duals[k + 1])?;
        states.push(axpy(x, dt, &v));
    }
    Ok(states)
}

fn backward(h: &ControlProblem, states: &[Vec<f64>], dt: f64) -> Result<Vec<Vec<f64>>> {
    let n = states.len() - 1;
    let mut duals = vec![Vec::new(); n + 1];
    duals[n] = h.terminal_cost().checked_grad(&states[n])?;
    for k in (0..n).rev() {
        let hx = h.hamiltonian().checked_grad_x(&states[k], &duals[k + 1])?;
        duals[k] = axpy(&duals[k + 1], dt, &hx);
    }
    Ok(duals)
}

fn max_change(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).map(|(u, v)| max_abs_diff(u, v)).fold(0.0, f64::max)
}

/// Largest componentwise residuals `(forward, backward, terminal)` of the scheme.
pub fn scheme_residuals(traj: &DiscreteTrajectory, h: &RegularizedHamiltonian) -> Result<(f64, f64, f64)> {
    let p = h.problem();
    let (xs, ls, dt) = (&traj.states, &traj.duals, traj.dt);
    let mut fwd = 0.0_f64;
    let mut bwd = 0.0_f64;
    for n in 0..traj.steps {
        let v = p.hamiltonian().checked_grad_lambda(&xs[n], &ls[n + 1])?;
        fwd = fwd.max(max_abs_diff(&xs[n + 1], &axpy(&xs[n], dt, &v)));
        let hx = p.hamiltonian().checked_grad_x(&xs[n], &ls[n + 1])?;
        bwd = bwd.max(max_abs_diff(&ls[n], &axpy(&ls[n + 1], dt, &hx)));
    }
    let term = max_abs_diff(&ls[traj.steps], &p.terminal_cost().checked_grad(&xs[traj.steps])?);
    Ok((fwd, bwd, term))
}

/// `Δt Σ (−λ_{n+1}·α_n + H^δ(x_n, λ_{n+1})) + g(x_N)`, i.e. the discrete cost
/// with `L` evaluated through the conjugate identity at optimal pairs.
pub fn value_of(traj: &DiscreteTrajectory, h: &RegularizedHamiltonian) -> Result<f64> {
    let p = h.problem();
    let mut total = 0.0;
    for n in 0..traj.steps {
        let l = &traj.duals[n + 1];
        total += traj.dt * (-dot(l, &traj.controls[n]) + p.hamiltonian().checked_value(&traj.states[n], l)?);
    }
    Ok(total + p.terminal_cost().checked_value(&traj.states[traj.steps])?)
}

/// Outcome of [`dual_bound_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub max_norm: f64,
    /// Index of the largest dual.
    pub index: usize,
    pub bound: f64,
    /// `bound − max_norm`
    pub slack: f64,
    pub passed: bool,
}

/// Compare `max_n |λ_n|` with `(C3 + 1) e^{C2 T} − 1`.
pub fn dual_bound_check(traj: &DiscreteTrajectory, p: &ControlProblem) -> BoundReport {
    let (index, max_norm) = traj
        .duals
        .iter()
        .map(|l| norm(l))
        .enumerate()
        .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let bound = p.dual_bound();
    BoundReport {
        max_norm,
        index,
        bound,
        slack: bound - max_norm,
        passed: max_norm <= bound + DUAL_BOUND_SLACK,
    }
}

/// Solve the discrete system from `x_s` with `N` steps of size `T/N`.
pub fn solve_tpbvp(
    h: &RegularizedHamiltonian,
    x_s: &[f64],
    n: usize,
    opts: &SweepOptions,
) -> Result<DiscreteTrajectory> {
    opts.validate()?;
    let p = h.problem();
    p.check_point(x_s, "start point")?;
    if n == 0 {
        return Err(Error::InvalidArgument("number of steps must be at least 1".into()));
    }
    let safe = p.safe_starts().ok_or_else(|| {
        Error::InvalidArgument("working box is too small for the reachable set".into())
    })?;
    if !safe.contains(x_s) {
        return Err(Error::InvalidArgument(format!(
            "start {x_s:?} is closer than C1*T to the edge of the working box"
        )));
    }
    let dt = p.horizon() / n as f64;
    let max_sweeps = opts.max_sweeps.unwrap_or(10 * n + 100);

    // zero-dual rollout, then g' at its end point
    let zeros = vec![vec![0.0; p.dim()]; n + 1];
    let rollout = forward(p, x_s, &zeros, dt)?;
    let mut duals = vec![p.terminal_cost().checked_grad(&rollout[n])?; n + 1];

    let mut history = Vec::new();
    let mut sweep_error = None;
    for _ in 0..max_sweeps {
        let step = forward(p, x_s, &duals, dt).and_then(|s| backward(p, &s, dt));
        let fresh = match step {
            Ok(f) => f,
            Err(e) => {
                sweep_error = Some(e);
                break;
            }
        };
        let change = max_change(&fresh, &duals);
        history.push(change);
        if !change.is_finite() {
            break;
        }
        if change <= opts.residual_tol {
            if let Some(t) = finalize(h, x_s, fresh, dt, opts, &history, SolveRoute::Sweeps)? {
                return Ok(t);
            }
            break;
        }
        for (d, f) in duals.iter_mut().zip(&fresh) {
            *d = axpy(d, opts.relaxation, &sub(f, d));
        }
    }

    if opts.fallback == Fallback::Variational {
        let dv = minimize_j(h, x_s, 0, n, &VariationalOptions::default())?;
        if let Some(polished) = newton_polish(p, x_s, dv.multipliers, dt, opts.residual_tol)? {
            if let Some(t) = finalize(h, x_s, polished, dt, opts, &history, SolveRoute::VariationalFallback)? {
                return Ok(t);
            }
        }
    }
    if let Some(e) = sweep_error {
        return Err(e);
    }
    Err(Error::NonConvergence {
        sweeps: history.len(),
        last: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Build the trajectory from converged duals and accept it only if every
/// scheme residual is within tolerance and the dual bound holds.
fn finalize(
    h: &RegularizedHamiltonian,
    x_s: &[f64],
    duals: Vec<Vec<f64>>,
    dt: f64,
    opts: &SweepOptions,
    history: &[f64],
    route: SolveRoute,
) -> Result<Option<DiscreteTrajectory>> {
    let p = h.problem();
    let states = forward(p, x_s, &duals, dt)?;
    let duals = backward(p, &states, dt)?;
    let n = states.len() - 1;
    let controls = (0..n)
        .map(|k| p.hamiltonian().checked_grad_lambda(&states[k], &duals[k + 1]))
        .collect::<Result<Vec<_>>>()?;
    let mut traj = DiscreteTrajectory {
        dt,
        steps: n,
        states,
        duals,
        controls,
        value: f64::NAN,
        diagnostics: SolveDiagnostics {
            sweeps: history.len(),
            residual: 0.0,
            history: history.to_vec(),
            route,
        },
    };
    let (f, b, t) = scheme_residuals(&traj, h)?;
    let residual = f.max(b).max(t);
    traj.diagnostics.residual = residual;
    if residual > opts.residual_tol || !dual_bound_check(&traj, h.base()).passed {
        return Ok(None);
    }
    traj.value = value_of(&traj, h)?;
    Ok(Some(traj))
}

/// Newton iteration on `F(λ) = backward(forward(λ)) − λ` for the unknown
/// duals `λ_1, …, λ_N`, with a finite-difference Jacobian. Accepts when
/// `|F| ≤ tol/10`; the caller rechecks the scheme residuals.
fn newton_polish(
    p: &ControlProblem,
    x_s: &[f64],
    start: Vec<Vec<f64>>,
    dt: f64,
    tol: f64,
) -> Result<Option<Vec<Vec<f64>>>> {
    let d = p.dim();
    let unpack = |v: &[f64]| -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; d]];
        out.extend(v.chunks(d).map(|c| c.to_vec()));
        out
    };
    let residual = |v: &[f64]| -> Result<Vec<f64>> {
        let duals = unpack(v);
        let fresh = backward(p, &forward(p, x_s, &duals, dt)?, dt)?;
        Ok(fresh[1..].iter().flatten().zip(v).map(|(a, b)| a - b).collect())
    };
    let mut v: Vec<f64> = start[1..].iter().flatten().copied().collect();
    let mut r = residual(&v)?;
    // keep going past `tol` while Newton still improves: the forward
    // residual amplifies dual errors by |H_λλ|, which grows like 1/δ
    for _ in 0..50 {
        if max_abs(&r) <= 1e-6 * tol {
            break;
        }
        let m = v.len();
        let mut jac = DMatrix::zeros(m, m);
        for j in 0..m {
            let e = 1e-7 * (1.0 + v[j].abs());
            let mut vp = v.clone();
            vp[j] += e;
            let rp = residual(&vp)?;
            for i in 0..m {
                jac[(i, j)] = (rp[i] - r[i]) / e;
            }
        }
        let Some(step) = jac.lu().solve(&DVector::from_vec(r.iter().map(|x| -x).collect())) else {
            return Ok(None);
        };
        let base = norm(&r);
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            if let Ok(rt) = residual(&trial) {
                if norm(&rt) < base {
                    v = trial;
                    r = rt;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((max_abs(&r) <= 0.1 * tol).then(|| unpack(&v)))
}
