//! `(Δt, δ)` sweeps against an oracle, with the error-bound verdicts
//!
//! ```text
//! u − ū ≥ −[(C1 C2 T/2)((e^{C2 T} − 1)Δt + Δt²) + (C1 C3/2)(e^{C2 T} − 1)Δt + Tδ] − ε,
//! u − ū ≤ ½ C1 C2 (C3 + 1) e^{C2 T} T Δt + Tδ + ε,
//! ```
//!
//! where `ε` is the oracle's own accuracy.

mod fit;
mod report;

pub use fit::fit_order;
pub use report::{emit_reports, read_cells_csv, CELLS_HEADER};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::catalog;
use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::oracle::{exact_reference, grid_reference, GridOracleConfig, OracleValue};
use crate::problem::{regularize, Constants, ControlProblem, RegularizationMethod, RegularizedHamiltonian};
use crate::solver::{dual_bound_check, solve_tpbvp, SweepOptions};
use crate::variational::{minimize_j, VariationalOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleChoice {
    Exact,
    Grid,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    Tpbvp,
    Variational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteChoice {
    Tpbvp,
    Variational,
    Both,
}

impl RouteChoice {
    fn routes(self) -> Vec<Route> {
        match self {
            RouteChoice::Tpbvp => vec![Route::Tpbvp],
            RouteChoice::Variational => vec![Route::Variational],
            RouteChoice::Both => vec![Route::Tpbvp, Route::Variational],
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Tpbvp => "tpbvp",
            Route::Variational => "variational",
        })
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tpbvp" => Ok(Route::Tpbvp),
            "variational" => Ok(Route::Variational),
            other => Err(Error::Parse(format!("unknown route `{other}`"))),
        }
    }
}

impl fmt::Display for OracleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleChoice::Exact => "exact",
            OracleChoice::Grid => "grid",
            OracleChoice::Both => "both",
        })
    }
}

/// One sweep: a problem, a start point, and lists of step sizes and
/// regularization parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub problem_id: String,
    pub x_s: Vec<f64>,
    /// Strictly decreasing; each must divide `T` into an integer number of steps.
    pub dt_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub oracle: OracleChoice,
    pub route: RouteChoice,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Grid oracle resolution; `None` picks [`GridOracleConfig::for_problem`].
    pub grid: Option<GridOracleConfig>,
    pub regularization: RegularizationMethod,
}

impl ExperimentSpec {
    pub fn new(problem_id: impl Into<String>, x_s: Vec<f64>, dt_list: Vec<f64>, delta_list: Vec<f64>) -> Self {
        ExperimentSpec {
            problem_id: problem_id.into(),
            x_s,
            dt_list,
            delta_list,
            oracle: OracleChoice::Exact,
            route: RouteChoice::Tpbvp,
            seed: 0,
            output_dir: None,
            grid: None,
            regularization: RegularizationMethod::ProblemSupplied,
        }
    }

    /// Step counts `N = T/Δt`.
    fn step_counts(&self, horizon: f64) -> Result<Vec<usize>> {
        if self.dt_list.is_empty() || self.delta_list.is_empty() {
            return Err(Error::InvalidArgument("dt and delta lists must be non-empty".into()));
        }
        if self.dt_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument(format!(
                "dt list must be strictly decreasing, got {:?}",
                self.dt_list
            )));
        }
        if self.delta_list.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "delta values must be positive, got {:?}",
                self.delta_list
            )));
        }
        self.dt_list
            .iter()
            .map(|dt| {
                let n = horizon / dt;
                if !(*dt > 0.0) || n.round() < 1.0 || (n - n.round()).abs() > 1e-9 * n.max(1.0) {
                    Err(Error::InvalidArgument(format!(
                        "dt = {dt} does not divide the horizon {horizon} into whole steps"
                    )))
                } else {
                    Ok(n.round() as usize)
                }
            })
            .collect()
    }
}

/// Right-hand sides of the two error bounds, without the oracle slack.
pub fn error_bounds(c: Constants, horizon: f64, dt: f64, delta: f64) -> (f64, f64) {
    let grow = (c.c2 * horizon).exp();
    let lower = 0.5 * c.c1 * c.c2 * horizon * ((grow - 1.0) * dt + dt * dt)
        + 0.5 * c.c1 * c.c3 * (grow - 1.0) * dt
        + horizon * delta;
    let upper = 0.5 * c.c1 * c.c2 * (c.c3 + 1.0) * grow * horizon * dt + horizon * delta;
    (-lower, upper)
}

/// One `(Δt, δ, route)` cell. Failed cells carry NaN in the numeric fields.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRecord {
    pub problem: String,
    pub dt: f64,
    pub delta: f64,
    pub route: Route,
    pub u_bar: f64,
    pub u_oracle: f64,
    /// `u_oracle − u_bar`
    pub err_signed: f64,
    /// Including the oracle slack.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub dual_slack: f64,
    /// Sweeps (tpbvp) or optimizer iterations of the best start (variational).
    pub sweeps: usize,
    /// Scheme residual (tpbvp) or stationarity violation (variational).
    pub residual: f64,
}

impl CellRecord {
    pub fn failed(&self) -> bool {
        !self.u_bar.is_finite()
    }

    /// Bitwise comparison that treats NaN fields as equal.
    pub fn same_as(&self, other: &CellRecord) -> bool {
        let f = |a: f64, b: f64| a.to_bits() == b.to_bits();
        self.problem == other.problem
            && f(self.dt, other.dt)
            && f(self.delta, other.delta)
            && self.route == other.route
            && f(self.u_bar, other.u_bar)
            && f(self.u_oracle, other.u_oracle)
            && f(self.err_signed, other.err_signed)
            && f(self.lower_bound, other.lower_bound)
            && f(self.upper_bound, other.upper_bound)
            && self.lower_ok == other.lower_ok
            && self.upper_ok == other.upper_ok
            && f(self.dual_slack, other.dual_slack)
            && self.sweeps == other.sweeps
            && f(self.residual, other.residual)
    }
}

/// Error against `δ` at the smallest `Δt` for one route.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSensitivity {
    pub route: Route,
    pub dt: f64,
    /// Log-log slope of `|err|` against `δ`.
    pub slope: Option<f64>,
    /// Largest `|err(δ_small)| − |err(δ_large)|` over pairs `δ_small < δ_large`.
    pub max_increase: f64,
    /// `max_increase ≤ 1e-9`.
    pub no_blowup: bool,
}

/// Reference values used by a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSummary {
    pub choice: OracleChoice,
    /// Value used for the verdicts.
    pub used: OracleValue,
    pub exact: Option<OracleValue>,
    pub grid: Option<OracleValue>,
}

impl OracleSummary {
    /// `|exact − grid|` when both were computed.
    pub fn disagreement(&self) -> Option<f64> {
        match (&self.exact, &self.grid) {
            (Some(e), Some(g)) => Some((e.value - g.value).abs()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub problem_id: String,
    pub x_s: Vec<f64>,
    pub oracle: Option<OracleSummary>,
    pub cells: Vec<CellRecord>,
    /// `(cell index, message)` for cells whose solve failed.
    pub failures: Vec<(usize, String)>,
    /// Fitted order of `|err|` in `Δt` at the smallest `δ`, per route.
    pub dt_order: Vec<(Route, Option<f64>)>,
    pub delta_sensitivity: Vec<DeltaSensitivity>,
}

impl ExperimentReport {
    pub fn empty(problem_id: impl Into<String>, x_s: Vec<f64>) -> Self {
        ExperimentReport {
            problem_id: problem_id.into(),
            x_s,
            oracle: None,
            cells: Vec::new(),
            failures: Vec::new(),
            dt_order: Vec::new(),
            delta_sensitivity: Vec::new(),
        }
    }

    pub fn bounds_ok(&self) -> bool {
        self.cells.iter().all(|c| c.failed() || (c.lower_ok && c.upper_ok))
    }

    /// 0 when every verdict passes, 1 on a bound violation, 2 when a cell failed.
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            2
        } else if !self.bounds_ok() {
            1
        } else {
            0
        }
    }

    pub fn order_for(&self, route: Route) -> Option<f64> {
        self.dt_order.iter().find(|(r, _)| *r == route).and_then(|(_, o)| *o)
    }
}

/// Run a sweep on a catalog problem.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let problem = catalog::get(&spec.problem_id)?.problem;
    run_sweep_on(spec, &problem)
}

fn oracle_for(spec: &ExperimentSpec, p: &ControlProblem) -> Result<OracleSummary> {
    let grid_cfg = spec.grid.clone().unwrap_or_else(|| GridOracleConfig::for_problem(p));
    let context = |e: Error| Error::OracleUnavailable(format!("oracle for `{}` failed: {e}", p.id()));
    let exact = match spec.oracle {
        OracleChoice::Exact | OracleChoice::Both => Some(exact_reference(p, &spec.x_s).map_err(context)?),
        OracleChoice::Grid => None,
    };
    let grid = match spec.oracle {
        OracleChoice::Grid | OracleChoice::Both => Some(grid_reference(p, &spec.x_s, &grid_cfg).map_err(context)?),
        OracleChoice::Exact => None,
    };
    let used = exact.clone().or_else(|| grid.clone()).expect("one oracle is always computed");
    Ok(OracleSummary {
        choice: spec.oracle,
        used,
        exact,
        grid,
    })
}

struct Solved {
    u_bar: f64,
    dual_slack: f64,
    sweeps: usize,
    residual: f64,
}

fn solve_cell(h: &RegularizedHamiltonian, x_s: &[f64], n: usize, route: Route, seed: u64) -> Result<Solved> {
    match route {
        Route::Tpbvp => {
            let t = solve_tpbvp(h, x_s, n, &SweepOptions::default())?;
            Ok(Solved {
                u_bar: t.value,
                dual_slack: dual_bound_check(&t, h.base()).slack,
                sweeps: t.diagnostics.sweeps,
                residual: t.diagnostics.residual,
            })
        }
        Route::Variational => {
            let opts = VariationalOptions {
                seed,
                ..VariationalOptions::default()
            };
            let dv = minimize_j(h, x_s, 0, n, &opts)?;
            let max_dual = dv.multipliers.iter().map(|l| norm(l)).fold(0.0, f64::max);
            Ok(Solved {
                u_bar: dv.value,
                dual_slack: h.base().dual_bound() - max_dual,
                sweeps: dv.starts[dv.best_start].iterations,
                residual: dv.stationarity_violation,
            })
        }
    }
}

/// Run a sweep on an explicit problem (used for problems outside the catalog).
pub fn run_sweep_on(spec: &ExperimentSpec, p: &ControlProblem) -> Result<ExperimentReport> {
    p.check_point(&spec.x_s, "start point")?;
    let steps = spec.step_counts(p.horizon())?;
    let oracle = oracle_for(spec, p)?;
    let eps = oracle.used.accuracy;
    let routes = spec.route.routes();

    let regs: Vec<Result<RegularizedHamiltonian>> = spec
        .delta_list
        .iter()
        .map(|d| regularize(p, *d, spec.regularization))
        .collect();

    let mut jobs = Vec::new();
    for (i, dt) in spec.dt_list.iter().enumerate() {
        for (j, delta) in spec.delta_list.iter().enumerate() {
            for route in &routes {
                jobs.push((i, j, *dt, *delta, *route));
            }
        }
    }

    let results: Vec<(CellRecord, Option<String>)> = jobs
        .par_iter()
        .map(|&(i, j, dt, delta, route)| {
            let (lo, hi) = error_bounds(p.constants(), p.horizon(), dt, delta);
            let (lower_bound, upper_bound) = (lo - eps, hi + eps);
            let solved = regs[j]
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|h| solve_cell(h, &spec.x_s, steps[i], route, spec.seed).map_err(|e| e.to_string()));
            let base = CellRecord {
                problem: p.id().to_string(),
                dt,
                delta,
                route,
                u_bar: f64::NAN,
                u_oracle: oracle.used.value,
                err_signed: f64::NAN,
                lower_bound,
                upper_bound,
                lower_ok: false,
                upper_ok: false,
                dual_slack: f64::NAN,
                sweeps: 0,
                residual: f64::NAN,
            };
            match solved {
                Ok(s) => {
                    let err = oracle.used.value - s.u_bar;
                    (
                        CellRecord {
                            u_bar: s.u_bar,
                            err_signed: err,
                            lower_ok: err >= lower_bound,
                            upper_ok: err <= upper_bound,
                            dual_slack: s.dual_slack,
                            sweeps: s.sweeps,
                            residual: s.residual,
                            ..base
                        },
                        None,
                    )
                }
                Err(msg) => (base, Some(msg)),
            }
        })
        .collect();

    let mut cells = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (k, (cell, msg)) in results.into_iter().enumerate() {
        if let Some(m) = msg {
            failures.push((k, m));
        }
        cells.push(cell);
    }

    let min_delta = spec.delta_list.iter().copied().fold(f64::INFINITY, f64::min);
    let min_dt = *spec.dt_list.last().expect("non-empty");
    let dt_order = routes
        .iter()
        .map(|r| {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.route == *r && c.delta == min_delta)
                .map(|c| (c.dt, c.err_signed.abs()))
                .collect();
            (*r, fit_order(&pts))
        })
        .collect();
    let delta_sensitivity = routes
        .iter()
        .map(|r| {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.route == *r && c.dt == min_dt)
                .map(|c| (c.delta, c.err_signed.abs()))
                .collect();
            let mut max_increase = f64::NEG_INFINITY;
            for a in &pts {
                for b in &pts {
                    if a.0 < b.0 {
                        max_increase = max_increase.max(a.1 - b.1);
                    }
                }
            }
            let max_increase = if max_increase.is_finite() { max_increase } else { 0.0 };
            DeltaSensitivity {
                route: *r,
                dt: min_dt,
                slope: fit_order(&pts),
                max_increase,
                no_blowup: max_increase <= 1e-9,
            }
        })
        .collect();

    let report = ExperimentReport {
        problem_id: p.id().to_string(),
        x_s: spec.x_s.clone(),
        oracle: Some(oracle),
        cells,
        failures,
        dt_order,
        delta_sensitivity,
    };
    if let Some(dir) = &spec.output_dir {
        emit_reports(&report, dir)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Hamiltonian, RunningCost, StateCost, ExtendedReal};

    #[test]
    fn bound_formulas() {
        let c = Constants::new(1.0, 1.0, 1.0);
        let (lo, hi) = error_bounds(c, 1.0, 0.1, 0.0);
        let e = std::f64::consts::E;
        assert!((lo + (0.5 * ((e - 1.0) * 0.1 + 0.01) + 0.5 * (e - 1.0) * 0.1)).abs() < 1e-15);
        assert!((hi - 0.5 * 2.0 * e * 0.1).abs() < 1e-15);
        let (lo, hi) = error_bounds(Constants::new(1.0, 0.0, 1.0), 1.0, 0.1, 1e-3);
        assert_eq!((lo, hi), (-1e-3, 1e-3));
    }

    #[test]
    fn spec_validation() {
        let mut s = ExperimentSpec::new("eikonal-1d", vec![2.0], vec![0.1, 0.2], vec![1e-2]);
        assert!(run_sweep(&s).is_err());
        s.dt_list = vec![0.3];
        assert!(run_sweep(&s).is_err());
        s.dt_list = vec![0.1];
        s.delta_list = vec![];
        assert!(run_sweep(&s).is_err());
        s.delta_list = vec![1e-2];
        s.problem_id = "nope".into();
        assert!(matches!(run_sweep(&s), Err(Error::NotFound(_))));
        let s = ExperimentSpec {
            oracle: OracleChoice::Exact,
            ..ExperimentSpec::new("eikonal-1d-costed", vec![2.0], vec![0.1], vec![1e-2])
        };
        assert!(matches!(run_sweep(&s), Err(Error::OracleUnavailable(_))));
    }

    #[test]
    fn eikonal_sweep_passes_bounds() {
        let s = ExperimentSpec {
            route: RouteChoice::Both,
            ..ExperimentSpec::new("eikonal-1d", vec![2.0], vec![0.1, 0.05, 0.025], vec![1e-2, 1e-4])
        };
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.cells.len(), 12);
        assert_eq!(r.exit_code(), 0, "{:?}", r.failures);
        for c in &r.cells {
            assert!(c.err_signed.abs() <= 0.5 * c.delta + 1e-9, "{c:?}");
        }
    }

    #[test]
    fn constant_terminal_cost_has_zero_error() {
        let p = ControlProblem::builder("flat", 1)
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
            .terminal_cost(StateCost::new(|_| 0.7, |_| vec![0.0]))
            .constants(Constants::new(1.0, 0.0, 0.0))
            .exact_value(|_, _| 0.7)
            .build()
            .unwrap();
        let s = ExperimentSpec::new("flat", vec![0.0], vec![1.0], vec![1e-3]);
        let r = run_sweep_on(&s, &p).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.cells[0].err_signed, 0.0);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn violated_bound_sets_exit_code() {
        let mut r = ExperimentReport::empty("eikonal-1d", vec![2.0]);
        assert_eq!(r.exit_code(), 0);
        r.cells.push(CellRecord {
            problem: "eikonal-1d".into(),
            dt: 0.1,
            delta: 0.01,
            route: Route::Tpbvp,
            u_bar: 1.0,
            u_oracle: 2.0,
            err_signed: 1.0,
            lower_bound: -0.01,
            upper_bound: 0.01,
            lower_ok: true,
            upper_ok: false,
            dual_slack: 1.0,
            sweeps: 3,
            residual: 0.0,
        });
        assert_eq!(r.exit_code(), 1);
        r.failures.push((0, "boom".into()));
        assert_eq!(r.exit_code(), 2);
    }
}
