//! Semi-Lagrangian dynamic programming on a tensor grid:
//!
//! ```text
//! u[x, N] = g(x),
//! u[x, n] = min_α { Δt L(x, α) + I[u(·, n+1)](x + Δt α) },
//! ```
//!
//! with `I` multilinear interpolation and `α` drawn from a finite sample of
//! the `C1`-ball. The un-regularized running cost is used.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::problem::{conjugate_at, ControlProblem};
use crate::solver::fmt_float;

/// Largest supported grid dimension.
pub const MAX_DIM: usize = 3;

/// Axis-aligned box with a node count per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, nodes: Vec<usize>) -> Result<Self> {
        let d = lower.len();
        if d == 0 || upper.len() != d || nodes.len() != d {
            return Err(Error::InvalidArgument("grid bounds and node counts must agree in length".into()));
        }
        if d > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "grids are limited to {MAX_DIM} dimensions, got {d}"
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) || nodes.iter().any(|n| *n < 2) {
            return Err(Error::InvalidArgument(format!(
                "grid needs lower < upper and at least two nodes per axis, got {lower:?}, {upper:?}, {nodes:?}"
            )));
        }
        Ok(GridSpec { lower, upper, nodes })
    }

    /// Uniform grid of `nodes` points per axis on `[lower, upper]^d`.
    pub fn cube(dim: usize, lower: f64, upper: f64, nodes: usize) -> Result<Self> {
        GridSpec::new(vec![lower; dim], vec![upper; dim], vec![nodes; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.nodes[axis] - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of the node with flat index `idx` (first axis fastest).
    pub fn node(&self, mut idx: usize) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let i = idx % self.nodes[a];
            idx /= self.nodes[a];
            x.push(self.lower[a] + i as f64 * self.spacing(a));
        }
        x
    }

    /// Multilinear interpolation, clamping to the box.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let d = self.dim();
        let mut base = 0;
        let mut stride = 1;
        let mut weights = [0.0f64; MAX_DIM];
        let mut strides = [0usize; MAX_DIM];
        for a in 0..d {
            let n = self.nodes[a];
            let s = ((x[a] - self.lower[a]) / self.spacing(a)).clamp(0.0, (n - 1) as f64);
            let i = (s.floor() as usize).min(n - 2);
            base += i * stride;
            weights[a] = s - i as f64;
            strides[a] = stride;
            stride *= n;
        }
        let mut total = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = base;
            for a in 0..d {
                if corner >> a & 1 == 1 {
                    w *= weights[a];
                    idx += strides[a];
                } else {
                    w *= 1.0 - weights[a];
                }
            }
            if w != 0.0 {
                total += w * values[idx];
            }
        }
        total
    }
}

/// Control sample spanning the closed `C1`-ball.
///
/// 1-D: `samples` uniform points on `[−C1, C1]`. 2-D: `samples` directions
/// on each of `max(1, samples/16)` shells plus the origin. 3-D:
/// Fibonacci-sphere directions on the same shells.
pub fn control_set(dim: usize, c1: f64, samples: usize) -> Vec<Vec<f64>> {
    if c1 == 0.0 || samples <= 1 {
        return vec![vec![0.0; dim]];
    }
    if dim == 1 {
        return (0..samples)
            .map(|i| vec![-c1 + 2.0 * c1 * i as f64 / (samples - 1) as f64])
            .collect();
    }
    let shells = (samples / 16).max(1);
    let dirs: Vec<Vec<f64>> = if dim == 2 {
        (0..samples)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()
    } else {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..samples)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / samples as f64;
                let r = (1.0 - z * z).sqrt();
                let th = golden * k as f64;
                let mut v = vec![r * th.cos(), r * th.sin(), z];
                v.resize(dim, 0.0);
                v
            })
            .collect()
    };
    let mut out = vec![vec![0.0; dim]];
    for s in 1..=shells {
        let r = c1 * s as f64 / shells as f64;
        out.extend(dirs.iter().map(|d| d.iter().map(|v| v * r).collect()));
    }
    out
}

/// Integer lattice vectors of length at most `m`, scaled by `C1/m`.
///
/// With grid spacing `C1 Δt / m`, every departure point `x + Δt α` of a
/// node is again a node, so the DP carries no interpolation error.
pub fn lattice_controls(dim: usize, c1: f64, m: usize) -> Vec<Vec<f64>> {
    if c1 == 0.0 || m == 0 {
        return vec![vec![0.0; dim]];
    }
    let mi = m as i64;
    let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-mi..=mi).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    pts.into_iter()
        .filter(|p| p.iter().map(|k| k * k).sum::<i64>() <= mi * mi)
        .map(|p| p.iter().map(|k| *k as f64 * c1 / m as f64).collect())
        .collect()
}

/// Which time slices of the DP to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Storage {
    All,
    InitialOnly,
}

/// DP value function `u[node, n]` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridValueFunction {
    pub problem_id: String,
    pub grid: GridSpec,
    pub steps: usize,
    pub horizon: f64,
    pub c1: f64,
    pub control_samples: usize,
    /// Stored slices as `(n, values)`, in increasing `n`.
    pub slices: Vec<(usize, Vec<f64>)>,
}

impl GridValueFunction {
    pub fn dt(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.horizon / self.steps as f64
        }
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt()
    }

    pub fn slice(&self, n: usize) -> Option<&[f64]> {
        self.slices.iter().find(|(k, _)| *k == n).map(|(_, v)| v.as_slice())
    }

    /// Interpolated `u(x, t_n)`; refuses points whose reachable box
    /// `x ± C1 (T − t_n)` leaves the grid.
    pub fn value_at(&self, x: &[f64], n: usize) -> Result<f64> {
        let t = self.time(n);
        let values = self.slice(n).ok_or_else(|| {
            Error::InvalidArgument(format!("time slice {n} was not stored"))
        })?;
        if x.len() != self.grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "query has dimension {}, grid has {}",
                x.len(),
                self.grid.dim()
            )));
        }
        let reach = self.c1 * (self.horizon - t);
        let slack = 1e-9 * (1.0 + reach);
        for a in 0..x.len() {
            if x[a] - reach < self.grid.lower[a] - slack || x[a] + reach > self.grid.upper[a] + slack {
                return Err(Error::Domain { point: x.to_vec(), t });
            }
        }
        Ok(self.grid.interpolate(values, x))
    }

    /// Rows `x_0.., n, t, value` for every stored slice, plus a JSON sidecar
    /// next to `path` with the grid and run metadata.
    pub fn export(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        let d = self.grid.dim();
        let mut header: Vec<String> = (0..d).map(|i| format!("x_{i}")).collect();
        header.extend(["n".into(), "t".into(), "value".into()]);
        w.write_record(&header).map_err(csv_err)?;
        for (n, values) in &self.slices {
            for (i, v) in values.iter().enumerate() {
                let mut row: Vec<String> = self.grid.node(i).iter().map(|c| fmt_float(*c)).collect();
                row.push(n.to_string());
                row.push(fmt_float(self.time(*n)));
                row.push(fmt_float(*v));
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;

        let meta = serde_json::json!({
            "problem_id": self.problem_id,
            "grid": self.grid,
            "steps": self.steps,
            "horizon": self.horizon,
            "c1": self.c1,
            "control_samples": self.control_samples,
            "stored_slices": self.slices.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
        });
        let side = path.with_extension("json");
        let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(&side, text).map_err(|e| Error::io(&side, e))
    }
}

/// Un-regularized running cost, analytic if available.
fn running_cost(p: &ControlProblem, x: &[f64], a: &[f64]) -> Result<Option<f64>> {
    match p.running_cost() {
        Some(l) => Ok(l.value(x, a).finite()),
        None => Ok(conjugate_at(p.hamiltonian(), x, a, p.lambda_search_radius())?
            .value
            .finite()),
    }
}

/// DP with the default control sample [`control_set`]`(d, C1, control_samples)`.
pub fn solve_grid_dp(
    p: &ControlProblem,
    grid: &GridSpec,
    steps: usize,
    control_samples: usize,
) -> Result<GridValueFunction> {
    let controls = control_set(p.dim(), p.constants().c1, control_samples);
    solve_grid_dp_with(p, grid, steps, &controls, Storage::All)
}

/// DP with an explicit control sample.
pub fn solve_grid_dp_with(
    p: &ControlProblem,
    grid: &GridSpec,
    steps: usize,
    controls: &[Vec<f64>],
    storage: Storage,
) -> Result<GridValueFunction> {
    if grid.dim() != p.dim() {
        return Err(Error::InvalidArgument(format!(
            "grid dimension {} does not match problem dimension {}",
            grid.dim(),
            p.dim()
        )));
    }
    let c1 = p.constants().c1;
    if let Some(a) = controls.iter().find(|a| a.len() != p.dim() || norm(a) > c1 * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "control sample {a:?} lies outside the C1-ball"
        )));
    }
    let nodes: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.node(i)).collect();
    let g = p.terminal_cost();
    let mut current = nodes
        .iter()
        .map(|x| g.checked_value(x))
        .collect::<Result<Vec<f64>>>()?;
    let mut slices = Vec::new();
    if storage == Storage::All || steps == 0 {
        slices.push((steps, current.clone()));
    }
    let dt = if steps == 0 { 0.0 } else { p.horizon() / steps as f64 };

    // running costs depend only on (node, control): tabulate once
    let costs: Vec<Vec<Option<f64>>> = nodes
        .par_iter()
        .map(|x| controls.iter().map(|a| running_cost(p, x, a)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    for n in (0..steps).rev() {
        let next = &current;
        let updated: Vec<f64> = nodes
            .par_iter()
            .zip(&costs)
            .map(|(x, row)| {
                let mut best = f64::INFINITY;
                let mut dep = x.clone();
                for (a, c) in controls.iter().zip(row) {
                    let Some(c) = c else { continue };
                    for i in 0..dep.len() {
                        dep[i] = x[i] + dt * a[i];
                    }
                    let v = dt * c + grid.interpolate(next, &dep);
                    if v < best {
                        best = v;
                    }
                }
                best
            })
            .collect();
        if updated.iter().any(|v| !v.is_finite()) {
            return Err(Error::MalformedProblem(
                "running cost is +inf for every sampled control at some node".into(),
            ));
        }
        current = updated;
        if storage == Storage::All || n == 0 {
            slices.push((n, current.clone()));
        }
    }
    slices.sort_by_key(|(n, _)| *n);
    Ok(GridValueFunction {
        problem_id: p.id().to_string(),
        grid: grid.clone(),
        steps,
        horizon: p.horizon(),
        c1,
        control_samples: controls.len(),
        slices,
    })
}
