//! Block-projected BFGS for smooth objectives over products of balls.
//!
//! The objective returns `None` outside its effective domain; such trials
//! are rejected by the line search, so a cost that is `+∞` off a ball acts
//! as its own barrier.

use crate::linalg::{dot, norm, project_ball, sub};

pub(crate) type Eval = Option<(f64, Vec<f64>)>;

#[derive(Clone, Copy, Debug)]
pub(crate) struct BfgsOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    /// Block size and radius of the per-block ball constraint.
    pub block: usize,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn project(x: &[f64], block: usize, radius: f64) -> Vec<f64> {
    x.chunks(block)
        .flat_map(|b| project_ball(b, radius))
        .collect()
}

/// Norm of the projected-gradient step `x − P(x − g)`.
fn stationarity(x: &[f64], g: &[f64], block: usize, radius: f64) -> f64 {
    let stepped: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
    norm(&sub(x, &project(&stepped, block, radius)))
}

pub(crate) fn bfgs<F>(f: F, x0: &[f64], opts: BfgsOptions) -> Option<BfgsResult>
where
    F: Fn(&[f64]) -> Eval,
{
    let n = x0.len();
    let mut x = project(x0, opts.block, opts.radius);
    let (mut fx, mut g) = f(&x)?;
    let mut hinv = identity(n);
    let mut stalls = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        if stationarity(&x, &g, opts.block, opts.radius) <= opts.gradient_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut dir: Vec<f64> = matvec(&hinv, &g).iter().map(|v| -v).collect();
        if dot(&dir, &g) >= 0.0 {
            hinv = identity(n);
            dir = g.iter().map(|v| -v).collect();
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            let trial = project(&trial, opts.block, opts.radius);
            let step = sub(&trial, &x);
            let decrease = dot(&g, &step);
            if decrease < 0.0 {
                if let Some((ft, gt)) = f(&trial) {
                    if ft <= fx + 1e-4 * decrease {
                        accepted = Some((trial, ft, gt, step));
                        break;
                    }
                }
            }
            t *= 0.5;
        }

        let Some((xn, fnew, gn, s)) = accepted else {
            // a pure gradient step failed too: nothing left to gain at this precision
            if hinv != identity(n) {
                hinv = identity(n);
                continue;
            }
            break;
        };
        let y = sub(&gn, &g);
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            bfgs_update(&mut hinv, &s, &y, sy);
        }
        if (fx - fnew).abs() <= 1e-16 * (1.0 + fx.abs()) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        x = xn;
        fx = fnew;
        g = gn;
        if stalls >= 5 {
            break;
        }
    }
    if !converged {
        converged = stationarity(&x, &g, opts.block, opts.radius) <= opts.gradient_tol;
    }
    Some(BfgsResult {
        x,
        value: fx,
        iterations,
        converged,
    })
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let rho = 1.0 / sy;
    let hy = matvec(h, y);
    let yhy = dot(y, &hy);
    let n = s.len();
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_unconstrained() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            Some((
                (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2),
                vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)],
            ))
        };
        let opts = BfgsOptions { max_iterations: 500, gradient_tol: 1e-10, block: 2, radius: 10.0 };
        let r = bfgs(f, &[-1.2, 1.0], opts).unwrap();
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn active_ball_constraint() {
        // minimize |x − (3, 0)|² over the unit ball
        let f = |x: &[f64]| Some(((x[0] - 3.0).powi(2) + x[1] * x[1], vec![2.0 * (x[0] - 3.0), 2.0 * x[1]]));
        let opts = BfgsOptions { max_iterations: 200, gradient_tol: 1e-10, block: 2, radius: 1.0 };
        let r = bfgs(f, &[0.0, 0.5], opts).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-9 && r.x[1].abs() < 1e-9);
    }

    #[test]
    fn barrier_domain() {
        // f = −√(1 − x²) + 0.5 x has its minimum inside (−1, 1); None outside.
        let f = |x: &[f64]| {
            let s = 1.0 - x[0] * x[0];
            (s > 0.0).then(|| (-(s.sqrt()) + 0.5 * x[0], vec![x[0] / s.sqrt() + 0.5]))
        };
        let opts = BfgsOptions { max_iterations: 200, gradient_tol: 1e-12, block: 1, radius: 2.0 };
        let r = bfgs(f, &[0.9], opts).unwrap();
        let exact = -0.5 / 1.25f64.sqrt();
        assert!((r.x[0] - exact).abs() < 1e-9, "{}", r.x[0]);
    }
}
