//! Empirical verification of declared constants, concavity and gradients.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{sample_ball, ControlProblem, Structure};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, max_abs_diff, norm, scale};

const FD_STEP: f64 = 1e-5;
const FD_POINTS: usize = 100;
const CONCAVITY_TOL: f64 = 1e-10;

/// Points realizing an empirical ratio.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witness {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
}

/// Declared versus sampled value of one quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCheck {
    pub name: &'static str,
    pub declared: f64,
    pub empirical: f64,
    pub witness: Witness,
    pub passed: bool,
}

/// Outcome of [`verify_constants`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsReport {
    pub problem_id: String,
    pub samples: usize,
    pub constants: Vec<ConstantCheck>,
    /// Largest `(H(a) + H(b))/2 − H((a + b)/2)` seen.
    pub concavity_violation: f64,
    /// Largest relative mismatch between analytic and finite-difference gradients.
    pub gradient_mismatch: f64,
}

impl ConstantsReport {
    pub fn concavity_ok(&self) -> bool {
        self.concavity_violation <= CONCAVITY_TOL
    }

    pub fn gradients_ok(&self) -> bool {
        self.gradient_mismatch <= 1e-6
    }

    pub fn passed(&self) -> bool {
        self.constants.iter().all(|c| c.passed) && self.concavity_ok() && self.gradients_ok()
    }
}

impl fmt::Display for ConstantsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "ok" } else { "VIOLATED" };
        writeln!(f, "problem {} ({} samples)", self.problem_id, self.samples)?;
        for c in &self.constants {
            writeln!(
                f,
                "  {:<3} declared {:<10.6} empirical {:<12.8} {}",
                c.name,
                c.declared,
                c.empirical,
                verdict(c.passed)
            )?;
            if !c.passed {
                writeln!(
                    f,
                    "      witness x1={:?} x2={:?} lambda1={:?} lambda2={:?}",
                    c.witness.x1, c.witness.x2, c.witness.lambda1, c.witness.lambda2
                )?;
            }
        }
        writeln!(
            f,
            "  concavity violation {:.3e} {}",
            self.concavity_violation,
            verdict(self.concavity_ok())
        )?;
        writeln!(
            f,
            "  gradient mismatch   {:.3e} {}",
            self.gradient_mismatch,
            verdict(self.gradients_ok())
        )?;
        write!(f, "  overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn check(name: &'static str, declared: f64, empirical: f64, witness: Witness) -> ConstantCheck {
    ConstantCheck {
        name,
        declared,
        empirical,
        passed: empirical <= declared * (1.0 + 1e-9) + 1e-12,
        witness,
    }
}

fn perturb<R: Rng>(rng: &mut R, p: &[f64], size: f64) -> Vec<f64> {
    p.iter().map(|v| v + rng.gen_range(-size..=size)).collect()
}

fn clamp_into(problem: &ControlProblem, x: Vec<f64>) -> Vec<f64> {
    let d = problem.domain();
    x.iter()
        .enumerate()
        .map(|(i, v)| v.clamp(d.lower[i], d.upper[i]))
        .collect()
}

/// Sample the working box and `λ`-ball and compare empirical Lipschitz
/// ratios with the declared `C1, C2, C3`; also checks concavity of `H` in
/// `λ` and analytic gradients against central differences.
pub fn verify_constants(problem: &ControlProblem, samples: usize, seed: u64) -> Result<ConstantsReport> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "constant verification needs at least 100 samples, got {samples}"
        )));
    }
    let dim = problem.dim();
    let radius = problem.lambda_search_radius();
    let h = problem.hamiltonian();
    let g = problem.terminal_cost();
    let c = problem.constants();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (mut r1, mut w1) = (0.0_f64, Witness::default());
    let (mut r2, mut w2) = (0.0_f64, Witness::default());
    let (mut r3, mut w3) = (0.0_f64, Witness::default());
    let mut concavity = f64::NEG_INFINITY;

    for i in 0..samples {
        let near = i % 2 == 1;
        let x1 = problem.domain().sample(&mut rng);
        let l1 = sample_ball(&mut rng, dim, radius);
        let (x2, l2) = if near {
            let s = 10f64.powf(-rng.gen_range(1.0..4.0));
            (clamp_into(problem, perturb(&mut rng, &x1, s)), perturb(&mut rng, &l1, s))
        } else {
            (problem.domain().sample(&mut rng), sample_ball(&mut rng, dim, radius))
        };

        let dl = dist(&l1, &l2);
        if dl > 0.0 {
            let r = (h.checked_value(&x1, &l1)? - h.checked_value(&x1, &l2)?).abs() / dl;
            if r > r1 {
                r1 = r;
                w1 = Witness { x1: x1.clone(), x2: x1.clone(), lambda1: l1.clone(), lambda2: l2.clone() };
            }
        }
        let dx = dist(&x1, &x2);
        if dx > 0.0 {
            let r = (h.checked_value(&x1, &l1)? - h.checked_value(&x2, &l1)?).abs()
                / (dx * (1.0 + norm(&l1)));
            if r > r2 {
                r2 = r;
                w2 = Witness { x1: x1.clone(), x2: x2.clone(), lambda1: l1.clone(), lambda2: l1.clone() };
            }
        }
        let gn = norm(&g.checked_grad(&x1)?);
        if gn > r3 {
            r3 = gn;
            w3 = Witness { x1: x1.clone(), ..Witness::default() };
        }

        let mid = scale(&axpy(&l1, 1.0, &l2), 0.5);
        let gap = 0.5 * (h.checked_value(&x1, &l1)? + h.checked_value(&x1, &l2)?)
            - h.checked_value(&x1, &mid)?;
        concavity = concavity.max(gap);
    }

    let nonsmooth = matches!(problem.structure(), Structure::NormCost { .. });
    let mut mismatch = 0.0_f64;
    let mut done = 0;
    while done < FD_POINTS {
        let x = problem.safe_starts().unwrap_or_else(|| problem.domain().clone()).sample(&mut rng);
        let l = sample_ball(&mut rng, dim, radius);
        // central differences are meaningless near the kink of |λ|
        if nonsmooth && norm(&l) < 0.1 {
            continue;
        }
        done += 1;
        let fd_l = central_diff(|v| h.value(&x, v), &l);
        let fd_x = central_diff(|v| h.value(v, &l), &x);
        let fd_g = central_diff(|v| g.value(v), &x);
        for (an, fd) in [
            (h.checked_grad_lambda(&x, &l)?, fd_l),
            (h.checked_grad_x(&x, &l)?, fd_x),
            (g.checked_grad(&x)?, fd_g),
        ] {
            mismatch = mismatch.max(max_abs_diff(&an, &fd) / (1.0 + norm(&an)));
        }
    }

    Ok(ConstantsReport {
        problem_id: problem.id().to_string(),
        samples,
        constants: vec![
            check("C1", c.c1, r1, w1),
            check("C2", c.c2, r2, w2),
            check("C3", c.c3, r3, w3),
        ],
        concavity_violation: concavity.max(0.0),
        gradient_mismatch: mismatch,
    })
}

fn central_diff<F: Fn(&[f64]) -> f64>(f: F, at: &[f64]) -> Vec<f64> {
    (0..at.len())
        .map(|i| {
            let mut p = at.to_vec();
            let mut m = at.to_vec();
            p[i] += FD_STEP;
            m[i] -= FD_STEP;
            (f(&p) - f(&m)) / (2.0 * FD_STEP)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::problem::{Constants, StateCost};

    #[test]
    fn catalog_constants_hold() {
        for entry in catalog::list() {
            let r = verify_constants(&entry.problem, 10_000, 0).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn understated_constant_is_caught() {
        let p = ControlProblem::norm_cost("fast", 1, 2.0, None)
            .terminal_cost(StateCost::new(|x| x[0], |_| vec![1.0]))
            .constants(Constants::new(1.0, 0.0, 1.0))
            .build()
            .unwrap();
        let r = verify_constants(&p, 500, 1).unwrap();
        assert!(!r.passed());
        let c1 = &r.constants[0];
        assert!(!c1.passed && c1.empirical > 1.9);
        assert!(r.to_string().contains("VIOLATED"));
    }

    #[test]
    fn too_few_samples() {
        let p = catalog::get("eikonal-1d").unwrap().problem;
        assert!(verify_constants(&p, 10, 0).is_err());
    }
}
