//! Regularization `H → H^δ` with a sampled sup-norm certificate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    sample_ball, ControlProblem, ExtendedReal, Hamiltonian, RunningCost, SmoothedForm, StateCost,
    Structure,
};
use crate::error::{Error, Result};
use crate::linalg::{axpy, norm, scale};

const CERT_SAMPLES: usize = 2000;
const CERT_SEED: u64 = 0x5eed_0001;

/// How `H^δ` is obtained from `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularizationMethod {
    /// The problem's own smooth family, or `H` itself when it is already smooth.
    ProblemSupplied,
    /// Hyperbolic smoothing of the norm in `H = −s|λ| + ℓ(x)`.
    SmoothedMin,
}

/// Hyperbolic smoothing of `H = −s|λ| + ℓ(x)`:
///
/// ```text
/// H^δ(x, λ) = −s √(|λ|² + (δ/s)²) + δ/2 + ℓ(x),
/// L^δ(x, α) = ℓ(x) + δ/2 − (δ/s) √(s² − |α|²)   for |α| ≤ s, +∞ otherwise.
/// ```
///
/// `|H^δ − H| ≤ δ/2` everywhere, with equality at `λ = 0`.
pub fn hyperbolic_norm_smoothing(speed: f64, potential: Option<StateCost>, delta: f64) -> SmoothedForm {
    let eps = delta / speed;
    let pot = potential.clone();
    let pot_x = potential.clone();
    let pot_l = potential.clone();
    let pot_lx = potential;
    let hamiltonian = Hamiltonian::new(
        move |x, l| {
            let r = (norm(l).powi(2) + eps * eps).sqrt();
            -speed * r + 0.5 * delta + pot.as_ref().map_or(0.0, |p| p.value(x))
        },
        move |_x, l| {
            let r = (norm(l).powi(2) + eps * eps).sqrt();
            scale(l, -speed / r)
        },
        move |x, _l| pot_x.as_ref().map_or(vec![0.0; x.len()], |p| p.grad(x)),
    );
    let running_cost = RunningCost::new(
        move |x, a| {
            let slack = speed * speed - norm(a).powi(2);
            if slack < 0.0 {
                ExtendedReal::PosInfinity
            } else {
                let base = pot_l.as_ref().map_or(0.0, |p| p.value(x));
                ExtendedReal::Finite(base + 0.5 * delta - eps * slack.sqrt())
            }
        },
        move |x, _a| pot_lx.as_ref().map_or(vec![0.0; x.len()], |p| p.grad(x)),
        move |_x, a| {
            let slack = speed * speed - norm(a).powi(2);
            scale(a, eps / slack.sqrt())
        },
    );
    SmoothedForm {
        hamiltonian,
        running_cost: Some(running_cost),
    }
}

/// A differentiable approximation `H^δ` of a problem's Hamiltonian.
///
/// [`RegularizedHamiltonian::problem`] is the same control problem with `H`
/// replaced by `H^δ` (and `L` by its conjugate when known); it is what the
/// discrete solvers consume.
#[derive(Clone, Debug)]
pub struct RegularizedHamiltonian {
    base: ControlProblem,
    smoothed: ControlProblem,
    delta: f64,
    method: RegularizationMethod,
    certified_error: f64,
    worst_x: Vec<f64>,
    worst_lambda: Vec<f64>,
}

impl RegularizedHamiltonian {
    pub fn base(&self) -> &ControlProblem {
        &self.base
    }

    /// The regularized control problem.
    pub fn problem(&self) -> &ControlProblem {
        &self.smoothed
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn method(&self) -> RegularizationMethod {
        self.method
    }

    /// Largest `|H^δ − H|` seen on the certification sample.
    pub fn certified_sup_error(&self) -> f64 {
        self.certified_error
    }

    /// Sample point where the largest deviation was seen.
    pub fn worst_point(&self) -> (&[f64], &[f64]) {
        (&self.worst_x, &self.worst_lambda)
    }

    pub fn value(&self, x: &[f64], lambda: &[f64]) -> f64 {
        self.smoothed.hamiltonian().value(x, lambda)
    }

    pub fn grad_lambda(&self, x: &[f64], lambda: &[f64]) -> Vec<f64> {
        self.smoothed.hamiltonian().grad_lambda(x, lambda)
    }

    pub fn grad_x(&self, x: &[f64], lambda: &[f64]) -> Vec<f64> {
        self.smoothed.hamiltonian().grad_x(x, lambda)
    }
}

/// Build `H^δ` and certify `sup |H^δ − H| ≤ δ` on a seeded sample of the
/// working box times the `λ`-search ball.
pub fn regularize(
    problem: &ControlProblem,
    delta: f64,
    method: RegularizationMethod,
) -> Result<RegularizedHamiltonian> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "regularization parameter must be positive, got {delta}"
        )));
    }
    let form = match method {
        RegularizationMethod::SmoothedMin => match problem.structure() {
            Structure::NormCost { speed, potential } if *speed > 0.0 => {
                hyperbolic_norm_smoothing(*speed, potential.clone(), delta)
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "smoothed-min regularization needs a norm-cost Hamiltonian; `{}` is not one",
                    problem.id()
                )))
            }
        },
        RegularizationMethod::ProblemSupplied => match (problem.smooth_family(), problem.structure()) {
            (Some(family), _) => family(delta),
            (None, Structure::Smooth) => SmoothedForm {
                hamiltonian: problem.hamiltonian().clone(),
                running_cost: problem.running_cost().cloned(),
            },
            (None, Structure::NormCost { .. }) => {
                return Err(Error::MalformedProblem(format!(
                    "problem `{}` is not differentiable and supplies no smooth family",
                    problem.id()
                )))
            }
        },
    };

    let (measured, worst_x, worst_lambda) = certify(problem, &form.hamiltonian)?;
    if measured > delta * (1.0 + 1e-12) {
        return Err(Error::RegularizationInvalid {
            delta,
            measured,
            x: worst_x,
            lambda: worst_lambda,
        });
    }

    let mut builder = ControlProblem::builder(problem.id(), problem.dim())
        .description(problem.description())
        .horizon(problem.horizon())
        .hamiltonian(form.hamiltonian)
        .terminal_cost(problem.terminal_cost().clone())
        .constants(problem.constants())
        .domain(problem.domain().clone())
        .lower_growth(problem.lower_growth());
    if let Some(l) = form.running_cost {
        builder = builder.running_cost(l);
    }
    Ok(RegularizedHamiltonian {
        base: problem.clone(),
        smoothed: builder.build()?,
        delta,
        method,
        certified_error: measured,
        worst_x,
        worst_lambda,
    })
}

fn certify(problem: &ControlProblem, smooth: &Hamiltonian) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let dim = problem.dim();
    let radius = problem.lambda_search_radius();
    let h = problem.hamiltonian();
    let mut rng = ChaCha8Rng::seed_from_u64(CERT_SEED);
    let mut worst = (0.0, vec![0.0; dim], vec![0.0; dim]);
    let mut check = |x: &[f64], l: &[f64]| -> Result<()> {
        let e = (smooth.checked_value(x, l)? - h.checked_value(x, l)?).abs();
        if e > worst.0 {
            worst = (e, x.to_vec(), l.to_vec());
        }
        Ok(())
    };
    for i in 0..CERT_SAMPLES {
        let x = problem.domain().sample(&mut rng);
        let l = sample_ball(&mut rng, dim, radius);
        check(&x, &l)?;
        if i % 20 == 0 {
            check(&x, &vec![0.0; dim])?;
            for axis in 0..dim {
                for s in [-radius, radius] {
                    let mut e = vec![0.0; dim];
                    e[axis] = s;
                    check(&x, &e)?;
                }
            }
        }
    }

    // midpoint concavity of H^δ in λ
    for _ in 0..CERT_SAMPLES / 4 {
        let x = problem.domain().sample(&mut rng);
        let a = sample_ball(&mut rng, dim, radius);
        let b = sample_ball(&mut rng, dim, radius);
        let mid = scale(&axpy(&a, 1.0, &b), 0.5);
        let lhs = smooth.checked_value(&x, &mid)?;
        let rhs = 0.5 * (smooth.checked_value(&x, &a)? + smooth.checked_value(&x, &b)?);
        if lhs < rhs - 1e-10 * (1.0 + rhs.abs()) {
            return Err(Error::MalformedProblem(format!(
                "regularized Hamiltonian is not concave in lambda at x = {x:?}"
            )));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn smoothed_min_error_is_half_delta() {
        let p = catalog::get("eikonal-1d").unwrap().problem;
        for delta in [1e-1, 1e-3, 1e-6] {
            let r = regularize(&p, delta, RegularizationMethod::SmoothedMin).unwrap();
            let e = r.certified_sup_error();
            assert!(e <= delta);
            assert!((e - 0.5 * delta).abs() <= 1e-12, "{e}");
            let h0 = r.value(&[0.0], &[0.0]);
            assert!((h0 + 0.5 * delta).abs() < 1e-15);
        }
    }

    #[test]
    fn smoothed_conjugate_is_consistent() {
        let p = catalog::get("eikonal-1d-costed").unwrap().problem;
        let r = regularize(&p, 0.05, RegularizationMethod::SmoothedMin).unwrap();
        let sp = r.problem();
        for a in [-0.95, -0.2, 0.0, 0.6] {
            let x = [1.3];
            let num = super::super::running_cost_numeric(sp, &x, &[a], None).unwrap();
            let ana = sp.running_cost().unwrap().value(&x, &[a]).finite().unwrap();
            assert!((num.value.finite().unwrap() - ana).abs() < 1e-7);
        }
    }

    #[test]
    fn nonpositive_delta_rejected() {
        let p = catalog::get("eikonal-1d").unwrap().problem;
        for d in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                regularize(&p, d, RegularizationMethod::SmoothedMin),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn nonsmooth_without_family_is_malformed() {
        let p = ControlProblem::norm_cost("bare", 1, 1.0, None)
            .terminal_cost(StateCost::new(|x| x[0], |_| vec![1.0]))
            .terminal_grad_bound(1.0)
            .build()
            .unwrap();
        assert!(matches!(
            regularize(&p, 0.1, RegularizationMethod::ProblemSupplied),
            Err(Error::MalformedProblem(_))
        ));
    }

    #[test]
    fn bad_family_fails_certification() {
        let p = ControlProblem::norm_cost("shifted", 1, 1.0, None)
            .terminal_cost(StateCost::new(|x| x[0], |_| vec![1.0]))
            .terminal_grad_bound(1.0)
            .smooth_family(|d| hyperbolic_norm_smoothing(1.0, None, 4.0 * d))
            .build()
            .unwrap();
        match regularize(&p, 0.1, RegularizationMethod::ProblemSupplied) {
            Err(Error::RegularizationInvalid { measured, .. }) => assert!(measured > 0.1),
            other => panic!("expected certification failure, got {other:?}"),
        }
    }

    #[test]
    fn catalog_family_matches_smoothed_min() {
        let p = catalog::get("eikonal-2d").unwrap().problem;
        let a = regularize(&p, 1e-3, RegularizationMethod::ProblemSupplied).unwrap();
        let b = regularize(&p, 1e-3, RegularizationMethod::SmoothedMin).unwrap();
        for l in [[0.0, 0.0], [0.3, -2.0]] {
            assert_eq!(a.value(&[1.0, 1.0], &l), b.value(&[1.0, 1.0], &l));
        }
    }

    #[test]
    fn smooth_problem_is_its_own_regularization() {
        let p = catalog::get("smooth-quadratic-1d").unwrap().problem;
        let r = regularize(&p, 1e-8, RegularizationMethod::ProblemSupplied).unwrap();
        assert_eq!(r.certified_sup_error(), 0.0);
    }
}
