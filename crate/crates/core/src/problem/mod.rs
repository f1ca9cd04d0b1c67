//! Control problems, Legendre–Fenchel transforms and regularized Hamiltonians.
//!
//! A [`ControlProblem`] bundles a Hamiltonian `H(x, λ)` (concave in `λ`), its
//! partial gradients, the terminal cost `g` and the Lipschitz constants
//!
//! ```text
//! |H(x, λ1) − H(x, λ2)| ≤ C1 |λ1 − λ2|
//! |H(x1, λ) − H(x2, λ)| ≤ C2 |x1 − x2| (1 + |λ|)
//! |g'(x)| ≤ C3
//! ```
//!
//! certified on a bounded working box. The running cost is the conjugate
//! `L(x, α) = sup_λ {−α·λ + H(x, λ)}` and may be `+∞`.

mod conjugate;
mod constants;
mod regularize;

use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, norm, scale};

pub use conjugate::{
    recover_hamiltonian, recover_hamiltonian_with, running_cost_numeric, ConjugatePoint,
    CostSource, RECESSION_SLOPE_TOL,
};
pub use constants::{verify_constants, ConstantCheck, ConstantsReport, Witness};
pub use regularize::{hyperbolic_norm_smoothing, regularize, RegularizationMethod, RegularizedHamiltonian};

pub(crate) use conjugate::conjugate_at;

pub type PairFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type PairVecFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
pub type StateFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type StateVecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type CostFn = Arc<dyn Fn(&[f64], &[f64]) -> ExtendedReal + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
pub type SmoothFamily = Arc<dyn Fn(f64) -> SmoothedForm + Send + Sync>;

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// `+∞` maps to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl From<f64> for ExtendedReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInfinity
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInfinity,
        }
    }
}

impl Add<f64> for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: f64) -> Self {
        self + ExtendedReal::Finite(rhs)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// Hamiltonian value and partial gradients.
#[derive(Clone)]
pub struct Hamiltonian {
    value: PairFn,
    grad_lambda: PairVecFn,
    grad_x: PairVecFn,
}

impl Hamiltonian {
    pub fn new<V, GL, GX>(value: V, grad_lambda: GL, grad_x: GX) -> Self
    where
        V: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        GL: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        GX: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Hamiltonian {
            value: Arc::new(value),
            grad_lambda: Arc::new(grad_lambda),
            grad_x: Arc::new(grad_x),
        }
    }

    pub fn value(&self, x: &[f64], lambda: &[f64]) -> f64 {
        (self.value)(x, lambda)
    }

    pub fn grad_lambda(&self, x: &[f64], lambda: &[f64]) -> Vec<f64> {
        (self.grad_lambda)(x, lambda)
    }

    pub fn grad_x(&self, x: &[f64], lambda: &[f64]) -> Vec<f64> {
        (self.grad_x)(x, lambda)
    }

    pub(crate) fn checked_value(&self, x: &[f64], lambda: &[f64]) -> Result<f64> {
        let v = self.value(x, lambda);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(evaluation_error("hamiltonian", x, lambda))
        }
    }

    pub(crate) fn checked_grad_lambda(&self, x: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
        let g = self.grad_lambda(x, lambda);
        if all_finite(&g) {
            Ok(g)
        } else {
            Err(evaluation_error("hamiltonian lambda-gradient", x, lambda))
        }
    }

    pub(crate) fn checked_grad_x(&self, x: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
        let g = self.grad_x(x, lambda);
        if all_finite(&g) {
            Ok(g)
        } else {
            Err(evaluation_error("hamiltonian x-gradient", x, lambda))
        }
    }
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Hamiltonian { .. }")
    }
}

pub(crate) fn evaluation_error(what: &'static str, x: &[f64], arg: &[f64]) -> Error {
    Error::Evaluation {
        what,
        x: x.to_vec(),
        arg: arg.to_vec(),
    }
}

/// Analytic running cost `L(x, α)` with gradients on the interior of its domain.
#[derive(Clone)]
pub struct RunningCost {
    value: CostFn,
    grad_x: PairVecFn,
    grad_alpha: PairVecFn,
}

impl RunningCost {
    pub fn new<V, GX, GA>(value: V, grad_x: GX, grad_alpha: GA) -> Self
    where
        V: Fn(&[f64], &[f64]) -> ExtendedReal + Send + Sync + 'static,
        GX: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        GA: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        RunningCost {
            value: Arc::new(value),
            grad_x: Arc::new(grad_x),
            grad_alpha: Arc::new(grad_alpha),
        }
    }

    pub fn value(&self, x: &[f64], alpha: &[f64]) -> ExtendedReal {
        (self.value)(x, alpha)
    }

    pub fn grad_x(&self, x: &[f64], alpha: &[f64]) -> Vec<f64> {
        (self.grad_x)(x, alpha)
    }

    pub fn grad_alpha(&self, x: &[f64], alpha: &[f64]) -> Vec<f64> {
        (self.grad_alpha)(x, alpha)
    }
}

impl fmt::Debug for RunningCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RunningCost { .. }")
    }
}

/// A scalar function of the state with its gradient (terminal cost, potentials).
#[derive(Clone)]
pub struct StateCost {
    value: StateFn,
    grad: StateVecFn,
}

impl StateCost {
    pub fn new<V, G>(value: V, grad: G) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        StateCost {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        (self.grad)(x)
    }

    pub(crate) fn checked_value(&self, x: &[f64]) -> Result<f64> {
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(evaluation_error("state cost", x, &[]))
        }
    }

    pub(crate) fn checked_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.grad(x);
        if all_finite(&g) {
            Ok(g)
        } else {
            Err(evaluation_error("state cost gradient", x, &[]))
        }
    }
}

impl fmt::Debug for StateCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("StateCost { .. }")
    }
}

/// A differentiable Hamiltonian together with its conjugate, when known.
#[derive(Clone, Debug)]
pub struct SmoothedForm {
    pub hamiltonian: Hamiltonian,
    pub running_cost: Option<RunningCost>,
}

/// Lipschitz constants of `H` and `g'` on the working box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    /// Lipschitz constant of `H` in `λ`.
    pub c1: f64,
    /// `x`-Lipschitz constant of `H`, relative to `1 + |λ|`.
    pub c2: f64,
    /// Bound on `|g'|`.
    pub c3: f64,
}

impl Constants {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Constants { c1, c2, c3 }
    }

    /// Bound `(C3 + 1) e^{C2 T} − 1` on the discrete duals.
    pub fn dual_bound(&self, horizon: f64) -> f64 {
        (self.c3 + 1.0) * (self.c2 * horizon).exp() - 1.0
    }

    /// Default radius of the `λ`-ball searched by numerical conjugation:
    /// twice the dual bound plus one, and never below `10·C3`.
    pub fn lambda_search_radius(&self, horizon: f64) -> f64 {
        (2.0 * self.dual_bound(horizon) + 1.0).max(10.0 * self.c3)
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidArgument(
                "box bounds must be non-empty and of equal length".into(),
            ));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidArgument(format!(
                "box lower {lower:?} must not exceed upper {upper:?}"
            )));
        }
        Ok(BoxDomain { lower, upper })
    }

    /// `[-half_width, half_width]^dim`
    pub fn cube(dim: usize, half_width: f64) -> Self {
        BoxDomain {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// Box shrunk by `margin` on every side; `None` when it becomes empty.
    pub fn shrink(&self, margin: f64) -> Option<BoxDomain> {
        let lower: Vec<f64> = self.lower.iter().map(|l| l + margin).collect();
        let upper: Vec<f64> = self.upper.iter().map(|u| u - margin).collect();
        if lower.iter().zip(&upper).all(|(l, u)| l <= u) {
            Some(BoxDomain { lower, upper })
        } else {
            None
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| if l < u { rng.gen_range(*l..=*u) } else { *l })
            .collect()
    }
}

/// Uniform sample from the closed Euclidean ball.
pub(crate) fn sample_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if norm(&v) <= 1.0 {
            return scale(&v, radius);
        }
    }
}

/// Known structure of `H`, used by automatic regularization.
#[derive(Clone, Debug)]
pub enum Structure {
    /// `H` is already continuously differentiable.
    Smooth,
    /// `H(x, λ) = −speed·|λ| + ℓ(x)`: nondifferentiable at `λ = 0`.
    NormCost {
        speed: f64,
        potential: Option<StateCost>,
    },
}

/// A terminal-value Hamilton–Jacobi–Bellman problem.
#[derive(Clone)]
pub struct ControlProblem {
    id: String,
    description: String,
    dim: usize,
    horizon: f64,
    hamiltonian: Hamiltonian,
    running_cost: Option<RunningCost>,
    terminal: StateCost,
    constants: Constants,
    exact_value: Option<ExactFn>,
    domain: BoxDomain,
    structure: Structure,
    smooth_family: Option<SmoothFamily>,
    lower_growth: f64,
}

impl fmt::Debug for ControlProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProblem")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("horizon", &self.horizon)
            .field("constants", &self.constants)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl ControlProblem {
    pub fn builder(id: impl Into<String>, dim: usize) -> ProblemBuilder {
        ProblemBuilder::new(id.into(), dim)
    }

    /// Builder preloaded with `H(x, λ) = −speed·|λ| + ℓ(x)`, its subgradients
    /// and the running cost `L = ℓ(x)` on `|α| ≤ speed`, `+∞` outside.
    /// `C1` is set to `speed`; `C2` must still be supplied.
    pub fn norm_cost(
        id: impl Into<String>,
        dim: usize,
        speed: f64,
        potential: Option<StateCost>,
    ) -> ProblemBuilder {
        let pot_h = potential.clone();
        let pot_hx = potential.clone();
        let pot_l = potential.clone();
        let pot_lx = potential.clone();
        let hamiltonian = Hamiltonian::new(
            move |x, l| -speed * norm(l) + pot_h.as_ref().map_or(0.0, |p| p.value(x)),
            move |_x, l| {
                let n = norm(l);
                if n == 0.0 {
                    vec![0.0; l.len()]
                } else {
                    scale(l, -speed / n)
                }
            },
            move |x, _l| pot_hx.as_ref().map_or(vec![0.0; x.len()], |p| p.grad(x)),
        );
        let running_cost = RunningCost::new(
            move |x, a| {
                if norm(a) <= speed * (1.0 + 1e-12) {
                    ExtendedReal::Finite(pot_l.as_ref().map_or(0.0, |p| p.value(x)))
                } else {
                    ExtendedReal::PosInfinity
                }
            },
            move |x, _a| pot_lx.as_ref().map_or(vec![0.0; x.len()], |p| p.grad(x)),
            |_x, a| vec![0.0; a.len()],
        );
        let mut b = ProblemBuilder::new(id.into(), dim)
            .hamiltonian(hamiltonian)
            .running_cost(running_cost);
        b.structure = Structure::NormCost { speed, potential };
        b.constants.c1 = speed;
        b
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn running_cost(&self) -> Option<&RunningCost> {
        self.running_cost.as_ref()
    }

    pub fn terminal_cost(&self) -> &StateCost {
        &self.terminal
    }

    pub fn constants(&self) -> Constants {
        self.constants
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn smooth_family(&self) -> Option<&SmoothFamily> {
        self.smooth_family.as_ref()
    }

    /// Constant `k` in the growth condition `g(x) ≥ −k(1 + |x|)`.
    pub fn lower_growth(&self) -> f64 {
        self.lower_growth
    }

    pub fn exact_value(&self, x: &[f64], t: f64) -> Option<f64> {
        self.exact_value.as_ref().map(|f| f(x, t))
    }

    pub fn has_exact_value(&self) -> bool {
        self.exact_value.is_some()
    }

    pub fn dual_bound(&self) -> f64 {
        self.constants.dual_bound(self.horizon)
    }

    pub fn lambda_search_radius(&self) -> f64 {
        self.constants.lambda_search_radius(self.horizon)
    }

    /// Starts whose reachable box `x ± C1·T` lies inside the working box.
    pub fn safe_starts(&self) -> Option<BoxDomain> {
        self.domain.shrink(self.constants.c1 * self.horizon)
    }

    /// Copy of the problem with a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let mut p = self.clone();
        p.horizon = horizon;
        Ok(p)
    }

    pub(crate) fn check_point(&self, x: &[f64], what: &str) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "{what} has dimension {}, problem `{}` has dimension {}",
                x.len(),
                self.id,
                self.dim
            )));
        }
        if !all_finite(x) {
            return Err(Error::InvalidArgument(format!("{what} {x:?} is not finite")));
        }
        Ok(())
    }
}

/// Builder for [`ControlProblem`].
pub struct ProblemBuilder {
    id: String,
    description: String,
    dim: usize,
    horizon: f64,
    hamiltonian: Option<Hamiltonian>,
    running_cost: Option<RunningCost>,
    terminal: Option<StateCost>,
    constants: Constants,
    exact_value: Option<ExactFn>,
    domain: Option<BoxDomain>,
    structure: Structure,
    smooth_family: Option<SmoothFamily>,
    lower_growth: f64,
}

impl ProblemBuilder {
    fn new(id: String, dim: usize) -> Self {
        ProblemBuilder {
            id,
            description: String::new(),
            dim,
            horizon: 1.0,
            hamiltonian: None,
            running_cost: None,
            terminal: None,
            constants: Constants::new(0.0, 0.0, 0.0),
            exact_value: None,
            domain: None,
            structure: Structure::Smooth,
            smooth_family: None,
            lower_growth: 1.0,
        }
    }

    pub fn description(mut self, text: impl Into<String>) -> Self {
        self.description = text.into();
        self
    }

    pub fn horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn hamiltonian(mut self, h: Hamiltonian) -> Self {
        self.hamiltonian = Some(h);
        self
    }

    pub fn running_cost(mut self, l: RunningCost) -> Self {
        self.running_cost = Some(l);
        self
    }

    pub fn terminal_cost(mut self, g: StateCost) -> Self {
        self.terminal = Some(g);
        self
    }

    pub fn constants(mut self, c: Constants) -> Self {
        self.constants = c;
        self
    }

    pub fn lipschitz_x(mut self, c2: f64) -> Self {
        self.constants.c2 = c2;
        self
    }

    pub fn terminal_grad_bound(mut self, c3: f64) -> Self {
        self.constants.c3 = c3;
        self
    }

    pub fn exact_value<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        self.exact_value = Some(Arc::new(f));
        self
    }

    pub fn domain(mut self, domain: BoxDomain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn smooth_family<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> SmoothedForm + Send + Sync + 'static,
    {
        self.smooth_family = Some(Arc::new(f));
        self
    }

    pub fn lower_growth(mut self, k: f64) -> Self {
        self.lower_growth = k;
        self
    }

    pub fn build(self) -> Result<ControlProblem> {
        if self.dim == 0 {
            return Err(Error::MalformedProblem("dimension must be positive".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::MalformedProblem(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        let c = self.constants;
        if [c.c1, c.c2, c.c3].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::MalformedProblem(format!(
                "constants must be finite and non-negative, got {c:?}"
            )));
        }
        let hamiltonian = self
            .hamiltonian
            .ok_or_else(|| Error::MalformedProblem("missing Hamiltonian".into()))?;
        let terminal = self
            .terminal
            .ok_or_else(|| Error::MalformedProblem("missing terminal cost".into()))?;
        let domain = self
            .domain
            .unwrap_or_else(|| BoxDomain::cube(self.dim, 4.0));
        if domain.dim() != self.dim {
            return Err(Error::MalformedProblem(format!(
                "domain box has dimension {}, expected {}",
                domain.dim(),
                self.dim
            )));
        }
        Ok(ControlProblem {
            id: self.id,
            description: self.description,
            dim: self.dim,
            horizon: self.horizon,
            hamiltonian,
            running_cost: self.running_cost,
            terminal,
            constants: c,
            exact_value: self.exact_value,
            domain,
            structure: self.structure,
            smooth_family: self.smooth_family,
            lower_growth: self.lower_growth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_real_arithmetic() {
        let a = ExtendedReal::Finite(1.0);
        assert_eq!(a + 2.0, ExtendedReal::Finite(3.0));
        assert_eq!(a + ExtendedReal::PosInfinity, ExtendedReal::PosInfinity);
        assert!(ExtendedReal::PosInfinity > ExtendedReal::Finite(1e300));
        assert!(a < ExtendedReal::Finite(1.5));
        assert_eq!(ExtendedReal::from(f64::INFINITY), ExtendedReal::PosInfinity);
    }

    #[test]
    fn dual_bound_matches_closed_form() {
        let c = Constants::new(1.0, 1.0, 1.0);
        let b = c.dual_bound(1.0);
        assert!((b - (2.0 * std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((b - 4.436_563_656_918_09).abs() < 1e-12);
    }

    #[test]
    fn search_radius_respects_floor() {
        let c = Constants::new(1.0, 0.0, 1.0);
        // 2·1 + 1 = 3 < 10·C3
        assert_eq!(c.lambda_search_radius(1.0), 10.0);
        let c = Constants::new(1.0, 2.0, 1.0);
        assert!(c.lambda_search_radius(2.0) > 10.0);
    }

    #[test]
    fn builder_rejects_missing_parts() {
        let err = ControlProblem::builder("x", 1).build().unwrap_err();
        assert!(matches!(err, Error::MalformedProblem(_)));
        let err = ControlProblem::norm_cost("x", 1, 1.0, None)
            .horizon(-1.0)
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::MalformedProblem(_)));
    }

    #[test]
    fn box_shrink_and_contains() {
        let b = BoxDomain::cube(2, 4.0);
        let s = b.shrink(1.0).unwrap();
        assert!(s.contains(&[3.0, -3.0]));
        assert!(!s.contains(&[3.5, 0.0]));
        assert!(b.shrink(5.0).is_none());
    }
}
