//! Small dense interior-point kernel for smooth convex subproblems with
//! inequality constraints and optional box bounds.
//!
//! The solver follows the classic log-barrier recipe: for a decreasing
//! barrier weight it centers `f(x) - mu * sum ln(-g_k(x))` with damped
//! Newton steps, shrinking steps until every constraint stays strictly
//! negative.  A phase-I variant minimizes the worst violation to either
//! produce a strictly feasible point or certify that none exists.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("point has dimension {point} but the problem has dimension {dim}")]
    DimensionMismatch { point: usize, dim: usize },
    #[error("{what} has dimension {actual} but the problem has dimension {dim}")]
    ComponentDimension {
        what: &'static str,
        actual: usize,
        dim: usize,
    },
    #[error("starting point is not strictly feasible (worst constraint value {max_violation})")]
    InfeasibleStart { max_violation: f64 },
    #[error("Newton system could not be factorized even with diagonal damping")]
    Factorization,
    #[error("{what} evaluated to a non-finite value at the current point")]
    NonFinite { what: &'static str },
}

/// A twice-differentiable scalar function of `dim` variables.
///
/// `hessian` returns the matrix in row-major order with `dim * dim` entries.
pub trait SmoothFn {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, x: &[f64]) -> Vec<f64>;
}

/// Affine function `coeffs . x + offset`, usable as objective or as the
/// constraint `coeffs . x + offset <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFn {
    pub coeffs: Vec<f64>,
    pub offset: f64,
}

impl LinearFn {
    pub fn new(coeffs: Vec<f64>, offset: f64) -> Self {
        Self { coeffs, offset }
    }

    /// Constraint `x[j] <= bound`.
    pub fn upper_bound(dim: usize, j: usize, bound: f64) -> Self {
        let mut coeffs = vec![0.0; dim];
        coeffs[j] = 1.0;
        Self::new(coeffs, -bound)
    }

    /// Constraint `x[j] >= bound`.
    pub fn lower_bound(dim: usize, j: usize, bound: f64) -> Self {
        let mut coeffs = vec![0.0; dim];
        coeffs[j] = -1.0;
        Self::new(coeffs, bound)
    }
}

impl SmoothFn for LinearFn {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .sum::<f64>()
            + self.offset
    }

    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.coeffs.clone()
    }

    fn hessian(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.coeffs.len() * self.coeffs.len()]
    }
}

/// Adapts three closures into a [`SmoothFn`] so callers can define
/// objectives without a dedicated type.
pub struct ClosureFn<V, G, H>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    H: Fn(&[f64]) -> Vec<f64>,
{
    dim: usize,
    value: V,
    gradient: G,
    hessian: H,
}

impl<V, G, H> ClosureFn<V, G, H>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    H: Fn(&[f64]) -> Vec<f64>,
{
    pub fn new(dim: usize, value: V, gradient: G, hessian: H) -> Self {
        Self {
            dim,
            value,
            gradient,
            hessian,
        }
    }
}

impl<V, G, H> SmoothFn for ClosureFn<V, G, H>
where
    V: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    H: Fn(&[f64]) -> Vec<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        (self.hessian)(x)
    }
}

/// A convex minimization problem: smooth objective, smooth constraints
/// `g_k(x) <= 0`, and optional per-coordinate bounds.
pub struct ConvexSubproblem {
    pub dim: usize,
    pub objective: Box<dyn SmoothFn>,
    pub constraints: Vec<Box<dyn SmoothFn>>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl ConvexSubproblem {
    pub fn new(dim: usize, objective: Box<dyn SmoothFn>, constraints: Vec<Box<dyn SmoothFn>>) -> Self {
        Self {
            dim,
            objective,
            constraints,
            lower: vec![None; dim],
            upper: vec![None; dim],
        }
    }

    pub fn with_bounds(mut self, lower: Vec<Option<f64>>, upper: Vec<Option<f64>>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    fn validate(&self) -> Result<(), KernelError> {
        if self.objective.dim() != self.dim {
            return Err(KernelError::ComponentDimension {
                what: "objective",
                actual: self.objective.dim(),
                dim: self.dim,
            });
        }
        for c in &self.constraints {
            if c.dim() != self.dim {
                return Err(KernelError::ComponentDimension {
                    what: "constraint",
                    actual: c.dim(),
                    dim: self.dim,
                });
            }
        }
        for (what, bounds) in [("lower bounds", &self.lower), ("upper bounds", &self.upper)] {
            if bounds.len() != self.dim {
                return Err(KernelError::ComponentDimension {
                    what,
                    actual: bounds.len(),
                    dim: self.dim,
                });
            }
        }
        Ok(())
    }

    /// All constraints including bounds, materialized as one list.
    fn bound_constraints(&self) -> Vec<LinearFn> {
        let mut out = Vec::new();
        for (j, b) in self.lower.iter().enumerate() {
            if let Some(lb) = b {
                out.push(LinearFn::lower_bound(self.dim, j, *lb));
            }
        }
        for (j, b) in self.upper.iter().enumerate() {
            if let Some(ub) = b {
                out.push(LinearFn::upper_bound(self.dim, j, *ub));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Target duality gap; the barrier weight is driven below
    /// `tolerance / max(1, #constraints)`.
    pub tolerance: f64,
    /// Cap on total Newton steps across all barrier stages.
    pub max_iterations: usize,
    pub barrier_init: f64,
    pub barrier_reduction: f64,
    pub ls_backtrack: f64,
    pub ls_sufficient_decrease: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 600,
            barrier_init: 1.0,
            barrier_reduction: 0.2,
            ls_backtrack: 0.5,
            ls_sufficient_decrease: 1e-4,
        }
    }
}

/// First-order optimality measures at the returned point.  `stationarity` is
/// the norm of the Lagrangian gradient with barrier multipliers
/// `mu / (-g_k)`, `complementarity` is the common value `mu` of every
/// product `lambda_k * (-g_k)`, and `max_violation` is the positive part of
/// the worst constraint value (zero for an interior point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDiagnostics {
    pub iterations: usize,
    pub stationarity: f64,
    pub complementarity: f64,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub diagnostics: KernelDiagnostics,
}

/// Outcome of the phase-I search.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// A point with every constraint strictly negative.
    Feasible(Vec<f64>),
    /// No such point exists; `best_violation` is the smallest achievable
    /// worst-case constraint value (nonnegative).
    Infeasible { best_violation: f64 },
}

const MU_MIN: f64 = 1e-12;
const MAX_INNER_STEPS: usize = 60;
const MAX_BACKTRACKS: usize = 120;

struct BarrierState {
    x: DVector<f64>,
    mu: f64,
    iterations: usize,
    stationarity: f64,
}

fn barrier_value(
    objective: &dyn SmoothFn,
    constraints: &[&dyn SmoothFn],
    mu: f64,
    x: &[f64],
) -> f64 {
    let mut total = objective.value(x);
    for g in constraints {
        let v = g.value(x);
        if v >= 0.0 {
            return f64::INFINITY;
        }
        total -= mu * (-v).ln();
    }
    if total.is_nan() {
        f64::INFINITY
    } else {
        total
    }
}

fn barrier_gradient_hessian(
    objective: &dyn SmoothFn,
    constraints: &[&dyn SmoothFn],
    mu: f64,
    x: &[f64],
) -> Result<(DVector<f64>, DMatrix<f64>), KernelError> {
    let dim = x.len();
    let mut grad = DVector::from_vec(objective.gradient(x));
    let mut hess = DMatrix::from_row_slice(dim, dim, &objective.hessian(x));
    for g in constraints {
        let v = g.value(x);
        if !v.is_finite() {
            return Err(KernelError::NonFinite { what: "constraint" });
        }
        let gg = DVector::from_vec(g.gradient(x));
        let gh = DMatrix::from_row_slice(dim, dim, &g.hessian(x));
        let inv = 1.0 / (-v);
        grad.axpy(mu * inv, &gg, 1.0);
        hess += (mu * inv * inv) * &gg * gg.transpose() + (mu * inv) * gh;
    }
    if grad.iter().any(|v| !v.is_finite()) || hess.iter().any(|v| !v.is_finite()) {
        return Err(KernelError::NonFinite { what: "derivative" });
    }
    Ok((grad, hess))
}

fn solve_newton_system(
    hess: &DMatrix<f64>,
    grad: &DVector<f64>,
) -> Result<DVector<f64>, KernelError> {
    let dim = grad.len();
    let scale = hess
        .diagonal()
        .iter()
        .fold(1.0_f64, |m, &d| m.max(d.abs()));
    let mut ridge = 0.0;
    for _ in 0..10 {
        let mut h = hess.clone();
        if ridge > 0.0 {
            for j in 0..dim {
                h[(j, j)] += ridge;
            }
        }
        if let Some(chol) = h.cholesky() {
            return Ok(chol.solve(&(-grad)));
        }
        ridge = if ridge == 0.0 {
            scale * 1e-12
        } else {
            ridge * 100.0
        };
    }
    Err(KernelError::Factorization)
}

/// Centers the barrier objective for a fixed schedule of weights.  After
/// every accepted Newton step `stop_early` sees the iterate and may abort
/// the whole minimization, which phase-I uses to exit as soon as a strictly
/// feasible point appears.
fn barrier_minimize(
    objective: &dyn SmoothFn,
    constraints: &[&dyn SmoothFn],
    x0: DVector<f64>,
    options: &KernelOptions,
    stop_early: &mut dyn FnMut(&[f64]) -> bool,
) -> Result<BarrierState, KernelError> {
    let m = constraints.len();
    let mut state = BarrierState {
        x: x0,
        mu: if m == 0 { 0.0 } else { options.barrier_init },
        iterations: 0,
        stationarity: f64::INFINITY,
    };
    let mu_target = options.tolerance / (m.max(1) as f64);

    loop {
        let mu = state.mu;
        for _ in 0..MAX_INNER_STEPS {
            if state.iterations >= options.max_iterations {
                return Ok(state);
            }
            let (grad, hess) =
                barrier_gradient_hessian(objective, constraints, mu, state.x.as_slice())?;
            state.stationarity = grad.norm();
            let step = solve_newton_system(&hess, &grad)?;
            let decrement = -grad.dot(&step);
            if decrement <= 2.0 * f64::EPSILON * (1.0 + state.stationarity) {
                break;
            }
            let phi0 = barrier_value(objective, constraints, mu, state.x.as_slice());
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..MAX_BACKTRACKS {
                let cand = &state.x + t * &step;
                let phi = barrier_value(objective, constraints, mu, cand.as_slice());
                if phi <= phi0 - options.ls_sufficient_decrease * t * decrement {
                    state.x = cand;
                    accepted = true;
                    break;
                }
                t *= options.ls_backtrack;
            }
            state.iterations += 1;
            if !accepted {
                break;
            }
            if stop_early(state.x.as_slice()) {
                return Ok(state);
            }
            if decrement * 1.0_f64.min(t) <= 2.0 * (mu.max(MU_MIN)) * 1e-4 {
                break;
            }
        }
        if m == 0 || mu <= mu_target || mu <= MU_MIN {
            let (grad, _) =
                barrier_gradient_hessian(objective, constraints, mu, state.x.as_slice())?;
            state.stationarity = grad.norm();
            return Ok(state);
        }
        state.mu = (mu * options.barrier_reduction).max(MU_MIN.min(mu_target));
    }
}

fn check_start(
    constraints: &[&dyn SmoothFn],
    x0: &[f64],
) -> Result<(), KernelError> {
    let worst = constraints
        .iter()
        .map(|g| g.value(x0))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst >= 0.0 {
        return Err(KernelError::InfeasibleStart {
            max_violation: worst,
        });
    }
    Ok(())
}

/// Minimizes the subproblem from a strictly feasible starting point.
pub fn solve(
    problem: &ConvexSubproblem,
    x0: &[f64],
    options: &KernelOptions,
) -> Result<KernelSolution, KernelError> {
    problem.validate()?;
    if x0.len() != problem.dim {
        return Err(KernelError::DimensionMismatch {
            point: x0.len(),
            dim: problem.dim,
        });
    }
    let bounds = problem.bound_constraints();
    let mut all: Vec<&dyn SmoothFn> = Vec::with_capacity(problem.constraints.len() + bounds.len());
    for c in &problem.constraints {
        all.push(c.as_ref());
    }
    for b in &bounds {
        all.push(b);
    }
    check_start(&all, x0)?;

    let state = barrier_minimize(
        problem.objective.as_ref(),
        &all,
        DVector::from_column_slice(x0),
        options,
        &mut |_| false,
    )?;
    let x = state.x.as_slice().to_vec();
    let worst = all
        .iter()
        .map(|g| g.value(&x))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(KernelSolution {
        objective: problem.objective.value(&x),
        diagnostics: KernelDiagnostics {
            iterations: state.iterations,
            stationarity: state.stationarity,
            complementarity: state.mu,
            max_violation: worst.max(0.0),
        },
        x,
    })
}

/// Constraint of the phase-I problem: `g(x) - s <= 0` over `(x, s)`.
struct Relaxed<'a> {
    inner: &'a dyn SmoothFn,
    dim: usize,
}

impl SmoothFn for Relaxed<'_> {
    fn dim(&self) -> usize {
        self.dim + 1
    }

    fn value(&self, xs: &[f64]) -> f64 {
        self.inner.value(&xs[..self.dim]) - xs[self.dim]
    }

    fn gradient(&self, xs: &[f64]) -> Vec<f64> {
        let mut g = self.inner.gradient(&xs[..self.dim]);
        g.push(-1.0);
        g
    }

    fn hessian(&self, xs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let inner = self.inner.hessian(&xs[..n]);
        let mut h = vec![0.0; (n + 1) * (n + 1)];
        for r in 0..n {
            h[r * (n + 1)..r * (n + 1) + n].copy_from_slice(&inner[r * n..(r + 1) * n]);
        }
        h
    }
}

/// Searches for a strictly feasible point of the subproblem by minimizing
/// the worst constraint value, starting from an arbitrary `hint`.  Returns
/// the first point found with every constraint below `-margin`
/// (`margin = 1e-7`), or an infeasibility certificate when the minimized
/// worst value stays nonnegative.
pub fn find_strictly_feasible(
    problem: &ConvexSubproblem,
    hint: &[f64],
    options: &KernelOptions,
) -> Result<Feasibility, KernelError> {
    problem.validate()?;
    if hint.len() != problem.dim {
        return Err(KernelError::DimensionMismatch {
            point: hint.len(),
            dim: problem.dim,
        });
    }
    const MARGIN: f64 = 1e-7;
    let bounds = problem.bound_constraints();
    let mut all: Vec<&dyn SmoothFn> = Vec::with_capacity(problem.constraints.len() + bounds.len());
    for c in &problem.constraints {
        all.push(c.as_ref());
    }
    for b in &bounds {
        all.push(b);
    }
    if all.is_empty() {
        return Ok(Feasibility::Feasible(hint.to_vec()));
    }
    let worst0 = all
        .iter()
        .map(|g| g.value(hint))
        .fold(f64::NEG_INFINITY, f64::max);
    if !worst0.is_finite() {
        return Err(KernelError::NonFinite { what: "constraint" });
    }
    if worst0 < -MARGIN {
        return Ok(Feasibility::Feasible(hint.to_vec()));
    }

    let dim = problem.dim;
    let relaxed: Vec<Relaxed> = all.iter().map(|&inner| Relaxed { inner, dim }).collect();
    let refs: Vec<&dyn SmoothFn> = relaxed.iter().map(|r| r as &dyn SmoothFn).collect();
    let mut objective_coeffs = vec![0.0; dim + 1];
    objective_coeffs[dim] = 1.0;
    let objective = LinearFn::new(objective_coeffs, 0.0);

    let mut start = hint.to_vec();
    start.push(worst0 + 1.0);

    let mut found: Option<Vec<f64>> = None;
    let phase1_options = KernelOptions {
        tolerance: (MARGIN * 1e-2).min(options.tolerance * 100.0),
        ..*options
    };
    let state = barrier_minimize(
        &objective,
        &refs,
        DVector::from_vec(start),
        &phase1_options,
        &mut |xs| {
            let worst = all
                .iter()
                .map(|g| g.value(&xs[..dim]))
                .fold(f64::NEG_INFINITY, f64::max);
            if worst < -MARGIN {
                found = Some(xs[..dim].to_vec());
                true
            } else {
                false
            }
        },
    )?;
    if let Some(x) = found {
        return Ok(Feasibility::Feasible(x));
    }
    let x = state.x.as_slice();
    let worst = all
        .iter()
        .map(|g| g.value(&x[..dim]))
        .fold(f64::NEG_INFINITY, f64::max);
    if worst < -MARGIN {
        return Ok(Feasibility::Feasible(x[..dim].to_vec()));
    }
    Ok(Feasibility::Infeasible {
        best_violation: worst.max(0.0),
    })
}
