//! Maximum-likelihood weight learning by maximizing the dual criterion
//! `L(λ) = ⟨λ, θ⟩ - log Σ_ω exp⟨λ, Q_ω⟩` over `{λ : A_eq λ = 0, ‖λ‖∞ <= R}`.

mod ellipsoid;
mod pgd;

pub use ellipsoid::{ellipsoid_budget, ellipsoid_maximize};
pub use pgd::pgd_maximize;

use std::cell::Cell;

use crate::logic::{stat_vector, LogicError, ModelSpec, World};
use crate::numerics::linalg::{self, Matrix};
use crate::numerics::rational::to_f64;
use crate::numerics::{dense, Rational};
use crate::polytope::{Facet, FacetMode, Membership, Polytope, PolytopeError};
use crate::wfomc::{LiftedModel, WfomcError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Optimizer {
    Pgd,
    Ellipsoid,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Pgd => "pgd",
            Optimizer::Ellipsoid => "ellipsoid",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnOptions {
    pub epsilon: f64,
    /// Overrides the computed interiority.
    pub eta: Option<f64>,
    pub optimizer: Optimizer,
    pub facets: FacetMode,
    /// Iteration cap for gradient ascent; the ellipsoid budget is derived.
    pub max_iterations: usize,
}

impl Default for LearnOptions {
    fn default() -> Self {
        LearnOptions { epsilon: 1e-3, eta: None, optimizer: Optimizer::Pgd, facets: FacetMode::Auto, max_iterations: 20_000 }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum LearnError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("eta must be positive, got {0}")]
    InvalidEta(f64),
    #[error("expected {expected} statistics, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("infeasible statistics: no world distribution has these expected statistics")]
    Infeasible { normal: Vec<Rational>, offset: Rational },
    #[error("zero interiority: the statistics lie on the boundary of the marginal polytope, so some weight diverges")]
    ZeroInteriority { facet: Option<Facet> },
    #[error("interiority needs facets in affine dimension {0}; pass an explicit eta or request full facet enumeration")]
    InteriorityUnavailable(usize),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Wfomc(#[from] WfomcError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A dual maximization instance with everything derived from the polytope.
#[derive(Debug)]
pub struct LearnProblem {
    pub model: ModelSpec,
    pub n: usize,
    pub theta: Vec<Rational>,
    pub theta_f64: Vec<f64>,
    pub epsilon: f64,
    pub eta: f64,
    /// `log|Ω| / η`; the ∞-norm radius of the search box.
    pub radius: f64,
    pub log_world_count: f64,
    pub a_eq: Matrix,
    pub c_eq: Vec<Rational>,
    /// Orthonormal rows spanning `null(A_eq)`.
    pub basis: Vec<Vec<f64>>,
    lifted: LiftedModel,
    calls: Cell<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualState {
    pub lambda: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub projected_gradient_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnStatus {
    Converged,
    BudgetExhausted,
}

/// Outcome of an optimizer run: the best state and how it was reached.
#[derive(Clone, Debug)]
pub struct OptimizerRun {
    pub state: DualState,
    pub iterations: usize,
    pub status: LearnStatus,
}

#[derive(Clone, Debug)]
pub struct LearnReport {
    pub lambda: Vec<f64>,
    /// Per-grounding MLN weights `λ_i / (n! / (n-k_i)!)`.
    pub weights: Vec<f64>,
    pub value: f64,
    pub expectations: Vec<f64>,
    pub theta: Vec<Rational>,
    pub moment_gap: f64,
    /// Upper bound on `L* - L(λ)` from the gradient and the bounding box.
    pub certified_gap: f64,
    pub eta: f64,
    pub radius: f64,
    pub log_world_count: f64,
    pub optimizer: Optimizer,
    pub iterations: usize,
    pub oracle_calls: usize,
    pub status: LearnStatus,
}

impl LearnProblem {
    /// Checks `θ` against the polytope and derives `η`, `R` and the search subspace.
    pub fn new(model: &ModelSpec, n: usize, theta: &[Rational], options: &LearnOptions) -> Result<Self, LearnError> {
        if !(options.epsilon > 0.0 && options.epsilon.is_finite()) {
            return Err(LearnError::InvalidEpsilon(options.epsilon));
        }
        if let Some(eta) = options.eta {
            if eta.is_nan() || eta <= 0.0 {
                return Err(LearnError::InvalidEta(eta));
            }
        }
        let l = model.num_soft();
        if theta.len() != l {
            return Err(LearnError::DimensionMismatch { expected: l, found: theta.len() });
        }
        let facet_mode = if options.eta.is_some() { FacetMode::Off } else { options.facets };
        let polytope = Polytope::build(model, n, facet_mode)?;
        match polytope.membership(theta) {
            Membership::Outside { normal, offset } => return Err(LearnError::Infeasible { normal, offset }),
            Membership::Boundary { facet } => return Err(LearnError::ZeroInteriority { facet }),
            Membership::Inside { .. } => {}
        }
        let eta = match options.eta {
            Some(eta) => eta,
            None => {
                let interiority = polytope.interiority(theta).ok_or(LearnError::InteriorityUnavailable(polytope.dim()))?;
                if interiority.eta <= 0.0 {
                    let facet = interiority.facet.and_then(|i| polytope.facets.as_ref().map(|f| f[i].clone()));
                    return Err(LearnError::ZeroInteriority { facet });
                }
                interiority.eta
            }
        };
        let lifted = LiftedModel::new(model, n)?;
        let log_world_count = lifted.log_world_count().ln();
        let radius = if eta.is_infinite() { 0.0 } else { log_world_count / eta };
        let a_eq = polytope.a_eq().clone();
        let null = linalg::orthogonalize(&linalg::null_space(&a_eq, l));
        let basis = dense::normalize_rows(&linalg::to_f64_matrix(&null));
        Ok(LearnProblem {
            model: model.clone(),
            n,
            theta: theta.to_vec(),
            theta_f64: theta.iter().map(to_f64).collect(),
            epsilon: options.epsilon,
            eta,
            radius,
            log_world_count,
            a_eq,
            c_eq: polytope.c_eq().to_vec(),
            basis,
            lifted,
            calls: Cell::new(0),
        })
    }

    pub fn num_formulas(&self) -> usize {
        self.theta.len()
    }

    /// Dimension of the search subspace.
    pub fn reduced_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn oracle_calls(&self) -> usize {
        self.calls.get()
    }

    pub fn lifted(&self) -> &LiftedModel {
        &self.lifted
    }

    /// `λ = Bᵀ z` for reduced coordinates `z`.
    pub fn lift(&self, z: &[f64]) -> Vec<f64> {
        dense::mat_t_vec(&self.basis, z, self.num_formulas())
    }

    /// `z = B λ`.
    pub fn reduce(&self, lambda: &[f64]) -> Vec<f64> {
        dense::mat_vec(&self.basis, lambda)
    }

    /// Value and gradient of the dual criterion from one lifted evaluation.
    pub fn dual_oracle(&self, lambda: &[f64]) -> Result<(f64, Vec<f64>), LearnError> {
        self.calls.set(self.calls.get() + 1);
        let eval = self.lifted.evaluate(lambda);
        let e = eval.expectations.ok_or(WfomcError::Unsatisfiable(self.n))?;
        let value = dense::dot(lambda, &self.theta_f64) - eval.log_z.ln();
        let grad = self.theta_f64.iter().zip(&e).map(|(t, x)| t - x).collect();
        Ok((value, grad))
    }

    pub fn state(&self, lambda: Vec<f64>) -> Result<DualState, LearnError> {
        let (value, gradient) = self.dual_oracle(&lambda)?;
        let projected_gradient_norm = dense::norm(&self.reduce(&gradient));
        Ok(DualState { lambda, value, gradient, projected_gradient_norm })
    }

    /// `‖g_p‖ (log|Ω|/η + ‖λ‖)`, which bounds `L* - L(λ)` by concavity.
    pub fn certified_gap(&self, state: &DualState) -> f64 {
        let reach = if self.eta.is_infinite() { 0.0 } else { self.log_world_count / self.eta };
        state.projected_gradient_norm * (reach + dense::norm(&state.lambda))
    }

    /// Moment gap within `√ε` and dual gap certified within `ε`.
    pub fn is_solved(&self, state: &DualState) -> bool {
        dense::norm(&state.gradient) <= self.epsilon.sqrt() && self.certified_gap(state) <= self.epsilon
    }

    pub fn in_box(&self, lambda: &[f64]) -> bool {
        dense::norm_inf(lambda) <= self.radius * (1.0 + 1e-12)
    }

    fn report(&self, run: OptimizerRun, optimizer: Optimizer) -> Result<LearnReport, LearnError> {
        let state = run.state;
        let expectations: Vec<f64> = self.theta_f64.iter().zip(&state.gradient).map(|(t, g)| t - g).collect();
        let weights = state.lambda.iter().zip(self.lifted.scales()).map(|(l, s)| l * s).collect();
        let moment_gap = dense::norm(&state.gradient);
        let status = if moment_gap <= self.epsilon.sqrt() { run.status } else { LearnStatus::BudgetExhausted };
        Ok(LearnReport {
            weights,
            value: state.value,
            expectations,
            theta: self.theta.clone(),
            moment_gap,
            certified_gap: self.certified_gap(&state),
            eta: self.eta,
            radius: self.radius,
            log_world_count: self.log_world_count,
            optimizer,
            iterations: run.iterations,
            oracle_calls: self.oracle_calls(),
            status,
            lambda: state.lambda,
        })
    }
}

/// `v - A_eqᵀ (A_eq A_eqᵀ)⁻¹ A_eq v`; `A_eq` must have independent rows.
pub fn project(v: &[f64], a_eq: &Matrix) -> Vec<f64> {
    if a_eq.is_empty() {
        return v.to_vec();
    }
    let a = linalg::to_f64_matrix(a_eq);
    let gram: Vec<Vec<f64>> = a.iter().map(|r| a.iter().map(|s| dense::dot(r, s)).collect()).collect();
    let y = dense::solve(&gram, &dense::mat_vec(&a, v)).expect("rows of the equality system must be independent");
    let correction = dense::mat_t_vec(&a, &y, v.len());
    v.iter().zip(&correction).map(|(x, c)| x - c).collect()
}

/// Learns weights matching the statistics `θ`.
pub fn learn(model: &ModelSpec, n: usize, theta: &[Rational], options: &LearnOptions) -> Result<LearnReport, LearnError> {
    let problem = LearnProblem::new(model, n, theta, options)?;
    let run = match options.optimizer {
        Optimizer::Pgd => pgd_maximize(&problem, options.max_iterations)?,
        Optimizer::Ellipsoid => ellipsoid_maximize(&problem)?,
    };
    problem.report(run, options.optimizer)
}

/// Learns weights from a training world, using its statistics as `θ`.
pub fn learn_from_world(model: &ModelSpec, world: &World, options: &LearnOptions) -> Result<LearnReport, LearnError> {
    let theta = stat_vector(model, world)?;
    learn(model, world.domain_size(), &theta.0, options)
}
