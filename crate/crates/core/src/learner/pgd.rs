use super::{DualState, LearnError, LearnProblem, LearnStatus, OptimizerRun};
use crate::numerics::dense;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;

/// Euclidean projection onto `{λ : A_eq λ = 0} ∩ {‖λ‖∞ <= R}` by Dykstra's
/// alternating projections.
fn project_feasible(problem: &LearnProblem, lambda: &[f64]) -> Vec<f64> {
    let onto_null = |v: &[f64]| problem.lift(&problem.reduce(v));
    let mut x = onto_null(lambda);
    if problem.in_box(&x) {
        return x;
    }
    let r = problem.radius;
    let l = lambda.len();
    let mut y = lambda.to_vec();
    let (mut p, mut q) = (vec![0.0; l], vec![0.0; l]);
    for _ in 0..10_000 {
        let boxed: Vec<f64> = y.iter().zip(&p).map(|(a, b)| (a + b).clamp(-r, r)).collect();
        p = y.iter().zip(&p).zip(&boxed).map(|((a, b), c)| a + b - c).collect();
        let shifted: Vec<f64> = boxed.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = onto_null(&shifted);
        q = shifted.iter().zip(&next).map(|(a, b)| a - b).collect();
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next.clone();
        y = next;
        if moved <= 1e-15 * (1.0 + r) {
            break;
        }
    }
    x
}

/// Projected gradient ascent from the origin with Armijo backtracking that
/// halves the step from 1 each iteration.
pub fn pgd_maximize(problem: &LearnProblem, max_iterations: usize) -> Result<OptimizerRun, LearnError> {
    let l = problem.num_formulas();
    let mut state = problem.state(vec![0.0; l])?;
    if problem.reduced_dim() == 0 {
        return Ok(OptimizerRun { state, iterations: 0, status: LearnStatus::Converged });
    }
    for it in 0..max_iterations {
        if problem.is_solved(&state) {
            return Ok(OptimizerRun { state, iterations: it, status: LearnStatus::Converged });
        }
        let direction = problem.lift(&problem.reduce(&state.gradient));
        let mut step = 1.0;
        let next = loop {
            let mut target = state.lambda.clone();
            dense::axpy(step, &direction, &mut target);
            let cand = project_feasible(problem, &target);
            let moved: Vec<f64> = cand.iter().zip(&state.lambda).map(|(a, b)| a - b).collect();
            let candidate: DualState = problem.state(cand)?;
            if candidate.value >= state.value + ARMIJO * dense::dot(&state.gradient, &moved) {
                break Some(candidate);
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        match next {
            Some(s) => state = s,
            None => return Ok(OptimizerRun { state, iterations: it, status: LearnStatus::BudgetExhausted }),
        }
    }
    let status = if problem.is_solved(&state) { LearnStatus::Converged } else { LearnStatus::BudgetExhausted };
    Ok(OptimizerRun { state, iterations: max_iterations, status })
}
