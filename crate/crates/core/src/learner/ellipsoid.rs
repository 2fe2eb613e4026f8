use super::{DualState, LearnError, LearnProblem, LearnStatus, OptimizerRun};
use crate::numerics::dense;

/// Iteration budget `⌈2m(m+1) ln(√l / β)⌉` with `β = εη / ((2l+1) log|Ω|)`,
/// where `m` is the dimension of the search subspace.
pub fn ellipsoid_budget(problem: &LearnProblem) -> usize {
    let m = problem.reduced_dim() as f64;
    let l = problem.num_formulas() as f64;
    if m == 0.0 || problem.log_world_count <= 0.0 || problem.eta.is_infinite() {
        return 0;
    }
    let beta = problem.epsilon * problem.eta / ((2.0 * l + 1.0) * problem.log_world_count);
    let iterations = 2.0 * m * (m + 1.0) * (l.sqrt() / beta).ln();
    iterations.ceil().max(1.0) as usize
}

/// Index and sign of a violated box constraint `|λ_i| <= R`.
fn violated_box(problem: &LearnProblem, lambda: &[f64]) -> Option<(usize, f64)> {
    let limit = problem.radius * (1.0 + 1e-12);
    lambda
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > limit)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, x)| (i, x.signum()))
}

/// Central-cut ellipsoid method over the search subspace, starting from the
/// ball of radius `R√l` around the origin. Returns the best feasible center.
pub fn ellipsoid_maximize(problem: &LearnProblem) -> Result<OptimizerRun, LearnError> {
    let m = problem.reduced_dim();
    let l = problem.num_formulas();
    let mut best = problem.state(vec![0.0; l])?;
    let budget = ellipsoid_budget(problem);
    if m == 0 || problem.is_solved(&best) {
        return Ok(OptimizerRun { state: best, iterations: 0, status: LearnStatus::Converged });
    }
    let r0 = problem.radius * (l as f64).sqrt();
    if m == 1 {
        return bisect(problem, best, r0, budget);
    }
    let mut center = vec![0.0; m];
    let mut shape: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| if i == j { r0 * r0 } else { 0.0 }).collect()).collect();
    let mf = m as f64;
    for it in 1..=budget {
        let lambda = problem.lift(&center);
        // Keep the half {x : a·(x - center) <= 0}.
        let a = match violated_box(problem, &lambda) {
            Some((i, sign)) => problem.basis.iter().map(|b| sign * b[i]).collect(),
            None => {
                let state = problem.state(lambda)?;
                let a: Vec<f64> = problem.reduce(&state.gradient).iter().map(|g| -g).collect();
                if state.value > best.value {
                    best = state;
                    if problem.is_solved(&best) {
                        return Ok(OptimizerRun { state: best, iterations: it, status: LearnStatus::Converged });
                    }
                }
                a
            }
        };
        let pa = dense::mat_vec(&shape, &a);
        let apa = dense::dot(&a, &pa);
        if apa.is_nan() || apa <= 0.0 || apa.is_infinite() {
            return Ok(OptimizerRun { state: best, iterations: it, status: LearnStatus::Converged });
        }
        let b: Vec<f64> = pa.iter().map(|x| x / apa.sqrt()).collect();
        dense::axpy(-1.0 / (mf + 1.0), &b, &mut center);
        let factor = mf * mf / (mf * mf - 1.0);
        for (i, row) in shape.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = factor * (*x - 2.0 / (mf + 1.0) * b[i] * b[j]);
            }
        }
    }
    Ok(OptimizerRun { state: best, iterations: budget, status: LearnStatus::Converged })
}

/// The one-dimensional case, where the ellipsoid degenerates to an interval.
fn bisect(problem: &LearnProblem, mut best: DualState, r0: f64, budget: usize) -> Result<OptimizerRun, LearnError> {
    let (mut lo, mut hi) = (-r0, r0);
    for it in 1..=budget {
        let mid = 0.5 * (lo + hi);
        let lambda = problem.lift(&[mid]);
        let slope = match violated_box(problem, &lambda) {
            Some((i, sign)) => -sign * problem.basis[0][i],
            None => {
                let state = problem.state(lambda)?;
                let slope = problem.reduce(&state.gradient)[0];
                if state.value > best.value {
                    best = state;
                    if problem.is_solved(&best) {
                        return Ok(OptimizerRun { state: best, iterations: it, status: LearnStatus::Converged });
                    }
                }
                slope
            }
        };
        if slope > 0.0 {
            lo = mid;
        } else if slope < 0.0 {
            hi = mid;
        } else {
            break;
        }
    }
    Ok(OptimizerRun { state: best, iterations: budget, status: LearnStatus::Converged })
}
