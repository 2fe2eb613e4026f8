//! Exact two-phase simplex over big rationals with Bland's rule.
//!
//! Problems are `maximize cᵀx` subject to linear rows (`<=`, `>=`, `=`) and
//! `x >= 0`. Infeasibility comes with a Farkas certificate; optima come with
//! dual multipliers.

use num_traits::{One, Signed, Zero};

use super::rational::{dot, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Maximized. Empty means the zero objective (pure feasibility).
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
    /// One multiplier per constraint: `>= 0` for `<=` rows, `<= 0` for `>=` rows,
    /// with `Aᵀu >= c` and `bᵀu = value`.
    pub duals: Vec<Rational>,
}

/// Multipliers `f` with `Σ fᵢ aᵢ <= 0` componentwise, `fᵢ <= 0` on `<=` rows,
/// `fᵢ >= 0` on `>=` rows and `fᵀb > 0`. Any such `f` proves infeasibility.
#[derive(Clone, Debug)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn maximize(mut self, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), self.num_vars);
        self.objective = objective;
        self
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width mismatch");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        let outcome = Tableau::new(self).run(self);
        if cfg!(debug_assertions) {
            match &outcome {
                LpOutcome::Optimal(sol) => debug_assert!(sol.verify(self), "dual certificate check failed"),
                LpOutcome::Infeasible(cert) => debug_assert!(cert.verify(self), "Farkas certificate check failed"),
                LpOutcome::Unbounded => {}
            }
        }
        outcome
    }

    fn objective_coeff(&self, j: usize) -> Rational {
        self.objective.get(j).cloned().unwrap_or_else(Rational::zero)
    }
}

impl FarkasCertificate {
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        let f = &self.multipliers;
        if f.len() != lp.constraints.len() {
            return false;
        }
        let signs_ok = lp.constraints.iter().zip(f).all(|(c, fi)| match c.relation {
            Relation::Le => !fi.is_positive(),
            Relation::Ge => !fi.is_negative(),
            Relation::Eq => true,
        });
        let columns_ok = (0..lp.num_vars).all(|j| {
            let s = lp.constraints.iter().zip(f).fold(Rational::zero(), |acc, (c, fi)| acc + fi * &c.coeffs[j]);
            !s.is_positive()
        });
        let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
        signs_ok && columns_ok && dot(f, &rhs).is_positive()
    }
}

impl LpSolution {
    /// Primal feasibility, dual feasibility and a zero duality gap.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        let primal = self.x.iter().all(|v| !v.is_negative())
            && lp.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, &self.x);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            });
        let signs = lp.constraints.iter().zip(&self.duals).all(|(c, u)| match c.relation {
            Relation::Le => !u.is_negative(),
            Relation::Ge => !u.is_positive(),
            Relation::Eq => true,
        });
        let dual = (0..lp.num_vars).all(|j| {
            let s = lp.constraints.iter().zip(&self.duals).fold(Rational::zero(), |acc, (c, u)| acc + u * &c.coeffs[j]);
            s >= lp.objective_coeff(j)
        });
        let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
        let objective: Vec<Rational> = (0..lp.num_vars).map(|j| lp.objective_coeff(j)).collect();
        primal && signs && dual && dot(&rhs, &self.duals) == self.value && dot(&objective, &self.x) == self.value
    }
}

/// Columns: structural `[0, n)`, one slack per inequality, one artificial per row.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Row orientation: `-1` when the row was negated to make its rhs nonnegative.
    sign: Vec<Rational>,
    num_structural: usize,
    artificial_start: usize,
    num_cols: usize,
}

enum PhaseResult {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n = lp.num_vars;
        let num_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let artificial_start = n + num_slack;
        let num_cols = artificial_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); num_cols];
            row[..n].clone_from_slice(&c.coeffs);
            match c.relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let s = if c.rhs.is_negative() { -Rational::one() } else { Rational::one() };
            if s.is_negative() {
                row.iter_mut().for_each(|x| *x = -x.clone());
            }
            row[artificial_start + i] = Rational::one();
            rows.push(row);
            rhs.push(&c.rhs * &s);
            sign.push(s);
        }
        Tableau {
            rows,
            rhs,
            basis: (artificial_start..artificial_start + m).collect(),
            sign,
            num_structural: n,
            artificial_start,
            num_cols,
        }
    }

    fn reduced_costs(&self, costs: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut d = costs.to_vec();
        let mut value = Rational::zero();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row) {
                if !a.is_zero() {
                    *dj -= cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        (d, value)
    }

    fn pivot(&mut self, r: usize, e: usize, d: &mut [Rational]) {
        let inv = self.rows[r][e].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let factor = self.rows[i][e].clone();
            for (x, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !d[e].is_zero() {
            let factor = d[e].clone();
            for (x, p) in d.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        self.basis[r] = e;
    }

    /// Minimizes with Bland's rule over columns `< allowed`.
    fn optimize(&mut self, d: &mut [Rational], allowed: usize) -> PhaseResult {
        loop {
            let Some(e) = (0..allowed).find(|&j| d[j].is_negative()) else {
                return PhaseResult::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return PhaseResult::Unbounded;
            };
            self.pivot(r, e, d);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let m = self.rows.len();
        let mut phase1_costs = vec![Rational::zero(); self.num_cols];
        phase1_costs[self.artificial_start..].iter_mut().for_each(|c| *c = Rational::one());
        let (mut d, _) = self.reduced_costs(&phase1_costs);
        // Phase I is bounded below by zero.
        self.optimize(&mut d, self.num_cols);
        let infeasibility: Rational = (0..m)
            .filter(|&i| self.basis[i] >= self.artificial_start)
            .map(|i| self.rhs[i].clone())
            .sum();
        if infeasibility.is_positive() {
            // y_i = 1 - d(artificial_i); undo the row orientation.
            let multipliers = (0..m)
                .map(|i| (Rational::one() - &d[self.artificial_start + i]) * &self.sign[i])
                .collect();
            return LpOutcome::Infeasible(FarkasCertificate { multipliers });
        }

        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if self.basis[r] < self.artificial_start {
                continue;
            }
            if let Some(e) = (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero()) {
                self.pivot(r, e, &mut d);
            }
        }

        let mut costs = vec![Rational::zero(); self.num_cols];
        for (j, c) in costs.iter_mut().enumerate().take(self.num_structural) {
            *c = -lp.objective_coeff(j);
        }
        let (mut d, _) = self.reduced_costs(&costs);
        if let PhaseResult::Unbounded = self.optimize(&mut d, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.num_structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                x[b] = self.rhs[i].clone();
            }
        }
        let value = (0..self.num_structural).fold(Rational::zero(), |acc, j| acc + lp.objective_coeff(j) * &x[j]);
        // Artificial columns carry cost 0, so their reduced cost is -y'_i.
        let duals = (0..m).map(|i| &d[self.artificial_start + i] * &self.sign[i]).collect();
        LpOutcome::Optimal(LpSolution { x, value, duals })
    }
}
