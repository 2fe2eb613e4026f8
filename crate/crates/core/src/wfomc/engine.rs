use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::cells::{ExactTables, LiftedTables};
use crate::numerics::logreal::{LogAccumulator, LogReal};
use crate::numerics::Rational;

/// `k * log_x` with `0 * (-inf) = 0`.
#[inline]
fn times(k: usize, log_x: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * log_x
    }
}

#[inline]
fn pairs(c: usize) -> usize {
    c * c.saturating_sub(1) / 2
}

/// Log partition sum over cell-count vectors and the expected number of true
/// tracked atoms.
#[derive(Clone, Debug)]
pub struct ConfigurationSum {
    pub log_z: LogReal,
    /// `None` when the sum is zero.
    pub expected_counts: Option<Vec<f64>>,
}

struct Walker<'a> {
    t: &'a LiftedTables,
    ln_fact: Vec<f64>,
    tracked: usize,
}

impl Walker<'_> {
    /// Adds cell `q` with `c` elements on top of the counts in `j[..q]`.
    fn step(&self, q: usize, c: usize, j: &[usize], log: f64, mom: &[f64], out: &mut [f64]) -> f64 {
        let t = self.t;
        let live = t.live;
        let cp = pairs(c);
        let mut l = log + times(c, t.cell_log[q]) + times(cp, t.pair_log[q * live + q]) - self.ln_fact[c];
        for (r, &jr) in j[..q].iter().enumerate() {
            l += times(jr * c, t.pair_log[r * live + q]);
        }
        if l == f64::NEG_INFINITY {
            return l;
        }
        out.copy_from_slice(mom);
        for p in 0..self.tracked {
            let mut m = c as f64 * t.cell_counts[q][p] + cp as f64 * t.pair_moments[q * live + q][p];
            for (r, &jr) in j[..q].iter().enumerate() {
                m += (jr * c) as f64 * t.pair_moments[r * live + q][p];
            }
            out[p] += m;
        }
        l
    }

    fn visit(&self, q: usize, remaining: usize, j: &mut Vec<usize>, log: f64, mom: &[f64], acc: &mut LogAccumulator) {
        let last = q + 1 == self.t.live;
        let range = if last { remaining..=remaining } else { 0..=remaining };
        let mut next = vec![0.0; self.tracked];
        for c in range {
            let l = self.step(q, c, j, log, mom, &mut next);
            if l == f64::NEG_INFINITY {
                continue;
            }
            if last {
                acc.push(l, &next);
            } else {
                j.push(c);
                self.visit(q + 1, remaining - c, j, l, &next, acc);
                j.pop();
            }
        }
    }
}

/// Sums over all compositions of `n` into the live cells.
///
/// The first cell's count is split across the rayon pool; partial sums are
/// merged in a fixed order, so the result does not depend on the pool size.
pub fn sum_log(t: &LiftedTables, n: usize) -> ConfigurationSum {
    let tracked = t.cell_counts.first().map_or(0, Vec::len);
    if t.live == 0 {
        return ConfigurationSum { log_z: LogReal::ZERO, expected_counts: None };
    }
    let mut ln_fact = vec![0.0; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let w = Walker { t, ln_fact, tracked };
    let root = w.ln_fact[n];
    let zero = vec![0.0; tracked];
    let parts: Vec<LogAccumulator> = if t.live == 1 {
        let mut acc = LogAccumulator::new(tracked);
        w.visit(0, n, &mut Vec::new(), root, &zero, &mut acc);
        vec![acc]
    } else {
        (0..=n)
            .into_par_iter()
            .map(|c| {
                let mut acc = LogAccumulator::new(tracked);
                let mut mom = vec![0.0; tracked];
                let l = w.step(0, c, &[], root, &zero, &mut mom);
                if l > f64::NEG_INFINITY {
                    w.visit(1, n - c, &mut vec![c], l, &mom, &mut acc);
                }
                acc
            })
            .collect()
    };
    let mut total = LogAccumulator::new(tracked);
    for p in &parts {
        total.merge(p);
    }
    ConfigurationSum { log_z: total.total(), expected_counts: total.normalized_moments() }
}

/// Exact counterpart of [`sum_log`] without expectations.
pub fn sum_exact(t: &ExactTables, n: usize) -> Rational {
    if t.live == 0 {
        return Rational::zero();
    }
    let mut fact = vec![BigInt::one(); n + 1];
    for k in 1..=n {
        fact[k] = &fact[k - 1] * BigInt::from(k);
    }
    let mut total = Rational::zero();
    let mut j = Vec::with_capacity(t.live);
    exact_visit(t, &fact, 0, n, &mut j, Rational::from_integer(fact[n].clone()), &mut total);
    total
}

fn exact_visit(
    t: &ExactTables,
    fact: &[BigInt],
    q: usize,
    remaining: usize,
    j: &mut Vec<usize>,
    partial: Rational,
    total: &mut Rational,
) {
    let live = t.live;
    let last = q + 1 == live;
    let range = if last { remaining..=remaining } else { 0..=remaining };
    for c in range {
        let mut term = partial.clone() / Rational::from_integer(fact[c].clone());
        term *= num_traits::pow(t.cell[q].clone(), c);
        term *= num_traits::pow(t.pair[q * live + q].clone(), pairs(c));
        for (r, &jr) in j.iter().enumerate() {
            term *= num_traits::pow(t.pair[r * live + q].clone(), jr * c);
        }
        if term.is_zero() {
            continue;
        }
        if last {
            *total += term;
        } else {
            j.push(c);
            exact_visit(t, fact, q + 1, remaining - c, j, term, total);
            j.pop();
        }
    }
}
