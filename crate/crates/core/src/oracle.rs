//! Brute-force ground truth: enumerate every world over a small domain.
//!
//! Worlds are bitmasks over the dense atom layout of [`AtomLayout`]. Hard
//! sentences are checked on every grounding (including `x = y`); soft-formula
//! statistics count injective groundings only.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::logic::{AtomLayout, Formula, ModelSpec, PredId, Sentence, StatVector, VarId, Vocabulary, World};
use crate::numerics::dense;
use crate::numerics::linalg;
use crate::numerics::logreal::{logsumexp, LogReal};
use crate::numerics::rational::falling_factorial;
use crate::numerics::Rational;

pub const DEFAULT_ATOM_CAP: usize = 25;

/// Masks are `u64`; beyond this the enumeration would never finish anyway.
const HARD_ATOM_LIMIT: usize = 40;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{atoms} ground atoms exceed the brute-force cap of {cap}")]
    CapExceeded { atoms: usize, cap: usize },
    #[error("the hard constraints have no model over this domain")]
    EmptyModelSet,
    #[error("maximum-likelihood iteration did not converge (gradient norm {grad_norm:e} after {iterations} steps)")]
    NotConverged { iterations: usize, grad_norm: f64 },
}

/// Per-predicate weights for true (`w`) and false (`w̄`) ground atoms, stored as logs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunctions {
    pub log_w: Vec<f64>,
    pub log_w_bar: Vec<f64>,
    /// Exact values when every weight is rational.
    pub exact: Option<Vec<(Rational, Rational)>>,
}

impl WeightFunctions {
    /// All weights 1, exact.
    pub fn unit(num_predicates: usize) -> Self {
        WeightFunctions {
            log_w: vec![0.0; num_predicates],
            log_w_bar: vec![0.0; num_predicates],
            exact: Some(vec![(Rational::one(), Rational::one()); num_predicates]),
        }
    }

    /// Sets `w(pred) = exp(log_w)`, `w̄(pred) = exp(log_w_bar)`; drops exactness unless both logs are 0.
    pub fn set_log(&mut self, pred: PredId, log_w: f64, log_w_bar: f64) {
        assert!(log_w.is_finite() && log_w_bar.is_finite(), "weights must be strictly positive and finite");
        self.log_w[pred.0] = log_w;
        self.log_w_bar[pred.0] = log_w_bar;
        if log_w != 0.0 || log_w_bar != 0.0 {
            self.exact = None;
        }
    }

    /// Sets rational weights, keeping exactness if all other weights are exact.
    pub fn set_rational(&mut self, pred: PredId, w: Rational, w_bar: Rational) {
        assert!(w > Rational::zero() && w_bar > Rational::zero(), "weights must be strictly positive");
        self.log_w[pred.0] = crate::numerics::rational::to_f64(&w).ln();
        self.log_w_bar[pred.0] = crate::numerics::rational::to_f64(&w_bar).ln();
        if let Some(ex) = self.exact.as_mut() {
            ex[pred.0] = (w, w_bar);
        }
    }

    pub fn len(&self) -> usize {
        self.log_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_w.is_empty()
    }
}

/// A weighted model count in log space, with the exact value when available.
#[derive(Clone, Debug, PartialEq)]
pub struct WfomcValue {
    pub log: LogReal,
    pub exact: Option<Rational>,
}

/// A formula grounded with a fixed binding of its variables.
#[derive(Clone, Debug)]
pub struct GroundFormula {
    pub formula: Formula,
    pub binding: Vec<usize>,
}

/// A formula compiled to a truth table over the atoms it mentions, with each
/// grounding's atom indices precomputed.
struct Compiled {
    slots: usize,
    /// Indexed by `[diagonal as usize][slot bits]`.
    tables: [Vec<bool>; 2],
    atoms: Vec<u8>,
    diagonal: Vec<bool>,
}

impl Compiled {
    fn new(f: &Formula, layout: &AtomLayout, bindings: &[[usize; 2]]) -> Self {
        let mut patterns: Vec<(PredId, Vec<VarId>)> = Vec::new();
        f.expr().for_each_atom(&mut |p, args| {
            if !patterns.iter().any(|(q, a)| *q == p && a == args) {
                patterns.push((p, args.to_vec()));
            }
        });
        let slots = patterns.len();
        let slot_of = |p: PredId, args: &[VarId]| patterns.iter().position(|(q, a)| *q == p && a == args).unwrap();
        let table = |diag: bool| -> Vec<bool> {
            (0..1usize << slots)
                .map(|bits| {
                    f.expr().eval_with(&|p, args| bits >> slot_of(p, args) & 1 == 1, &|a, b| a == b || diag)
                })
                .collect()
        };
        let tables = [table(false), table(true)];
        let mut atoms = Vec::with_capacity(bindings.len() * slots);
        let mut diagonal = Vec::with_capacity(bindings.len());
        for b in bindings {
            for (p, args) in &patterns {
                let ground: Vec<usize> = args.iter().map(|&v| b[v]).collect();
                atoms.push(layout.index(*p, &ground) as u8);
            }
            diagonal.push(f.num_vars() == 2 && b[0] == b[1]);
        }
        Compiled { slots, tables, atoms, diagonal }
    }

    #[inline]
    fn holds(&self, g: usize, mask: u64) -> bool {
        let mut idx = 0usize;
        for (s, &a) in self.atoms[g * self.slots..(g + 1) * self.slots].iter().enumerate() {
            idx |= ((mask >> a) as usize & 1) << s;
        }
        self.tables[self.diagonal[g] as usize][idx]
    }

    fn all(&self, mask: u64) -> bool {
        (0..self.diagonal.len()).all(|g| self.holds(g, mask))
    }

    fn count(&self, mask: u64) -> u32 {
        (0..self.diagonal.len()).filter(|&g| self.holds(g, mask)).count() as u32
    }
}

fn bindings(n: usize, k: usize, injective: bool) -> Vec<[usize; 2]> {
    match k {
        0 => vec![[0, 0]],
        1 => (0..n).map(|a| [a, 0]).collect(),
        _ => (0..n)
            .flat_map(|a| (0..n).map(move |b| [a, b]))
            .filter(|[a, b]| !injective || a != b)
            .collect(),
    }
}

fn check_cap(atoms: usize, cap: usize) -> Result<(), OracleError> {
    if atoms > cap || atoms > HARD_ATOM_LIMIT {
        Err(OracleError::CapExceeded { atoms, cap })
    } else {
        Ok(())
    }
}

fn compile_hard(hard: &[Formula], layout: &AtomLayout) -> Vec<Compiled> {
    let n = layout.domain_size();
    hard.iter().map(|f| Compiled::new(f, layout, &bindings(n, f.num_vars(), false))).collect()
}

/// Parallel fold over every world mask, merged deterministically into a sorted histogram.
fn histogram<F>(num_atoms: usize, key: F) -> BTreeMap<Vec<u32>, u64>
where
    F: Fn(u64, &mut Vec<u32>) -> bool + Sync,
{
    let total: u64 = 1 << num_atoms;
    let chunk_bits = num_atoms.min(8);
    let chunk_len = total >> chunk_bits;
    (0..1u64 << chunk_bits)
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<Vec<u32>, u64> = HashMap::new();
            let mut buf = Vec::new();
            for mask in c * chunk_len..(c + 1) * chunk_len {
                buf.clear();
                if !key(mask, &mut buf) {
                    continue;
                }
                if let Some(v) = local.get_mut(buf.as_slice()) {
                    *v += 1;
                } else {
                    local.insert(buf.clone(), 1);
                }
            }
            local
        })
        .fold(BTreeMap::new, |mut acc, local| {
            for (k, v) in local {
                *acc.entry(k).or_insert(0) += v;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

/// Every model of the hard sentences over `domain`, in mask order.
pub fn enumerate_models(
    hard: &[Sentence],
    vocab: &Vocabulary,
    domain: Vec<String>,
    cap: usize,
) -> Result<impl Iterator<Item = World>, OracleError> {
    let layout = AtomLayout::new(vocab, domain.len());
    let atoms = layout.total();
    check_cap(atoms, cap)?;
    let formulas: Vec<Formula> = hard.iter().map(|s| s.formula().clone()).collect();
    let compiled = compile_hard(&formulas, &layout);
    let vocab = vocab.clone();
    Ok((0..1u64 << atoms).filter(move |&m| compiled.iter().all(|c| c.all(m))).map(move |m| {
        let truth = (0..atoms).map(|i| m >> i & 1 == 1).collect();
        World::from_truth(&vocab, domain.clone(), truth).expect("layout matches")
    }))
}

/// Weighted model count of `theory` over a domain of size `n` by enumeration.
///
/// `evidence` lists ground formulas that must also hold.
pub fn brute_wfomc(
    theory: &[Formula],
    vocab: &Vocabulary,
    weights: &WeightFunctions,
    n: usize,
    evidence: &[GroundFormula],
    cap: usize,
) -> Result<WfomcValue, OracleError> {
    assert_eq!(weights.len(), vocab.len(), "one weight pair per predicate");
    let layout = AtomLayout::new(vocab, n);
    check_cap(layout.total(), cap)?;
    let hard = compile_hard(theory, &layout);
    let ev: Vec<Compiled> = evidence
        .iter()
        .map(|g| {
            let b = [g.binding[0], g.binding.get(1).copied().unwrap_or(0)];
            Compiled::new(&g.formula, &layout, &[b])
        })
        .collect();
    let pred_masks: Vec<u64> = vocab
        .iter()
        .map(|(id, p)| {
            let first = layout.index(id, &vec![0; p.arity]);
            let len = n.pow(p.arity as u32);
            if len == 0 { 0 } else { (u64::MAX >> (64 - len)) << first }
        })
        .collect();
    let hist = histogram(layout.total(), |mask, key| {
        if !hard.iter().all(|c| c.all(mask)) || !ev.iter().all(|c| c.holds(0, mask)) {
            return false;
        }
        key.extend(pred_masks.iter().map(|pm| (mask & pm).count_ones()));
        true
    });
    let sizes: Vec<u32> = vocab.iter().map(|(_, p)| n.pow(p.arity as u32) as u32).collect();
    let log = logsumexp(hist.iter().map(|(counts, &mult)| {
        let mut l = (mult as f64).ln();
        for (p, (&c, &size)) in counts.iter().zip(&sizes).enumerate() {
            l += c as f64 * weights.log_w[p] + (size - c) as f64 * weights.log_w_bar[p];
        }
        LogReal::from_ln(l)
    }));
    let exact = weights.exact.as_ref().map(|ex| {
        hist.iter().fold(Rational::zero(), |acc, (counts, &mult)| {
            let mut term = Rational::from_integer(BigInt::from(mult));
            for ((&c, &size), (w, wb)) in counts.iter().zip(&sizes).zip(ex) {
                term *= num_traits::pow(w.clone(), c as usize) * num_traits::pow(wb.clone(), (size - c) as usize);
            }
            acc + term
        })
    });
    Ok(WfomcValue { log, exact })
}

/// Result of the oracle's maximum-likelihood solve.
#[derive(Clone, Debug)]
pub struct MleResult {
    pub lambda: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Every world of a model grouped by its vector of injective grounding counts.
#[derive(Clone, Debug)]
pub struct BruteSpace {
    n: usize,
    /// Injective groundings per soft formula; 0 when the domain is too small.
    scales: Vec<u64>,
    entries: Vec<(Vec<u32>, u64)>,
    stats: Vec<Vec<f64>>,
}

impl BruteSpace {
    pub fn build(model: &ModelSpec, n: usize, cap: usize) -> Result<Self, OracleError> {
        let layout = AtomLayout::new(&model.vocabulary, n);
        check_cap(layout.total(), cap)?;
        let hard_formulas: Vec<Formula> = model.hard.iter().map(|s| s.formula().clone()).collect();
        let hard = compile_hard(&hard_formulas, &layout);
        let soft: Vec<Compiled> = model
            .soft
            .iter()
            .map(|s| Compiled::new(&s.formula, &layout, &bindings(n, s.formula.num_vars(), true)))
            .collect();
        let scales: Vec<u64> = model
            .soft
            .iter()
            .map(|s| falling_factorial(n as u64, s.formula.num_vars() as u64))
            .collect();
        let hist = histogram(layout.total(), |mask, key| {
            if !hard.iter().all(|c| c.all(mask)) {
                return false;
            }
            key.extend(soft.iter().map(|c| c.count(mask)));
            true
        });
        let entries: Vec<(Vec<u32>, u64)> = hist.into_iter().collect();
        let stats = entries
            .iter()
            .map(|(counts, _)| {
                counts
                    .iter()
                    .zip(&scales)
                    .map(|(&c, &s)| if s == 0 { 0.0 } else { c as f64 / s as f64 })
                    .collect()
            })
            .collect();
        Ok(BruteSpace { n, scales, entries, stats })
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn num_formulas(&self) -> usize {
        self.scales.len()
    }

    pub fn world_count(&self) -> BigInt {
        self.entries.iter().map(|(_, m)| BigInt::from(*m)).sum()
    }

    pub fn log_world_count(&self) -> f64 {
        logsumexp(self.entries.iter().map(|(_, m)| LogReal::from_value(*m as f64))).ln()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Per-entry log weights `log mult + ⟨λ, Q⟩`.
    fn log_terms(&self, lambda: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .zip(&self.stats)
            .map(|((_, m), q)| (*m as f64).ln() + dense::dot(lambda, q))
            .collect()
    }

    /// `log Σ_ω exp⟨λ, Q_ω⟩`.
    pub fn log_z(&self, lambda: &[f64]) -> f64 {
        logsumexp(self.log_terms(lambda).into_iter().map(LogReal::from_ln)).ln()
    }

    /// Probability of each histogram entry (summed over its worlds).
    fn probabilities(&self, lambda: &[f64]) -> Vec<f64> {
        let terms = self.log_terms(lambda);
        let log_z = logsumexp(terms.iter().copied().map(LogReal::from_ln)).ln();
        terms.iter().map(|t| (t - log_z).exp()).collect()
    }

    pub fn expectations(&self, lambda: &[f64]) -> Result<Vec<f64>, OracleError> {
        if self.is_empty() {
            return Err(OracleError::EmptyModelSet);
        }
        let mut e = vec![0.0; self.num_formulas()];
        for (p, q) in self.probabilities(lambda).iter().zip(&self.stats) {
            dense::axpy(*p, q, &mut e);
        }
        Ok(e)
    }

    /// `L(λ) = ⟨λ, θ⟩ − log Z(λ)` and its gradient `θ − E_λ[Q]`.
    pub fn dual(&self, lambda: &[f64], theta: &[f64]) -> Result<(f64, Vec<f64>), OracleError> {
        let e = self.expectations(lambda)?;
        let value = dense::dot(lambda, theta) - self.log_z(lambda);
        Ok((value, theta.iter().zip(&e).map(|(t, m)| t - m).collect()))
    }

    fn covariance(&self, lambda: &[f64]) -> Vec<Vec<f64>> {
        let l = self.num_formulas();
        let probs = self.probabilities(lambda);
        let mut mean = vec![0.0; l];
        for (p, q) in probs.iter().zip(&self.stats) {
            dense::axpy(*p, q, &mut mean);
        }
        let mut cov = vec![vec![0.0; l]; l];
        for (p, q) in probs.iter().zip(&self.stats) {
            for i in 0..l {
                for j in 0..l {
                    cov[i][j] += p * (q[i] - mean[i]) * (q[j] - mean[j]);
                }
            }
        }
        cov
    }

    /// Distinct statistic vectors over all models.
    pub fn points(&self) -> BTreeSet<StatVector> {
        self.entries
            .iter()
            .map(|(counts, _)| {
                StatVector(
                    counts
                        .iter()
                        .zip(&self.scales)
                        .map(|(&c, &s)| {
                            if s == 0 {
                                Rational::zero()
                            } else {
                                Rational::new(BigInt::from(c), BigInt::from(s))
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Orthonormal basis of the directions spanned by the point set.
    pub fn direction_basis(&self) -> Vec<Vec<f64>> {
        let points: Vec<StatVector> = self.points().into_iter().collect();
        let l = self.num_formulas();
        let Some(first) = points.first() else { return Vec::new() };
        let diffs: linalg::Matrix = points[1..]
            .iter()
            .map(|p| crate::numerics::rational::sub(&p.0, &first.0))
            .collect();
        let basis = linalg::orthogonalize(&linalg::row_basis(&diffs, l));
        dense::normalize_rows(&linalg::to_f64_matrix(&basis))
    }

    /// `KL(p_a ‖ p_b)` between the distributions at `lambda_a` and `lambda_b`.
    pub fn kl(&self, lambda_a: &[f64], lambda_b: &[f64]) -> f64 {
        let diff: Vec<f64> = lambda_a.iter().zip(lambda_b).map(|(a, b)| a - b).collect();
        let e = self.expectations(lambda_a).expect("nonempty model set");
        dense::dot(&diff, &e) - self.log_z(lambda_a) + self.log_z(lambda_b)
    }

    /// Maximizes the dual by damped Newton steps inside the span of the point set.
    ///
    /// The returned `λ` lies in that span, so it is orthogonal to every
    /// equation of the affine hull.
    pub fn mle(&self, theta: &[f64], tolerance: f64) -> Result<MleResult, OracleError> {
        const MAX_ITER: usize = 500;
        let l = self.num_formulas();
        let basis = self.direction_basis();
        let m = basis.len();
        let mut mu = vec![0.0; m];
        let lambda_of = |mu: &[f64]| dense::mat_t_vec(&basis, mu, l);
        for it in 0..MAX_ITER {
            let lambda = lambda_of(&mu);
            let (value, grad) = self.dual(&lambda, theta)?;
            let g = dense::mat_vec(&basis, &grad);
            let grad_norm = dense::norm(&g);
            if grad_norm <= tolerance {
                return Ok(MleResult { lambda, value, grad_norm, iterations: it });
            }
            if dense::norm_inf(&lambda) > 1e6 {
                return Err(OracleError::NotConverged { iterations: it, grad_norm });
            }
            let cov = self.covariance(&lambda);
            let h: Vec<Vec<f64>> = basis
                .iter()
                .map(|bi| basis.iter().map(|bj| dense::dot(bi, &dense::mat_vec(&cov, bj))).collect())
                .collect();
            let step = dense::solve(&h, &g).filter(|d| dense::dot(d, &g) > 0.0).unwrap_or_else(|| g.clone());
            let slope = dense::dot(&g, &step);
            let mut t = 1.0;
            loop {
                let cand: Vec<f64> = mu.iter().zip(&step).map(|(a, d)| a + t * d).collect();
                let (cv, _) = self.dual(&lambda_of(&cand), theta)?;
                if cv >= value + 1e-4 * t * slope {
                    mu = cand;
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    return Err(OracleError::NotConverged { iterations: it, grad_norm });
                }
            }
        }
        let lambda = lambda_of(&mu);
        let (_, grad) = self.dual(&lambda, theta)?;
        let grad_norm = dense::norm(&dense::mat_vec(&basis, &grad));
        Err(OracleError::NotConverged { iterations: MAX_ITER, grad_norm })
    }
}

/// Expected statistics by the ground-atom method: `E[Q_i]` is the ratio of
/// the encoded count with one injective grounding of `α_i` asserted to the
/// plain encoded count.
pub fn evidence_expectations(model: &ModelSpec, lambda: &[f64], n: usize, cap: usize) -> Result<Vec<f64>, OracleError> {
    let enc = crate::wfomc::encode(model, lambda, n);
    let base = brute_wfomc(&enc.theory, &enc.vocabulary, &enc.weights, n, &[], cap)?;
    if base.log.is_zero() {
        return Err(OracleError::EmptyModelSet);
    }
    model
        .soft
        .iter()
        .map(|s| {
            let k = s.formula.num_vars();
            if n < k {
                return Ok(0.0);
            }
            let ev = GroundFormula { formula: s.formula.clone(), binding: (0..k).collect() };
            let with = brute_wfomc(&enc.theory, &enc.vocabulary, &enc.weights, n, &[ev], cap)?;
            Ok((with.log / base.log).value())
        })
        .collect()
}

/// Exact world count as an integer; `None` if the exact value is not integral.
pub fn exact_integer(value: &WfomcValue) -> Option<BigInt> {
    value.exact.as_ref().filter(|r| r.is_integer()).map(|r| r.to_integer())
}
