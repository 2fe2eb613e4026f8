use num_traits::{One, Zero};

use crate::logic::{Formula, Interpretation, PredId, Vocabulary};
use crate::numerics::Rational;
use crate::oracle::WeightFunctions;

/// Where a predicate's bits live: unary predicates and reflexive binary
/// atoms in the cell, directed binary atoms in the pair type.
#[derive(Clone, Copy, Debug)]
enum Slot {
    Unary(usize),
    Binary(usize),
}

/// Two elements `0` and `1` with cells `cells[0]`, `cells[1]` and the pair
/// type `pair` between them.
///
/// Cell bit `k < |U|` is `U[k](x)`; bit `|U| + k` is `B[k](x,x)`.
/// Pair bit `2k` is `B[k](0,1)`, bit `2k+1` is `B[k](1,0)`.
struct Local<'a> {
    slots: &'a [Slot],
    num_unary: usize,
    cells: [usize; 2],
    pair: usize,
}

impl Interpretation for Local<'_> {
    fn holds(&self, pred: PredId, args: &[usize]) -> bool {
        match (self.slots[pred.0], args) {
            (Slot::Unary(k), [a]) => self.cells[*a] >> k & 1 == 1,
            (Slot::Binary(k), [a, b]) if a == b => self.cells[*a] >> (self.num_unary + k) & 1 == 1,
            (Slot::Binary(k), [a, _]) => self.pair >> (2 * k + *a) & 1 == 1,
            _ => unreachable!("arity checked at parse time"),
        }
    }
}

/// A cell that admits at least one element.
#[derive(Clone, Debug)]
pub struct LocalCell {
    /// Truth assignment in the bit layout of the cell.
    pub bits: usize,
    pub log_weight: f64,
    pub exact: Option<Rational>,
    /// True tracked atoms on one element of this cell.
    pub counts: Vec<u32>,
}

/// A pair type allowed between two given cells.
#[derive(Clone, Debug)]
pub struct LocalType {
    pub bits: usize,
    pub log_weight: f64,
    pub exact: Option<Rational>,
    /// True tracked atoms between the two elements, both directions.
    pub counts: Vec<u32>,
}

/// λ-independent cell and pair-type structure of a universally quantified
/// two-variable theory.
#[derive(Clone, Debug)]
pub struct LocalStructure {
    pub tracked: Vec<PredId>,
    /// Unary predicates in cell-bit order.
    pub unary: Vec<PredId>,
    /// Binary predicates in cell-bit (reflexive) and pair-bit order.
    pub binary: Vec<PredId>,
    /// Live cells only, in increasing bit order.
    pub cells: Vec<LocalCell>,
    /// Allowed types for live cells `(q, r)`, `q <= r`, at `pair_index(q, r)`.
    pairs: Vec<Vec<LocalType>>,
}

impl LocalStructure {
    pub fn build(vocab: &Vocabulary, theory: &[Formula], weights: &WeightFunctions, tracked: &[PredId]) -> Self {
        let unary = vocab.unary_predicates();
        let binary = vocab.binary_predicates();
        let mut slots = vec![Slot::Unary(0); vocab.len()];
        for (k, p) in unary.iter().enumerate() {
            slots[p.0] = Slot::Unary(k);
        }
        for (k, p) in binary.iter().enumerate() {
            slots[p.0] = Slot::Binary(k);
        }
        let nu = unary.len();
        let cell_bits = nu + binary.len();
        let pair_bits = 2 * binary.len();
        let exact = weights.exact.as_ref();

        let atom_weight = |p: PredId, truth: bool| -> (f64, Option<Rational>) {
            let log = if truth { weights.log_w[p.0] } else { weights.log_w_bar[p.0] };
            let ex = exact.map(|e| if truth { e[p.0].0.clone() } else { e[p.0].1.clone() });
            (log, ex)
        };

        let one_var: Vec<&Formula> = theory.iter().filter(|f| f.num_vars() < 2).collect();
        let two_var: Vec<&Formula> = theory.iter().filter(|f| f.num_vars() == 2).collect();

        let mut cells = Vec::new();
        for bits in 0..1usize << cell_bits {
            let local = Local { slots: &slots, num_unary: nu, cells: [bits, bits], pair: 0 };
            let ok = one_var.iter().all(|f| f.eval(&local, &[0])) && two_var.iter().all(|f| f.eval(&local, &[0, 0]));
            if !ok {
                continue;
            }
            let mut log_weight = 0.0;
            let mut ex = exact.map(|_| Rational::one());
            for (k, &p) in unary.iter().chain(&binary).enumerate() {
                let (l, e) = atom_weight(p, bits >> k & 1 == 1);
                log_weight += l;
                if let (Some(acc), Some(e)) = (ex.as_mut(), e) {
                    *acc *= e;
                }
            }
            let counts = tracked
                .iter()
                .map(|&p| match slots[p.0] {
                    Slot::Unary(k) => (bits >> k & 1) as u32,
                    Slot::Binary(k) => (bits >> (nu + k) & 1) as u32,
                })
                .collect();
            cells.push(LocalCell { bits, log_weight, exact: ex, counts });
        }

        let live = cells.len();
        let mut pairs = vec![Vec::new(); live * (live + 1) / 2];
        for q in 0..live {
            for r in q..live {
                let mut types = Vec::new();
                for t in 0..1usize << pair_bits {
                    let local = Local { slots: &slots, num_unary: nu, cells: [cells[q].bits, cells[r].bits], pair: t };
                    if !two_var.iter().all(|f| f.eval(&local, &[0, 1]) && f.eval(&local, &[1, 0])) {
                        continue;
                    }
                    let mut log_weight = 0.0;
                    let mut ex = exact.map(|_| Rational::one());
                    for (k, &p) in binary.iter().enumerate() {
                        for dir in 0..2 {
                            let (l, e) = atom_weight(p, t >> (2 * k + dir) & 1 == 1);
                            log_weight += l;
                            if let (Some(acc), Some(e)) = (ex.as_mut(), e) {
                                *acc *= e;
                            }
                        }
                    }
                    let counts = tracked
                        .iter()
                        .map(|&p| match slots[p.0] {
                            Slot::Unary(_) => 0,
                            Slot::Binary(k) => ((t >> (2 * k) & 1) + (t >> (2 * k + 1) & 1)) as u32,
                        })
                        .collect();
                    types.push(LocalType { bits: t, log_weight, exact: ex, counts });
                }
                pairs[pair_index(live, q, r)] = types;
            }
        }
        LocalStructure { tracked: tracked.to_vec(), unary, binary, cells, pairs }
    }

    pub fn num_live(&self) -> usize {
        self.cells.len()
    }

    /// Allowed pair types between live cells `q` and `r` (in either order).
    ///
    /// For `q > r` the returned types are oriented from `r` to `q`.
    pub fn pair_types(&self, q: usize, r: usize) -> &[LocalType] {
        let (a, b) = if q <= r { (q, r) } else { (r, q) };
        &self.pairs[pair_index(self.cells.len(), a, b)]
    }

    /// Weight tables with every true tracked atom `p` additionally weighted by `exp(tilt[p])`.
    pub fn tables(&self, tilt: &[f64]) -> LiftedTables {
        assert_eq!(tilt.len(), self.tracked.len());
        let live = self.cells.len();
        let dot = |counts: &[u32]| -> f64 {
            counts.iter().zip(tilt).filter(|(&c, _)| c > 0).map(|(&c, t)| c as f64 * t).sum()
        };
        let cell_log = self.cells.iter().map(|c| c.log_weight + dot(&c.counts)).collect();
        let cell_counts = self.cells.iter().map(|c| c.counts.iter().map(|&x| x as f64).collect()).collect();
        let mut pair_log = vec![f64::NEG_INFINITY; live * live];
        let mut pair_moments = vec![vec![0.0; tilt.len()]; live * live];
        for q in 0..live {
            for r in q..live {
                let types = self.pair_types(q, r);
                let logs: Vec<f64> = types.iter().map(|t| t.log_weight + dot(&t.counts)).collect();
                let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let (total, moments) = if max == f64::NEG_INFINITY {
                    (f64::NEG_INFINITY, vec![0.0; tilt.len()])
                } else {
                    let mut sum = 0.0;
                    let mut mom = vec![0.0; tilt.len()];
                    for (t, l) in types.iter().zip(&logs) {
                        let w = (l - max).exp();
                        sum += w;
                        for (m, &c) in mom.iter_mut().zip(&t.counts) {
                            *m += w * c as f64;
                        }
                    }
                    mom.iter_mut().for_each(|m| *m /= sum);
                    (max + sum.ln(), mom)
                };
                for (a, b) in [(q, r), (r, q)] {
                    pair_log[a * live + b] = total;
                    pair_moments[a * live + b] = moments.clone();
                }
            }
        }
        LiftedTables { live, cell_log, cell_counts, pair_log, pair_moments }
    }

    /// Exact tables when every weight is rational and no tilt is applied.
    pub fn exact_tables(&self) -> Option<ExactTables> {
        let live = self.cells.len();
        let cell = self.cells.iter().map(|c| c.exact.clone()).collect::<Option<Vec<_>>>()?;
        let mut pair = vec![Rational::zero(); live * live];
        for q in 0..live {
            for r in q..live {
                let mut sum = Rational::zero();
                for t in self.pair_types(q, r) {
                    sum += t.exact.clone()?;
                }
                pair[q * live + r] = sum.clone();
                pair[r * live + q] = sum;
            }
        }
        Some(ExactTables { live, cell, pair })
    }
}

fn pair_index(live: usize, q: usize, r: usize) -> usize {
    debug_assert!(q <= r && r < live);
    q * (2 * live - q + 1) / 2 + (r - q)
}

/// Log-space weights for the configuration sum.
#[derive(Clone, Debug)]
pub struct LiftedTables {
    pub live: usize,
    /// `log u_q`.
    pub cell_log: Vec<f64>,
    /// True tracked atoms on an element of cell `q`.
    pub cell_counts: Vec<Vec<f64>>,
    /// `log r_qr`, row-major `live × live`, symmetric.
    pub pair_log: Vec<f64>,
    /// Expected true tracked atoms on a pair of cells `(q, r)` under the pair-type weights.
    pub pair_moments: Vec<Vec<f64>>,
}

impl LiftedTables {
    /// Test hook: perturbs the weight of the first live cell.
    pub fn corrupt(&mut self) {
        if let Some(u) = self.cell_log.first_mut() {
            *u += 0.5;
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExactTables {
    pub live: usize,
    pub cell: Vec<Rational>,
    pub pair: Vec<Rational>,
}
