//! Lifted weighted model counting for universally quantified two-variable
//! theories by cell decomposition, and the partition function of an MLN via
//! the ξ-predicate encoding.

mod cells;
mod encode;
mod engine;

pub use cells::{ExactTables, LiftedTables, LocalCell, LocalStructure, LocalType};
pub use encode::{encode, statistic_scale, XiEncoding};
pub use engine::{sum_exact, sum_log, ConfigurationSum};

use num_bigint::BigInt;

use crate::logic::{Formula, ModelSpec, Sentence, Vocabulary};
use crate::numerics::LogReal;
use crate::oracle::{WeightFunctions, WfomcValue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WfomcError {
    #[error("domain size must be at least 1")]
    EmptyDomain,
    #[error("the hard constraints have no model over a domain of size {0}")]
    Unsatisfiable(usize),
}

/// Weighted model count of `theory` over a domain of size `n`.
pub fn lifted_wfomc(
    vocab: &Vocabulary,
    theory: &[Formula],
    weights: &WeightFunctions,
    n: usize,
) -> Result<WfomcValue, WfomcError> {
    if n == 0 {
        return Err(WfomcError::EmptyDomain);
    }
    let structure = LocalStructure::build(vocab, theory, weights, &[]);
    let log = sum_log(&structure.tables(&[]), n).log_z;
    let exact = structure.exact_tables().map(|t| sum_exact(&t, n));
    Ok(WfomcValue { log, exact })
}

/// Partition function and expected statistics at one weight vector.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub log_z: LogReal,
    /// `None` when `Z = 0`.
    pub expectations: Option<Vec<f64>>,
}

/// An MLN prepared for repeated lifted queries over a fixed domain size.
#[derive(Clone, Debug)]
pub struct LiftedModel {
    n: usize,
    scales: Vec<f64>,
    structure: LocalStructure,
    corrupt: bool,
}

impl LiftedModel {
    pub fn new(model: &ModelSpec, n: usize) -> Result<Self, WfomcError> {
        if n == 0 {
            return Err(WfomcError::EmptyDomain);
        }
        let enc = encode(model, &vec![0.0; model.soft.len()], n);
        let structure = LocalStructure::build(&enc.vocabulary, &enc.theory, &enc.weights, &enc.xi);
        Ok(LiftedModel { n, scales: enc.scales, structure, corrupt: false })
    }

    /// Test hook: every subsequent table is perturbed.
    pub fn corrupted(mut self) -> Self {
        self.corrupt = true;
        self
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn num_formulas(&self) -> usize {
        self.scales.len()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn structure(&self) -> &LocalStructure {
        &self.structure
    }

    pub fn tables(&self, lambda: &[f64]) -> LiftedTables {
        assert_eq!(lambda.len(), self.scales.len(), "one weight per soft formula");
        let tilt: Vec<f64> = lambda.iter().zip(&self.scales).map(|(l, s)| l * s).collect();
        let mut t = self.structure.tables(&tilt);
        if self.corrupt {
            t.corrupt();
        }
        t
    }

    pub fn evaluate(&self, lambda: &[f64]) -> Evaluation {
        let sum = sum_log(&self.tables(lambda), self.n);
        let expectations = sum
            .expected_counts
            .map(|counts| counts.iter().zip(&self.scales).map(|(c, s)| c * s).collect());
        Evaluation { log_z: sum.log_z, expectations }
    }

    /// `log Σ_ω exp⟨λ, Q_ω⟩`; zero (`-inf`) when the hard constraints are unsatisfiable.
    pub fn log_z(&self, lambda: &[f64]) -> LogReal {
        sum_log(&self.tables(lambda), self.n).log_z
    }

    pub fn expectations(&self, lambda: &[f64]) -> Result<Vec<f64>, WfomcError> {
        self.evaluate(lambda).expectations.ok_or(WfomcError::Unsatisfiable(self.n))
    }

    pub fn log_world_count(&self) -> LogReal {
        self.log_z(&vec![0.0; self.scales.len()])
    }

    pub fn exact_world_count(&self) -> BigInt {
        let mut t = self.structure.exact_tables().expect("unit weights are exact");
        if self.corrupt {
            if let Some(u) = t.cell.first_mut() {
                *u *= BigInt::from(2);
            }
        }
        sum_exact(&t, self.n).to_integer()
    }
}

pub fn lifted_z(model: &ModelSpec, lambda: &[f64], n: usize) -> Result<LogReal, WfomcError> {
    Ok(LiftedModel::new(model, n)?.log_z(lambda))
}

pub fn lifted_expectations(model: &ModelSpec, lambda: &[f64], n: usize) -> Result<Vec<f64>, WfomcError> {
    LiftedModel::new(model, n)?.expectations(lambda)
}

fn hard_only(hard: &[Sentence], vocab: &Vocabulary) -> ModelSpec {
    ModelSpec { vocabulary: vocab.clone(), soft: Vec::new(), hard: hard.to_vec() }
}

/// `log |Ω|` for the models of `hard` over a domain of size `n`.
pub fn log_world_count(hard: &[Sentence], vocab: &Vocabulary, n: usize) -> Result<LogReal, WfomcError> {
    Ok(LiftedModel::new(&hard_only(hard, vocab), n)?.log_world_count())
}

pub fn exact_world_count(hard: &[Sentence], vocab: &Vocabulary, n: usize) -> Result<BigInt, WfomcError> {
    Ok(LiftedModel::new(&hard_only(hard, vocab), n)?.exact_world_count())
}
