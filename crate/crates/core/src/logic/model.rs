use super::syntax::{Formula, Vocabulary};

/// A formula under an implicit universal closure (a hard constraint).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence(pub Formula);

impl Sentence {
    pub fn formula(&self) -> &Formula {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFormula {
    pub formula: Formula,
    /// Statistic-space weight: multiplies the normalized statistic, not the grounding count.
    pub weight: f64,
}

/// An MLN with hard constraints. The order of `soft` fixes the coordinates of every statistic vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelSpec {
    pub vocabulary: Vocabulary,
    pub soft: Vec<WeightedFormula>,
    pub hard: Vec<Sentence>,
}

impl ModelSpec {
    pub fn num_soft(&self) -> usize {
        self.soft.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.soft.iter().map(|s| s.weight).collect()
    }

    pub fn max_soft_vars(&self) -> usize {
        self.soft.iter().map(|s| s.formula.num_vars()).max().unwrap_or(0)
    }

    /// The same formulas with all weights replaced.
    pub fn with_weights(&self, weights: &[f64]) -> ModelSpec {
        assert_eq!(weights.len(), self.soft.len());
        let mut m = self.clone();
        for (s, &w) in m.soft.iter_mut().zip(weights) {
            s.weight = w;
        }
        m
    }
}
