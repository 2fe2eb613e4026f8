use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::model::ModelSpec;
use super::syntax::Formula;
use super::world::World;
use super::LogicError;
use crate::numerics::rational::{falling_factorial, fraction_string, to_f64};
use crate::numerics::Rational;

/// One exact statistic per soft formula, in model order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatVector(pub Vec<Rational>);

impl StatVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn fractions(&self) -> Vec<String> {
        self.0.iter().map(fraction_string).collect()
    }
}

/// Truth of `f` under a substitution from variable names to constant names.
pub fn evaluate(f: &Formula, world: &World, substitution: &BTreeMap<String, String>) -> Result<bool, LogicError> {
    let binding = f
        .vars()
        .iter()
        .map(|v| {
            let c = substitution.get(v).ok_or_else(|| LogicError::UnboundVariable(v.clone()))?;
            world.constant_index(c).ok_or_else(|| LogicError::UnknownConstant(c.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(f.eval(world, &binding))
}

/// Number of injective substitutions of `k` variables into `n` constants.
pub fn grounding_count(n: usize, k: usize) -> u64 {
    falling_factorial(n as u64, k as u64)
}

/// Number of injective groundings of `f` true in `world`.
pub fn injective_count(f: &Formula, world: &World) -> u64 {
    let n = world.domain_size();
    match f.num_vars() {
        0 => 0,
        1 => (0..n).filter(|&a| f.eval(world, &[a])).count() as u64,
        _ => {
            let mut count = 0;
            for a in 0..n {
                for b in (0..n).filter(|&b| b != a) {
                    if f.eval(world, &[a, b]) {
                        count += 1;
                    }
                }
            }
            count
        }
    }
}

/// `N(f, world) / (n! / (n-k)!)`, the fraction of injective groundings that hold.
pub fn formula_statistic(f: &Formula, world: &World) -> Result<Rational, LogicError> {
    let n = world.domain_size();
    let k = f.num_vars();
    if k == 0 {
        return Err(LogicError::NoVariables);
    }
    let total = grounding_count(n, k);
    if total == 0 {
        return Err(LogicError::DomainTooSmall { n, k });
    }
    Ok(Rational::new(BigInt::from(injective_count(f, world)), BigInt::from(total)))
}

pub fn stat_vector(model: &ModelSpec, world: &World) -> Result<StatVector, LogicError> {
    model
        .soft
        .iter()
        .map(|s| formula_statistic(&s.formula, world))
        .collect::<Result<Vec<_>, _>>()
        .map(StatVector)
}
