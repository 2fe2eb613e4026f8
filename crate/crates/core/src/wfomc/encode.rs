use crate::logic::{Expr, Formula, ModelSpec, PredId, Vocabulary};
use crate::numerics::rational::falling_factorial;
use crate::oracle::WeightFunctions;

/// An MLN rewritten as a hard theory plus weight functions whose weighted
/// model count is the partition function.
///
/// Each soft formula `α_i` gets a fresh predicate `ξ_i` with the sentence
/// `ξ_i(x,y) <=> α_i(x,y) & x != y` (no inequality for one variable) and
/// `log w(ξ_i) = λ_i / (n! / (n-k_i)!)`, `w̄(ξ_i) = 1`.
#[derive(Clone, Debug)]
pub struct XiEncoding {
    pub vocabulary: Vocabulary,
    pub theory: Vec<Formula>,
    pub weights: WeightFunctions,
    pub xi: Vec<PredId>,
    /// `1 / (n! / (n-k_i)!)`, or 0 when the formula has no injective grounding.
    pub scales: Vec<f64>,
}

/// Multiplier turning a statistic-space weight into a per-grounding weight.
pub fn statistic_scale(n: usize, k: usize) -> f64 {
    let groundings = falling_factorial(n as u64, k as u64);
    if groundings == 0 {
        0.0
    } else {
        1.0 / groundings as f64
    }
}

fn fresh_name(vocab: &Vocabulary, i: usize) -> String {
    let mut name = format!("xi{i}");
    while vocab.lookup(&name).is_some() {
        name.insert(0, '_');
    }
    name
}

/// Formula `ξ(vars) <=> α [& !(x = y)]` over the variables of `α`.
fn biconditional(xi: PredId, alpha: &Formula) -> Formula {
    let k = alpha.num_vars();
    let head = Expr::atom(xi, (0..k).collect());
    let body = if k == 2 {
        Expr::and(alpha.expr().clone(), Expr::not(Expr::Equal(0, 1)))
    } else {
        alpha.expr().clone()
    };
    Formula::new(Expr::iff(head, body), alpha.vars().to_vec()).expect("same variables as the soft formula")
}

pub fn encode(model: &ModelSpec, lambda: &[f64], n: usize) -> XiEncoding {
    assert_eq!(lambda.len(), model.soft.len(), "one weight per soft formula");
    let mut vocabulary = model.vocabulary.clone();
    let mut theory: Vec<Formula> = model.hard.iter().map(|s| s.formula().clone()).collect();
    let mut xi = Vec::with_capacity(model.soft.len());
    let mut scales = Vec::with_capacity(model.soft.len());
    for (i, s) in model.soft.iter().enumerate() {
        let k = s.formula.num_vars();
        let name = fresh_name(&vocabulary, i);
        let p = vocabulary.declare(&name, k).expect("soft formulas have one or two variables");
        theory.push(biconditional(p, &s.formula));
        xi.push(p);
        scales.push(statistic_scale(n, k));
    }
    let mut weights = WeightFunctions::unit(vocabulary.len());
    for ((&p, &scale), &l) in xi.iter().zip(&scales).zip(lambda) {
        weights.set_log(p, scale * l, 0.0);
    }
    XiEncoding { vocabulary, theory, weights, xi, scales }
}
