#![allow(dead_code)]

use lifted_mln::logic::{parse_model, ModelSpec};

/// Models shared by the cross-validation suites. Vocabularies stay within
/// two unary and one binary predicate so that `n = 4` is enumerable.
pub const CORPUS: &[(&str, &str)] = &[
    ("smokes", "predicate sm/1\n0.5 :: sm(x)\n"),
    ("friends_of_smokers", "predicate sm/1\npredicate fr/2\n1.0 :: fr(x,y) => sm(y)\n"),
    (
        "smokers_three",
        "predicate sm/1\npredicate fr/2\n0.3 :: sm(x)\n-0.7 :: fr(x,y)\n1.1 :: fr(x,y) & sm(x) => sm(y)\n",
    ),
    (
        "symmetric_friendship",
        "predicate sm/1\npredicate fr/2\nhard fr(x,y) => fr(y,x)\n1.0 :: fr(x,y)\n0.5 :: sm(x) & fr(x,y) => sm(y)\n",
    ),
    ("antireflexive", "predicate fr/2\nhard !fr(x,x)\n1.0 :: fr(x,y)\n-1.0 :: fr(x,y) & fr(y,x)\n"),
    ("edges", "predicate e/2\n1.0 :: e(x,y)\n"),
    ("edges_mutual", "predicate e/2\n0.2 :: e(x,y)\n0.4 :: e(x,y) & e(y,x)\n"),
    ("unary_complement", "predicate p/1\n1.0 :: p(x)\n1.0 :: !p(x)\n"),
    ("binary_complement", "predicate e/2\n0.5 :: e(x,y)\n0.5 :: !e(x,y)\n"),
    ("two_unary", "predicate p/1\npredicate q/1\n0.3 :: p(x)\n0.6 :: q(x)\n-0.4 :: p(x) & q(y)\n"),
    (
        "guarded_edge",
        "predicate p/1\npredicate q/1\npredicate e/2\n1.0 :: p(x) & e(x,y) => q(y)\n0.5 :: e(x,x)\n",
    ),
    ("edge_implies_source", "predicate p/1\npredicate e/2\nhard e(x,y) => p(x)\n1.0 :: e(x,y)\n-0.5 :: p(x)\n"),
    ("antisymmetric", "predicate p/1\npredicate e/2\nhard e(x,y) => !e(y,x)\n0.8 :: e(x,y)\n0.2 :: p(x) & e(x,y)\n"),
    ("unsatisfiable", "predicate sm/1\nhard sm(x) & !sm(x)\n1.0 :: sm(x)\n"),
    (
        "covering",
        "predicate p/1\npredicate q/1\npredicate e/2\nhard p(x) | q(x)\n0.5 :: p(x) <=> q(x)\n0.5 :: e(x,y)\n",
    ),
    ("reflexive_cells", "predicate p/1\npredicate e/2\n0.7 :: e(x,x)\n-0.3 :: e(x,y) & p(x)\n"),
    ("same_colour", "predicate p/1\n1.5 :: p(x) <=> p(y)\n"),
    (
        "chained",
        "predicate p/1\npredicate q/1\npredicate e/2\nhard p(x) => q(x)\n0.2 :: p(x)\n0.4 :: q(x)\n0.6 :: e(x,y) & q(y)\n",
    ),
    (
        "simple_graph",
        "predicate sm/1\npredicate fr/2\nhard fr(x,y) => fr(y,x)\nhard !fr(x,x)\n0.9 :: fr(x,y)\n0.4 :: sm(x) & fr(x,y) => sm(y)\n",
    ),
    ("reciprocity", "predicate q/1\npredicate e/2\n0.5 :: e(x,y) => e(y,x)\n0.5 :: e(x,y) | q(x)\n-0.5 :: q(x)\n"),
    (
        "three_formulas",
        "predicate p/1\npredicate q/1\npredicate e/2\n0.3 :: p(x)\n-0.2 :: q(x) & e(x,y)\n0.6 :: e(x,y) => p(y)\n",
    ),
    ("endpoints", "predicate p/1\npredicate e/2\nhard e(x,y) => p(x) & p(y)\n0.4 :: e(x,y)\n0.1 :: p(x)\n"),
];

pub fn model(name: &str) -> ModelSpec {
    let (_, text) = CORPUS.iter().find(|(n, _)| *n == name).expect("corpus model");
    parse_model(text).unwrap()
}

pub fn corpus() -> impl Iterator<Item = (&'static str, ModelSpec)> {
    CORPUS.iter().map(|(name, text)| (*name, parse_model(text).unwrap()))
}

/// Deterministic uniform draws in `[lo, hi)`.
pub fn uniform(rng: &mut rand_chacha::ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    use rand::Rng;
    (0..len).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Every grounding (injective or not) of every hard sentence holds.
pub fn satisfies_hard(model: &ModelSpec, world: &lifted_mln::logic::World) -> bool {
    let n = world.domain_size();
    model.hard.iter().all(|h| {
        let f = h.formula();
        match f.num_vars() {
            0 => f.eval(world, &[]),
            1 => (0..n).all(|a| f.eval(world, &[a])),
            _ => (0..n).all(|a| (0..n).all(|b| f.eval(world, &[a, b]))),
        }
    })
}

/// Rejection-samples a world satisfying the hard sentences, with atom
/// probabilities drawn per world.
pub fn sample_world(
    model: &ModelSpec,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
    attempts: usize,
) -> Option<lifted_mln::logic::World> {
    use rand::Rng;
    let domain: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
    let atoms = model.vocabulary.ground_atom_count(n);
    for _ in 0..attempts {
        let bias = rng.gen_range(0.15..0.85);
        let truth: Vec<bool> = (0..atoms).map(|_| rng.gen_bool(bias)).collect();
        let world = lifted_mln::logic::World::from_truth(&model.vocabulary, domain.clone(), truth).unwrap();
        if satisfies_hard(model, &world) {
            return Some(world);
        }
    }
    None
}

/// Statistics of a sampled training world lying in the relative interior of the polytope.
pub fn interior_training_theta(
    model: &ModelSpec,
    n: usize,
    seed: u64,
) -> Option<(lifted_mln::logic::World, Vec<lifted_mln::numerics::Rational>)> {
    use lifted_mln::polytope::{FacetMode, Membership, Polytope};
    use rand::SeedableRng;
    let poly = Polytope::build(model, n, FacetMode::Off).ok()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let world = sample_world(model, n, &mut rng, 20_000)?;
        let theta = lifted_mln::logic::stat_vector(model, &world).unwrap().0;
        if matches!(poly.membership(&theta), Membership::Inside { .. }) {
            return Some((world, theta));
        }
    }
    None
}
