mod common;

use lifted_mln::logic::{parse_model, StatVector};
use lifted_mln::numerics::diff::{central_gradient, relative_error};
use lifted_mln::numerics::rational::{int, rat};
use lifted_mln::oracle::{
    brute_wfomc, enumerate_models, evidence_expectations, BruteSpace, OracleError, WeightFunctions, DEFAULT_ATOM_CAP,
};
use lifted_mln::wfomc::encode;
use num_bigint::BigInt;
use rand::SeedableRng;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("C{i}")).collect()
}

#[test]
fn model_enumeration_counts() {
    let m = parse_model("predicate sm/1").unwrap();
    assert_eq!(enumerate_models(&m.hard, &m.vocabulary, names(2), DEFAULT_ATOM_CAP).unwrap().count(), 4);
    let m = parse_model("hard fr(x,y) => fr(y,x)").unwrap();
    assert_eq!(enumerate_models(&m.hard, &m.vocabulary, names(2), DEFAULT_ATOM_CAP).unwrap().count(), 8);
    let m = parse_model("hard sm(x) & !sm(x)").unwrap();
    assert_eq!(enumerate_models(&m.hard, &m.vocabulary, names(2), DEFAULT_ATOM_CAP).unwrap().count(), 0);
    let m = parse_model("predicate e/2").unwrap();
    assert!(matches!(
        enumerate_models(&m.hard, &m.vocabulary, names(6), DEFAULT_ATOM_CAP),
        Err(OracleError::CapExceeded { atoms: 36, cap: 25 })
    ));
}

#[test]
fn weighted_counts() {
    let m = parse_model("predicate sm/1\npredicate fr/2").unwrap();
    let w = WeightFunctions::unit(2);
    let v = brute_wfomc(&[], &m.vocabulary, &w, 2, &[], DEFAULT_ATOM_CAP).unwrap();
    assert_eq!(v.exact, Some(int(64)));

    let m = parse_model("predicate sm/1").unwrap();
    let mut w = WeightFunctions::unit(1);
    w.set_rational(m.vocabulary.lookup("sm").unwrap(), int(2), int(1));
    let v = brute_wfomc(&[], &m.vocabulary, &w, 3, &[], DEFAULT_ATOM_CAP).unwrap();
    assert_eq!(v.exact, Some(int(27)));
    assert!((v.log.ln() - 27f64.ln()).abs() < 1e-14);

    let m = parse_model("hard sm(x) & !sm(x)").unwrap();
    let hard: Vec<_> = m.hard.iter().map(|s| s.formula().clone()).collect();
    let v = brute_wfomc(&hard, &m.vocabulary, &WeightFunctions::unit(1), 2, &[], DEFAULT_ATOM_CAP).unwrap();
    assert!(v.log.is_zero());
    assert_eq!(v.exact, Some(int(0)));
}

#[test]
fn dual_closed_forms() {
    let m = common::model("smokes");
    let space = BruteSpace::build(&m, 1, DEFAULT_ATOM_CAP).unwrap();
    for t in [-2.0, 0.0, 0.7, 3.0] {
        let (l, g) = space.dual(&[t], &[0.25]).unwrap();
        assert!((l - (0.25 * t - (1.0 + t.exp()).ln())).abs() < 1e-14);
        assert!((g[0] - (0.25 - t.exp() / (1.0 + t.exp()))).abs() < 1e-14);
    }
    let mle = space.mle(&[0.75], 1e-12).unwrap();
    assert!((mle.lambda[0] - 3f64.ln()).abs() < 1e-10);

    let space = BruteSpace::build(&common::model("friends_of_smokers"), 3, DEFAULT_ATOM_CAP).unwrap();
    let (l, g) = space.dual(&[0.0], &[0.5]).unwrap();
    assert!((l + 12.0 * 2f64.ln()).abs() < 1e-12);
    assert!((g[0] - (0.5 - 0.75)).abs() < 1e-12);
}

#[test]
fn uniform_target_gives_zero_weights() {
    let m = common::model("two_unary");
    let space = BruteSpace::build(&m, 3, DEFAULT_ATOM_CAP).unwrap();
    let theta = space.expectations(&[0.0; 3]).unwrap();
    let mle = space.mle(&theta, 1e-10).unwrap();
    assert!(mle.lambda.iter().all(|x| x.abs() < 1e-9));
    assert!((mle.value + space.log_world_count()).abs() < 1e-12);
}

#[test]
fn point_sets() {
    let space = BruteSpace::build(&common::model("smokes"), 2, DEFAULT_ATOM_CAP).unwrap();
    let pts: Vec<StatVector> = space.points().into_iter().collect();
    assert_eq!(pts, vec![StatVector(vec![int(0)]), StatVector(vec![rat(1, 2)]), StatVector(vec![int(1)])]);

    let complete = parse_model("hard e(x,y)\n1.0 :: e(x,y)").unwrap();
    let space = BruteSpace::build(&complete, 3, DEFAULT_ATOM_CAP).unwrap();
    assert_eq!(space.points().into_iter().collect::<Vec<_>>(), vec![StatVector(vec![int(1)])]);
    assert_eq!(space.world_count(), BigInt::from(1));

    // Edge and triangle-like densities: no world has edges absent but mutual pairs present.
    let m = common::model("edges_mutual");
    let space = BruteSpace::build(&m, 3, DEFAULT_ATOM_CAP).unwrap();
    assert!(space.points().iter().all(|p| p.0[0] != int(0) || p.0[1] == int(0)));
}

#[test]
fn dual_invariants_and_gradient() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for (name, m) in common::corpus().filter(|(n, _)| *n != "unsatisfiable") {
        let space = BruteSpace::build(&m, 3, DEFAULT_ATOM_CAP).unwrap();
        let l = m.soft.len();
        let points: Vec<_> = space.points().into_iter().collect();
        let theta = points[points.len() / 2].to_f64();
        let lambda = common::uniform(&mut rng, l, -2.0, 2.0);
        let (value, grad) = space.dual(&lambda, &theta).unwrap();
        assert!(value <= 1e-12, "{name}: L = {value}");
        let fd = central_gradient(|x| space.dual(x, &theta).unwrap().0, &lambda, 1e-4);
        for (g, f) in grad.iter().zip(&fd) {
            assert!(relative_error(*g, *f) < 1e-6, "{name}: {g} vs {f}");
        }
        let e = space.expectations(&lambda).unwrap();
        for i in 0..l {
            let lo = points.iter().map(|p| p.to_f64()[i]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p.to_f64()[i]).fold(f64::NEG_INFINITY, f64::max);
            assert!(e[i] >= lo - 1e-12 && e[i] <= hi + 1e-12, "{name}");
        }
        let (l0, _) = space.dual(&vec![0.0; l], &theta).unwrap();
        assert!((l0 + space.log_world_count()).abs() < 1e-12);
    }
}

#[test]
fn encoding_reproduces_partition_function() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let names = ["friends_of_smokers", "antireflexive", "two_unary", "reflexive_cells", "same_colour"];
    for name in names {
        let m = common::model(name);
        let lambda = common::uniform(&mut rng, m.soft.len(), -2.0, 2.0);
        let n = if name == "same_colour" || name == "two_unary" { 3 } else { 2 };
        let enc = encode(&m, &lambda, n);
        let brute = brute_wfomc(&enc.theory, &enc.vocabulary, &enc.weights, n, &[], DEFAULT_ATOM_CAP).unwrap();
        let space = BruteSpace::build(&m, n, DEFAULT_ATOM_CAP).unwrap();
        assert!(relative_error(brute.log.ln(), space.log_z(&lambda)) < 1e-12, "{name}");
        let by_evidence = evidence_expectations(&m, &lambda, n, DEFAULT_ATOM_CAP).unwrap();
        for (a, b) in by_evidence.iter().zip(space.expectations(&lambda).unwrap()) {
            assert!((a - b).abs() < 1e-12, "{name}: {a} vs {b}");
        }
    }
}
