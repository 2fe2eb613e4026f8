mod common;

use lifted_mln::logic::parse_model;
use lifted_mln::numerics::diff::{central_gradient, relative_error};
use lifted_mln::oracle::{BruteSpace, DEFAULT_ATOM_CAP};
use lifted_mln::wfomc::{encode, exact_world_count, lifted_expectations, lifted_z, log_world_count, LiftedModel};
use num_bigint::BigInt;
use rand::SeedableRng;

#[test]
fn unary_and_smokers_counts() {
    let m = parse_model("predicate sm/1").unwrap();
    for n in 1..8 {
        let z = lifted_z(&m, &[], n).unwrap();
        assert!((z.ln() - n as f64 * 2f64.ln()).abs() < 1e-12);
    }
    let s = common::model("friends_of_smokers");
    assert!((lifted_z(&s, &[0.0], 2).unwrap().ln() - 64f64.ln()).abs() < 1e-12);
    assert_eq!(LiftedModel::new(&s, 3).unwrap().exact_world_count(), BigInt::from(4096));
}

#[test]
fn world_counts() {
    let m = parse_model("predicate fr/2").unwrap();
    for n in 1..6 {
        let l = log_world_count(&m.hard, &m.vocabulary, n).unwrap().ln();
        assert!((l - (n * n) as f64 * 2f64.ln()).abs() < 1e-10);
    }
    let sym = parse_model("hard fr(x,y) => fr(y,x)").unwrap();
    assert_eq!(exact_world_count(&sym.hard, &sym.vocabulary, 2).unwrap(), BigInt::from(8));
    let unsat = common::model("unsatisfiable");
    assert!(lifted_z(&unsat, &[0.3], 3).unwrap().is_zero());
    assert!(lifted_expectations(&unsat, &[0.3], 3).is_err());
}

#[test]
fn encoding_weights() {
    let m = parse_model("1.0 :: e(x,y)").unwrap();
    let enc = encode(&m, &[6.0], 3);
    assert!((enc.weights.log_w[enc.xi[0].0] - 1.0).abs() < 1e-15);
    let zero = encode(&m, &[0.0], 3);
    assert!(zero.weights.exact.is_some());
    assert_eq!(zero.vocabulary.predicate(zero.xi[0]).arity, 2);
}

#[test]
fn uniform_expectations() {
    let e = lifted_expectations(&common::model("smokes"), &[0.0], 4).unwrap();
    assert!((e[0] - 0.5).abs() < 1e-15);
    let e = lifted_expectations(&common::model("friends_of_smokers"), &[0.0], 4).unwrap();
    assert!((e[0] - 0.75).abs() < 1e-14);
}

#[test]
fn matches_brute_force_on_small_domains() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for (name, m) in common::corpus() {
        for n in 1..=3 {
            let space = BruteSpace::build(&m, n, DEFAULT_ATOM_CAP).unwrap();
            let lifted = LiftedModel::new(&m, n).unwrap();
            assert_eq!(lifted.exact_world_count(), space.world_count(), "{name} n={n}");
            for _ in 0..3 {
                let lambda = common::uniform(&mut rng, m.soft.len(), -2.0, 2.0);
                let ev = lifted.evaluate(&lambda);
                if space.is_empty() {
                    assert!(ev.log_z.is_zero());
                    continue;
                }
                assert!(relative_error(ev.log_z.ln(), space.log_z(&lambda)) < 1e-9, "{name} n={n}");
                let brute = space.expectations(&lambda).unwrap();
                for (a, b) in ev.expectations.unwrap().iter().zip(&brute) {
                    assert!((a - b).abs() < 1e-9, "{name} n={n}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn expectations_are_the_log_partition_gradient() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for (name, m) in common::corpus().filter(|(n, _)| *n != "unsatisfiable") {
        let lifted = LiftedModel::new(&m, 5).unwrap();
        let lambda = common::uniform(&mut rng, m.soft.len(), -2.0, 2.0);
        let e = lifted.expectations(&lambda).unwrap();
        let fd = central_gradient(|x| lifted.log_z(x).ln(), &lambda, 1e-4);
        for (a, b) in e.iter().zip(&fd) {
            assert!(relative_error(*a, *b) < 1e-6, "{name}: {a} vs {b}");
            assert!((-1e-12..=1.0 + 1e-12).contains(a));
        }
        // Raising one weight never lowers its own expected statistic.
        for i in 0..lambda.len() {
            let mut up = lambda.clone();
            up[i] += 0.5;
            assert!(lifted.expectations(&up).unwrap()[i] >= e[i] - 1e-12, "{name}");
        }
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let m = common::model("smokers_three");
    let lambda = [0.3, -1.2, 0.8];
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| LiftedModel::new(&m, 12).unwrap().evaluate(&lambda))
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.log_z.ln().to_bits(), b.log_z.ln().to_bits());
    assert_eq!(a.expectations, b.expectations);
}
