mod common;

use lifted_mln::learner::{
    ellipsoid_budget, learn, learn_from_world, project, LearnError, LearnOptions, LearnProblem, LearnStatus, Optimizer,
};
use lifted_mln::logic::{parse_database, parse_model};
use lifted_mln::numerics::dense;
use lifted_mln::numerics::linalg::to_f64_matrix;
use lifted_mln::numerics::rational::{dot, int, rat, to_f64};
use lifted_mln::oracle::{BruteSpace, DEFAULT_ATOM_CAP};
use lifted_mln::polytope::FacetMode;
use proptest::prelude::*;
use rand::SeedableRng;

const OPTIMIZERS: [Optimizer; 2] = [Optimizer::Pgd, Optimizer::Ellipsoid];

fn options(optimizer: Optimizer) -> LearnOptions {
    LearnOptions { optimizer, ..LearnOptions::default() }
}

#[test]
fn projection_examples() {
    let v = [1.0, -2.0, 0.5];
    assert_eq!(project(&v, &Vec::new()), v.to_vec());
    let a = vec![vec![int(1), int(1), int(0)]];
    let p = project(&[2.0, 2.0, 0.0], &a);
    assert!(dense::norm(&p) < 1e-15);
    let p = project(&v, &a);
    assert!((p[0] + p[1]).abs() < 1e-15);
    assert!(dense::norm(&p) <= dense::norm(&v));
    assert_eq!(project(&p, &a), p);
}

proptest! {
    #[test]
    fn projection_contracts_and_is_idempotent(
        rows in proptest::collection::vec(proptest::collection::vec(-3i64..4, 3), 1..3),
        v in proptest::collection::vec(-5.0f64..5.0, 3),
    ) {
        let m: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let a = lifted_mln::numerics::linalg::row_basis(&m, 3);
        let p = project(&v, &a);
        prop_assert!(dense::norm(&p) <= dense::norm(&v) + 1e-12);
        for row in to_f64_matrix(&a) {
            prop_assert!(dense::dot(&row, &p).abs() < 1e-9);
        }
        let pp = project(&p, &a);
        for (x, y) in p.iter().zip(&pp) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn dual_at_origin_is_negative_log_world_count() {
    let m = common::model("friends_of_smokers");
    let problem = LearnProblem::new(&m, 2, &[rat(1, 2)], &LearnOptions::default()).unwrap();
    let (value, grad) = problem.dual_oracle(&[0.0]).unwrap();
    assert!((value + 6.0 * 2f64.ln()).abs() < 1e-12);
    assert!((grad[0] + 0.25).abs() < 1e-12);
    assert!(value <= 0.0);
}

#[test]
fn single_constant_closed_form() {
    let m = common::model("smokes");
    for optimizer in OPTIMIZERS {
        let report = learn(&m, 1, &[rat(3, 4)], &options(optimizer)).unwrap();
        assert_eq!(report.status, LearnStatus::Converged);
        assert!((report.lambda[0] - 3f64.ln()).abs() < 0.05, "{optimizer:?}: {}", report.lambda[0]);
        assert!(report.moment_gap <= 1e-3f64.sqrt());
        assert!((report.weights[0] - report.lambda[0]).abs() < 1e-15);
        assert!((report.eta - 0.25).abs() < 1e-15);
    }
}

#[test]
fn uniform_target_stays_at_origin() {
    let m = common::model("friends_of_smokers");
    for optimizer in OPTIMIZERS {
        let report = learn(&m, 2, &[rat(3, 4)], &options(optimizer)).unwrap();
        assert!(dense::norm(&report.lambda) < 1e-2, "{optimizer:?}");
        assert!((report.value + 6.0 * 2f64.ln()).abs() < 1e-4);
    }
}

#[test]
fn learns_from_the_example_world() {
    let m = parse_model(include_str!("../../../data/smokers.mln")).unwrap();
    let world = parse_database(include_str!("../../../data/example1.db"), &m.vocabulary).unwrap();
    for optimizer in OPTIMIZERS {
        let report = learn_from_world(&m, &world, &options(optimizer)).unwrap();
        assert_eq!(report.theta, vec![rat(1, 2)]);
        assert_eq!(report.status, LearnStatus::Converged);
        assert!((report.expectations[0] - 0.5).abs() <= 1e-3f64.sqrt());
        assert!((report.weights[0] * 6.0 - report.lambda[0]).abs() < 1e-12);
        let brute = BruteSpace::build(&m, 3, DEFAULT_ATOM_CAP).unwrap();
        let star = brute.mle(&[0.5], 1e-10).unwrap();
        let (value, _) = brute.dual(&report.lambda, &[0.5]).unwrap();
        assert!(value >= star.value - 1e-3);
    }
}

#[test]
fn boundary_and_outside_targets_are_refused() {
    let m = common::model("edges");
    let mut world = lifted_mln::logic::World::new(&m.vocabulary, vec!["a".into(), "b".into(), "c".into()]).unwrap();
    let e = m.vocabulary.lookup("e").unwrap();
    for a in 0..3 {
        for b in 0..3 {
            world.set(e, &[a, b], true);
        }
    }
    for optimizer in OPTIMIZERS {
        match learn_from_world(&m, &world, &options(optimizer)) {
            Err(LearnError::ZeroInteriority { facet: Some(f) }) => assert_eq!(f.slack(&[int(1)]), int(0)),
            other => panic!("expected zero interiority, got {other:?}"),
        }
    }
    let two = common::model("two_unary");
    assert!(matches!(
        learn(&two, 2, &[int(0), int(0), int(0)], &LearnOptions::default()),
        Err(LearnError::ZeroInteriority { .. })
    ));
    let theta = [rat(1, 2), rat(1, 2), int(1)];
    match learn(&two, 2, &theta, &LearnOptions::default()) {
        Err(LearnError::Infeasible { normal, offset }) => {
            assert!(dot(&normal, &theta) > offset);
            let pts = lifted_mln::polytope::enumerate_points(&two, 2).unwrap();
            assert!(pts.iter().all(|p| dot(&normal, &p.0) <= offset));
        }
        other => panic!("expected infeasible, got {other:?}"),
    }
    assert!(matches!(
        learn(&two, 2, &[int(0)], &LearnOptions::default()),
        Err(LearnError::DimensionMismatch { expected: 3, found: 1 })
    ));
}

#[test]
fn shift_invariance_along_equalities() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for name in ["unary_complement", "binary_complement", "covering", "chained", "two_unary"] {
        let m = common::model(name);
        let Some((_, theta)) = common::interior_training_theta(&m, 3, 11) else { continue };
        let problem = LearnProblem::new(&m, 3, &theta, &LearnOptions::default()).unwrap();
        let a = to_f64_matrix(&problem.a_eq);
        for _ in 0..5 {
            let lambda = common::uniform(&mut rng, m.num_soft(), -2.0, 2.0);
            let d = common::uniform(&mut rng, a.len(), -3.0, 3.0);
            let shifted: Vec<f64> = lambda.iter().zip(dense::mat_t_vec(&a, &d, m.num_soft())).map(|(x, y)| x + y).collect();
            let (l0, g0) = problem.dual_oracle(&lambda).unwrap();
            let (l1, g1) = problem.dual_oracle(&shifted).unwrap();
            assert!((l0 - l1).abs() <= 1e-9 * l0.abs().max(1.0), "{name}");
            let (p0, p1) = (problem.reduce(&g0), problem.reduce(&g1));
            assert!(p0.iter().zip(&p1).all(|(x, y)| (x - y).abs() < 1e-9));
            checked += 1;
        }
    }
    assert!(checked >= 15);
}

#[test]
fn ellipsoid_budget_follows_the_bound() {
    let m = common::model("smokes");
    let problem = LearnProblem::new(&m, 1, &[rat(3, 4)], &LearnOptions::default()).unwrap();
    let beta: f64 = 1e-3 * 0.25 / (3.0 * 2f64.ln());
    assert_eq!(ellipsoid_budget(&problem), (4.0 * (1.0 / beta).ln()).ceil() as usize);
    assert!((problem.radius - 4.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn optimality_against_brute_force() {
    for name in ["smokers_three", "symmetric_friendship", "antisymmetric", "unary_complement", "three_formulas"] {
        let m = common::model(name);
        let n = 3;
        let Some((_, theta)) = common::interior_training_theta(&m, n, 5) else { panic!("{name}: no interior world") };
        let theta_f: Vec<f64> = theta.iter().map(to_f64).collect();
        let brute = BruteSpace::build(&m, n, DEFAULT_ATOM_CAP).unwrap();
        let star = brute.mle(&theta_f, 1e-10).unwrap();
        let problem = LearnProblem::new(&m, n, &theta, &LearnOptions::default()).unwrap();
        // The optimum in the equality-free subspace lies in the bounding box.
        assert!(dense::norm(&star.lambda) <= problem.log_world_count / problem.eta + 1e-6, "{name}");
        for optimizer in OPTIMIZERS {
            let report = learn(&m, n, &theta, &options(optimizer)).unwrap();
            assert_eq!(report.status, LearnStatus::Converged, "{name} {optimizer:?}");
            assert!(report.moment_gap <= 1e-3f64.sqrt());
            assert!(dense::norm(&report.lambda) <= (m.num_soft() as f64).sqrt() * report.radius + 1e-9);
            let (value, _) = brute.dual(&report.lambda, &theta_f).unwrap();
            assert!((value - report.value).abs() < 1e-9);
            assert!(value >= star.value - 1e-3, "{name} {optimizer:?}: {value} vs {}", star.value);
            let kl = brute.kl(&star.lambda, &report.lambda);
            assert!((kl - (star.value - value)).abs() < 1e-6, "{name} {optimizer:?}");
        }
    }
}

#[test]
fn eta_override_skips_facets() {
    let m = common::model("two_unary");
    let Some((_, theta)) = common::interior_training_theta(&m, 3, 3) else { panic!() };
    let opts = LearnOptions { eta: Some(0.05), facets: FacetMode::Off, ..LearnOptions::default() };
    let report = learn(&m, 3, &theta, &opts).unwrap();
    assert_eq!(report.eta, 0.05);
    assert!(report.moment_gap <= 1e-3f64.sqrt());
    let opts = LearnOptions { facets: FacetMode::Off, ..LearnOptions::default() };
    assert!(matches!(learn(&m, 3, &theta, &opts), Err(LearnError::InteriorityUnavailable(_))));
    assert!(matches!(
        learn(&m, 3, &theta, &LearnOptions { eta: Some(0.0), ..LearnOptions::default() }),
        Err(LearnError::InvalidEta(_))
    ));
}
