mod common;

use lifted_mln::logic::{parse_model, stat_vector, StatVector};
use lifted_mln::numerics::linalg::{mat_vec, rank};
use lifted_mln::numerics::rational::{int, rat};
use lifted_mln::numerics::Rational;
use lifted_mln::oracle::{BruteSpace, DEFAULT_ATOM_CAP};
use lifted_mln::polytope::{
    affine_hull, enumerate_configurations, enumerate_points, extract_vertices, is_vertex_exhaustive, FacetMode,
    Membership, Polytope,
};
use lifted_mln::wfomc::LiftedModel;

fn sv(v: &[Rational]) -> StatVector {
    StatVector(v.to_vec())
}

#[test]
fn unary_configurations() {
    let m = parse_model("predicate sm/1").unwrap();
    let lifted = LiftedModel::new(&m, 2).unwrap();
    let configs = enumerate_configurations(lifted.structure(), 2, 1000).unwrap();
    let cells: Vec<Vec<usize>> = configs.iter().map(|c| c.cells.clone()).collect();
    assert_eq!(cells, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    let world = configs[0].representative_world(&m, lifted.structure(), vec!["Alice".into(), "Bob".into()]);
    assert_eq!(world.num_true_atoms(), 2);

    let pts = enumerate_points(&common::model("smokes"), 2).unwrap();
    assert_eq!(pts, vec![sv(&[int(0)]), sv(&[rat(1, 2)]), sv(&[int(1)])]);
}

#[test]
fn representative_worlds_realize_their_statistics() {
    for name in ["symmetric_friendship", "antisymmetric", "guarded_edge", "three_formulas"] {
        let m = common::model(name);
        let n = 3;
        let lifted = LiftedModel::new(&m, n).unwrap();
        let totals = lifted_mln::polytope::grounding_totals(&m, n);
        let configs = enumerate_configurations(lifted.structure(), n, 200_000).unwrap();
        let domain: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
        for c in configs.iter().step_by(7) {
            let world = c.representative_world(&m, lifted.structure(), domain.clone());
            let expected = lifted_mln::polytope::to_stat_vector(&c.counts(lifted.structure()), &totals);
            assert_eq!(stat_vector(&m, &world).unwrap(), expected, "{name}");
            for h in &m.hard {
                assert!((0..n).all(|a| (0..n).all(|b| h.formula().eval(&world, &[a, b][..h.formula().num_vars()]))));
            }
        }
    }
}

#[test]
fn points_match_brute_force() {
    for (name, m) in common::corpus() {
        for n in 1..=3 {
            let brute: Vec<StatVector> = BruteSpace::build(&m, n, DEFAULT_ATOM_CAP).unwrap().points().into_iter().collect();
            let lifted = enumerate_points(&m, n).unwrap();
            assert_eq!(lifted, brute, "{name} n={n}");
            let bound: usize = m.soft.iter().map(|s| (n + 1).pow(s.formula.num_vars() as u32)).product();
            assert!(lifted.len() <= bound);
        }
    }
}

#[test]
fn vertices_match_exhaustive_check() {
    for (name, m) in common::corpus().filter(|(n, _)| *n != "unsatisfiable") {
        let pts = enumerate_points(&m, 3).unwrap();
        let fast = extract_vertices(&pts);
        let slow: Vec<StatVector> =
            (0..pts.len()).filter(|&i| is_vertex_exhaustive(&pts, i)).map(|i| pts[i].clone()).collect();
        assert_eq!(fast, slow, "{name}");
        let hull = affine_hull(&pts);
        for p in &pts {
            assert_eq!(mat_vec(&hull.a_eq, &p.0), hull.c_eq, "{name}");
        }
        assert_eq!(rank(&hull.a_eq, m.soft.len()) + hull.dim, m.soft.len());
    }
}

#[test]
fn hull_examples() {
    let v = extract_vertices(&[sv(&[int(0)]), sv(&[rat(1, 2)]), sv(&[int(1)])]);
    assert_eq!(v, vec![sv(&[int(0)]), sv(&[int(1)])]);
    assert_eq!(extract_vertices(&[sv(&[rat(1, 3), int(1)])]).len(), 1);

    let h = affine_hull(&[sv(&[int(0)]), sv(&[int(1)])]);
    assert!(h.a_eq.is_empty());
    assert_eq!(h.dim, 1);

    let p = sv(&[rat(1, 2), rat(1, 3)]);
    let h = affine_hull(std::slice::from_ref(&p));
    assert_eq!(h.dim, 0);
    assert_eq!(h.a_eq, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
    assert_eq!(h.c_eq, p.0);

    let poly = Polytope::build(&common::model("unary_complement"), 3, FacetMode::Auto).unwrap();
    assert_eq!(poly.a_eq(), &vec![vec![int(1), int(1)]]);
    assert_eq!(poly.c_eq(), &[int(1)]);
}

#[test]
fn membership_and_interiority() {
    let poly = Polytope::build(&common::model("smokes"), 2, FacetMode::Auto).unwrap();
    let half = [rat(1, 2)];
    assert!(matches!(poly.membership(&half), Membership::Inside { .. }));
    let eta = poly.interiority(&half).unwrap();
    assert_eq!(eta.eta_squared, Some(rat(1, 4)));
    assert!(matches!(poly.membership(&[int(1)]), Membership::Boundary { facet: Some(_) }));
    assert_eq!(poly.interiority(&[int(1)]).unwrap().eta, 0.0);
    match poly.membership(&[int(2)]) {
        Membership::Outside { normal, offset } => {
            assert!(poly.vertices.iter().all(|v| lifted_mln::numerics::rational::dot(&normal, &v.0) <= offset));
            assert!(lifted_mln::numerics::rational::dot(&normal, &[int(2)]) > offset);
        }
        other => panic!("expected outside, got {other:?}"),
    }

    let square = Polytope::build(&common::model("two_unary"), 2, FacetMode::Auto).unwrap();
    let centroid: Vec<Rational> = (0..3)
        .map(|i| square.vertices.iter().map(|v| v.0[i].clone()).sum::<Rational>() / int(square.vertices.len() as i64))
        .collect();
    assert!(matches!(square.membership(&centroid), Membership::Inside { .. }));
    let exact = square.interiority(&centroid).unwrap().eta;
    let upper = square.interiority_upper_bound(&centroid, 24, 1);
    assert!(exact <= upper + 1e-12);
    for v in &square.vertices {
        assert!(matches!(square.membership(&v.0), Membership::Boundary { .. }));
    }
}

#[test]
fn interiority_is_isotone() {
    for name in ["two_unary", "edges_mutual", "smokers_three"] {
        let poly = Polytope::build(&common::model(name), 3, FacetMode::Full).unwrap();
        let l = poly.num_formulas;
        let centroid: Vec<Rational> = (0..l)
            .map(|i| poly.vertices.iter().map(|v| v.0[i].clone()).sum::<Rational>() / int(poly.vertices.len() as i64))
            .collect();
        let full = poly.interiority(&centroid).unwrap().eta;
        for drop in 0..poly.vertices.len() {
            let rest: Vec<StatVector> =
                poly.vertices.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, v)| v.clone()).collect();
            let smaller = Polytope::from_points(rest, l, FacetMode::Full);
            if smaller.dim() < poly.dim() {
                continue;
            }
            if let Some(i) = smaller.interiority(&centroid) {
                assert!(i.eta <= full + 1e-12, "{name}");
            }
        }
    }
}
