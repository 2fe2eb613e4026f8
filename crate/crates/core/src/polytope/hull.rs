use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::logic::StatVector;
use crate::numerics::linalg::{self, Matrix};
use crate::numerics::lp::{LinearProgram, LpOutcome, Relation};
use crate::numerics::rational::{dot, sub};
use crate::numerics::Rational;

/// Positive per-coordinate factors that make every point integral.
pub(crate) fn integer_scaling(points: &[StatVector], l: usize) -> Vec<BigInt> {
    (0..l)
        .map(|i| points.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.0[i].denom())))
        .collect()
}

pub(crate) fn scale_to_integers(points: &[StatVector], scale: &[BigInt]) -> Vec<Vec<i64>> {
    points
        .iter()
        .map(|p| {
            p.0.iter()
                .zip(scale)
                .map(|(x, s)| (x * Rational::from_integer(s.clone())).to_integer().to_i64().expect("counts fit in i64"))
                .collect()
        })
        .collect()
}

fn as_rationals(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()
}

/// LP `target = Σ μ_v v, Σ μ_v = 1, μ >= 0` over `pts`.
pub(crate) fn combination_lp(target: &[Rational], pts: &[Vec<Rational>]) -> LinearProgram {
    let l = target.len();
    let mut lp = LinearProgram::new(pts.len());
    for i in 0..l {
        lp.push(pts.iter().map(|p| p[i].clone()).collect(), Relation::Eq, target[i].clone());
    }
    lp.push(vec![Rational::one(); pts.len()], Relation::Eq, Rational::one());
    lp
}

/// Points that are the midpoint of two other points of the set are never vertices.
fn midpoint_candidates(ints: &[Vec<i64>]) -> Vec<usize> {
    let set: HashSet<&Vec<i64>> = ints.iter().collect();
    (0..ints.len())
        .filter(|&i| {
            let p = &ints[i];
            !ints.iter().enumerate().any(|(j, q)| {
                if j == i {
                    return false;
                }
                let mirror: Vec<i64> = p.iter().zip(q).map(|(a, b)| 2 * a - b).collect();
                set.contains(&mirror)
            })
        })
        .collect()
}

/// Vertices of `conv(points)`, in the input order. `points` must be distinct.
pub fn extract_vertices(points: &[StatVector]) -> Vec<StatVector> {
    if points.is_empty() {
        return Vec::new();
    }
    let l = points[0].len();
    let scale = integer_scaling(points, l);
    let ints = scale_to_integers(points, &scale);
    let rats: Vec<Vec<Rational>> = ints.iter().map(|p| as_rationals(p)).collect();
    let candidates = midpoint_candidates(&ints);
    let lex_max = |among: &[usize]| -> usize { *among.iter().max_by(|&&a, &&b| ints[a].cmp(&ints[b])).unwrap() };

    let mut known: Vec<usize> = Vec::new();
    for &p in &candidates {
        while !known.contains(&p) {
            let direction: Vec<Rational> = if known.is_empty() {
                vec![Rational::zero(); l]
            } else {
                let pts: Vec<Vec<Rational>> = known.iter().map(|&k| rats[k].clone()).collect();
                match combination_lp(&rats[p], &pts).solve() {
                    LpOutcome::Infeasible(cert) => cert.multipliers[..l].to_vec(),
                    _ => break,
                }
            };
            let best = (0..ints.len()).map(|i| dot(&direction, &rats[i])).max().unwrap();
            let face: Vec<usize> = (0..ints.len()).filter(|&i| dot(&direction, &rats[i]) == best).collect();
            let v = lex_max(&face);
            debug_assert!(!known.contains(&v));
            known.push(v);
        }
    }
    known.sort_unstable();
    known.into_iter().map(|i| points[i].clone()).collect()
}

/// Exhaustive check: `points[idx]` is not a convex combination of the other points.
pub fn is_vertex_exhaustive(points: &[StatVector], idx: usize) -> bool {
    let others: Vec<Vec<Rational>> =
        points.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, p)| p.0.clone()).collect();
    if others.is_empty() {
        return true;
    }
    matches!(combination_lp(&points[idx].0, &others).solve(), LpOutcome::Infeasible(_))
}

/// `A_eq x = c_eq` cut out the affine hull; `directions` span its difference space.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineHull {
    pub a_eq: Matrix,
    pub c_eq: Vec<Rational>,
    pub directions: Matrix,
    pub dim: usize,
}

pub fn affine_hull(points: &[StatVector]) -> AffineHull {
    assert!(!points.is_empty(), "affine hull of an empty set");
    let l = points[0].len();
    let p0 = &points[0].0;
    let diffs: Matrix = points[1..].iter().map(|p| sub(&p.0, p0)).collect();
    let directions = linalg::row_basis(&diffs, l);
    let a_eq = linalg::null_space(&diffs, l);
    let c_eq = linalg::mat_vec(&a_eq, p0);
    let dim = directions.len();
    AffineHull { a_eq, c_eq, directions, dim }
}

/// A facet `normal · x <= offset` with `normal` inside the hull's difference space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Facet {
    /// Slack `offset − normal · θ`.
    pub fn slack(&self, theta: &[Rational]) -> Rational {
        &self.offset - dot(&self.normal, theta)
    }

    /// Squared Euclidean distance from `θ` to the facet hyperplane.
    pub fn distance_squared(&self, theta: &[Rational]) -> Rational {
        let s = self.slack(theta);
        &s * &s / crate::numerics::rational::norm_squared(&self.normal)
    }
}

fn integer_row(v: &[Rational]) -> Vec<i128> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter().map(|x| (x / &g).to_i128().expect("normal fits in i128")).collect()
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facets of `conv(vertices)` by enumerating affinely independent `dim`-subsets.
pub fn facets(vertices: &[StatVector], hull: &AffineHull) -> Vec<Facet> {
    let d = hull.dim;
    if d == 0 {
        return Vec::new();
    }
    let l = vertices[0].len();
    let scale = integer_scaling(vertices, l);
    let ints = scale_to_integers(vertices, &scale);
    // Equations of the scaled hull: rows of a_eq divided coordinatewise by the scale.
    let scaled_eq: Matrix = hull
        .a_eq
        .iter()
        .map(|row| row.iter().zip(&scale).map(|(a, s)| a / Rational::from_integer(s.clone())).collect())
        .collect();
    let mut found: BTreeSet<(Vec<i128>, i128)> = BTreeSet::new();
    combinations(ints.len(), d, |subset| {
        let v0 = &ints[subset[0]];
        let mut m: Matrix = subset[1..]
            .iter()
            .map(|&s| as_rationals(&ints[s].iter().zip(v0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .collect();
        m.extend(scaled_eq.iter().cloned());
        let ns = linalg::null_space(&m, l);
        if ns.len() != 1 {
            return;
        }
        let a = integer_row(&ns[0]);
        let b: i128 = a.iter().zip(v0).map(|(x, &y)| x * y as i128).sum();
        let side = |v: &Vec<i64>| a.iter().zip(v).map(|(x, &y)| x * y as i128).sum::<i128>() - b;
        let (mut le, mut ge) = (true, true);
        for v in &ints {
            let s = side(v);
            le &= s <= 0;
            ge &= s >= 0;
            if !le && !ge {
                return;
            }
        }
        let (a, b) = if le { (a, b) } else { (a.iter().map(|x| -x).collect(), -b) };
        found.insert((a, b));
    });
    let projector = linalg::null_projection(&hull.a_eq, l);
    found
        .into_iter()
        .map(|(a, _)| {
            let unscaled: Vec<Rational> =
                a.iter().zip(&scale).map(|(x, s)| Rational::from_integer(BigInt::from(*x) * s)).collect();
            let normal = linalg::mat_vec(&projector, &unscaled);
            let offset = vertices.iter().map(|v| dot(&normal, &v.0)).max().unwrap();
            Facet { normal, offset }
        })
        .collect()
}

/// Relative position of `θ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Strictly positive convex coefficients over the vertices.
    Inside { coefficients: Vec<Rational> },
    /// In the polytope but not its relative interior; the facet through `θ` when facets are known.
    Boundary { facet: Option<Facet> },
    /// `normal · v <= offset < normal · θ` for every vertex `v`.
    Outside { normal: Vec<Rational>, offset: Rational },
}

pub fn membership(theta: &[Rational], vertices: &[StatVector], facets: Option<&[Facet]>) -> Membership {
    let l = theta.len();
    let pts: Vec<Vec<Rational>> = vertices.iter().map(|v| v.0.clone()).collect();
    let feasibility = combination_lp(theta, &pts);
    if let LpOutcome::Infeasible(cert) = feasibility.solve() {
        let normal = cert.multipliers[..l].to_vec();
        let offset = -cert.multipliers[l].clone();
        return Membership::Outside { normal, offset };
    }
    // maximize t subject to μ_v >= t, with t >= 0 as the last variable.
    let k = pts.len();
    let mut lp = LinearProgram::new(k + 1);
    for c in combination_lp(theta, &pts).constraints {
        let mut coeffs = c.coeffs;
        coeffs.push(Rational::zero());
        lp.push(coeffs, c.relation, c.rhs);
    }
    for v in 0..k {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[v] = Rational::one();
        coeffs[k] = -Rational::one();
        lp.push(coeffs, Relation::Ge, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    match lp.maximize(objective).solve() {
        LpOutcome::Optimal(sol) if sol.value.is_positive() => {
            Membership::Inside { coefficients: sol.x[..k].to_vec() }
        }
        _ => {
            let facet = facets.and_then(|fs| fs.iter().find(|f| f.slack(theta).is_zero()).cloned());
            Membership::Boundary { facet }
        }
    }
}

/// Largest `s >= 0` with `θ + s u` in `conv(vertices)`; `None` if unbounded.
pub fn ray_length(theta: &[Rational], direction: &[Rational], vertices: &[StatVector]) -> Option<Rational> {
    let pts: Vec<Vec<Rational>> = vertices.iter().map(|v| v.0.clone()).collect();
    let k = pts.len();
    let mut lp = LinearProgram::new(k + 1);
    for (i, c) in combination_lp(theta, &pts).constraints.into_iter().enumerate() {
        let mut coeffs = c.coeffs;
        coeffs.push(if i < theta.len() { -direction[i].clone() } else { Rational::zero() });
        lp.push(coeffs, c.relation, c.rhs);
    }
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    match lp.maximize(objective).solve() {
        LpOutcome::Optimal(sol) => Some(sol.value),
        _ => None,
    }
}
