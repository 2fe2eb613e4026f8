//! The relational marginal polytope: realizable statistic vectors, their
//! vertices, the affine hull, facets, membership and interiority.

mod hull;
mod points;

pub use hull::{affine_hull, extract_vertices, facets, is_vertex_exhaustive, membership, ray_length, AffineHull, Facet, Membership};
pub use points::{enumerate_configurations, enumerate_counts, grounding_totals, to_stat_vector, CellConfiguration, MAX_BOX_BITS};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};

use crate::logic::{ModelSpec, StatVector};
use crate::numerics::linalg::Matrix;
use crate::numerics::rational::to_f64;
use crate::numerics::Rational;
use crate::wfomc::{LiftedModel, WfomcError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("the statistic space is too large to enumerate")]
    TooLarge,
    #[error(transparent)]
    Wfomc(#[from] WfomcError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FacetMode {
    /// Facets only when the affine dimension is at most 3.
    Auto,
    Full,
    Off,
}

impl FacetMode {
    fn enabled(self, dim: usize) -> bool {
        match self {
            FacetMode::Auto => dim <= 3,
            FacetMode::Full => true,
            FacetMode::Off => false,
        }
    }
}

/// Interiority of a point: the radius of the largest ball around it, within
/// the affine hull, that stays inside the polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct Interiority {
    pub eta: f64,
    /// `η²`, exact; `None` when `η` is infinite (a single point).
    pub eta_squared: Option<Rational>,
    /// Index of a facet attaining the minimum distance.
    pub facet: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Polytope {
    /// Ambient dimension (number of soft formulas).
    pub num_formulas: usize,
    pub points: Vec<StatVector>,
    pub vertices: Vec<StatVector>,
    pub hull: AffineHull,
    pub facets: Option<Vec<Facet>>,
}

impl Polytope {
    /// Builds the polytope of a model over a domain of size `n`. Fails when the
    /// hard constraints have no model.
    pub fn build(model: &ModelSpec, n: usize, mode: FacetMode) -> Result<Self, PolytopeError> {
        let points = enumerate_points(model, n)?;
        if points.is_empty() {
            return Err(PolytopeError::Wfomc(WfomcError::Unsatisfiable(n)));
        }
        Ok(Polytope::from_points(points, model.soft.len(), mode))
    }

    /// `points` must be distinct and nonempty.
    pub fn from_points(points: Vec<StatVector>, num_formulas: usize, mode: FacetMode) -> Self {
        let vertices = extract_vertices(&points);
        let hull = affine_hull(&vertices);
        let facets = mode.enabled(hull.dim).then(|| facets(&vertices, &hull));
        Polytope { num_formulas, points, vertices, hull, facets }
    }

    pub fn dim(&self) -> usize {
        self.hull.dim
    }

    pub fn a_eq(&self) -> &Matrix {
        &self.hull.a_eq
    }

    pub fn c_eq(&self) -> &[Rational] {
        &self.hull.c_eq
    }

    pub fn membership(&self, theta: &[Rational]) -> Membership {
        membership(theta, &self.vertices, self.facets.as_deref())
    }

    /// Exact interiority from the facets; `None` when facets were not computed.
    ///
    /// Points outside the relative interior get `η = 0`.
    pub fn interiority(&self, theta: &[Rational]) -> Option<Interiority> {
        if self.dim() == 0 {
            let inside = self.vertices[0].0 == theta;
            return Some(if inside {
                Interiority { eta: f64::INFINITY, eta_squared: None, facet: None }
            } else {
                Interiority { eta: 0.0, eta_squared: Some(Rational::from_integer(BigInt::from(0))), facet: None }
            });
        }
        let facets = self.facets.as_ref()?;
        let zero = Rational::from_integer(BigInt::from(0));
        if !matches!(self.membership(theta), Membership::Inside { .. }) {
            let facet = facets.iter().position(|f| f.slack(theta) <= zero);
            return Some(Interiority { eta: 0.0, eta_squared: Some(zero), facet });
        }
        let (facet, d2) = facets
            .iter()
            .enumerate()
            .map(|(i, f)| (i, f.distance_squared(theta)))
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("a polytope of positive dimension has facets");
        Some(Interiority { eta: to_f64(&d2).sqrt(), eta_squared: Some(d2), facet: Some(facet) })
    }

    /// Upper bound on interiority by shooting rays along `samples` random
    /// directions of the affine hull.
    pub fn interiority_upper_bound(&self, theta: &[Rational], samples: usize, seed: u64) -> f64 {
        if self.dim() == 0 {
            return f64::INFINITY;
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let l = self.num_formulas;
        let mut best = f64::INFINITY;
        for s in 0..samples.max(2 * self.dim()) {
            let dir: Vec<Rational> = if s < 2 * self.dim() {
                let sign = if s % 2 == 0 { 1 } else { -1 };
                self.hull.directions[s / 2].iter().map(|x| x * Rational::from_integer(BigInt::from(sign))).collect()
            } else {
                let mut u = vec![Rational::from_integer(BigInt::from(0)); l];
                for row in &self.hull.directions {
                    let z = Rational::from_integer(BigInt::from(rng.gen_range(-8i64..=8)));
                    for (ui, r) in u.iter_mut().zip(row) {
                        *ui += &z * r;
                    }
                }
                u
            };
            let norm = crate::numerics::rational::norm_squared(&dir);
            if norm == Rational::from_integer(BigInt::from(0)) {
                continue;
            }
            if let Some(t) = ray_length(theta, &dir, &self.vertices) {
                best = best.min(to_f64(&t) * to_f64(&norm).sqrt());
            }
        }
        best
    }
}

/// Every realizable statistic vector, sorted, via lifted enumeration.
pub fn enumerate_points(model: &ModelSpec, n: usize) -> Result<Vec<StatVector>, PolytopeError> {
    let lifted = LiftedModel::new(model, n)?;
    let totals = grounding_totals(model, n);
    let mut pts: Vec<StatVector> = enumerate_counts(lifted.structure(), &totals, n)?
        .iter()
        .map(|c| to_stat_vector(c, &totals))
        .collect();
    pts.sort();
    pts.dedup();
    Ok(pts)
}
