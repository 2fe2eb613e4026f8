//! Exact linear algebra over big rationals.
//!
//! Matrices are dense row-major `Vec<Vec<Rational>>`. Everything here is
//! tolerance-free; floating callers convert explicitly with [`to_f64_matrix`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{to_f64, Rational};

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn transpose(m: &Matrix, ncols: usize) -> Matrix {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| super::rational::dot(row, v)).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix, b_cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..b_cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(Rational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn to_f64_matrix(m: &Matrix) -> Vec<Vec<f64>> {
    m.iter().map(|row| row.iter().map(to_f64).collect()).collect()
}

/// Reduced row echelon form. Returns the reduced matrix (zero rows dropped)
/// and the pivot column of each remaining row.
pub fn rref(m: &Matrix, ncols: usize) -> (Matrix, Vec<usize>) {
    let mut rows: Matrix = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Rank by fraction-free (Bareiss) elimination on the integer-scaled matrix.
pub fn rank(m: &Matrix, ncols: usize) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in col + 1..ncols {
                let v = (&a[r][col] * &a[i][j] - &a[i][col] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        r += 1;
    }
    r
}

/// A basis of the row space (the nonzero rows of the RREF).
pub fn row_basis(m: &Matrix, ncols: usize) -> Matrix {
    rref(m, ncols).0
}

/// A basis of `{ x : m x = 0 }`, one vector per free column, in canonical form.
pub fn null_space(m: &Matrix, ncols: usize) -> Matrix {
    let (reduced, pivots) = rref(m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b` for square nonsingular `m`; `None` if singular.
pub fn solve(m: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let augmented: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (reduced, pivots) = rref(&augmented, n + 1);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(reduced.iter().map(|row| row[n].clone()).collect())
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let augmented: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (reduced, pivots) = rref(&augmented, 2 * n);
    if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(reduced.iter().map(|row| row[n..].to_vec()).collect())
}

/// Orthogonal projector onto `null(a)`: `P = I - aᵀ (a aᵀ)⁻¹ a`.
///
/// `a` must have linearly independent rows; an empty `a` yields the identity.
pub fn null_projection(a: &Matrix, ncols: usize) -> Matrix {
    let mut p = identity(ncols);
    if a.is_empty() {
        return p;
    }
    let at = transpose(a, ncols);
    let gram = mat_mul(a, &at, a.len());
    let gram_inv = inverse(&gram).expect("rows of the equality system must be independent");
    let correction = mat_mul(&mat_mul(&at, &gram_inv, a.len()), a, ncols);
    for (prow, crow) in p.iter_mut().zip(&correction) {
        for (x, c) in prow.iter_mut().zip(crow) {
            *x -= c;
        }
    }
    p
}

/// Exact Gram–Schmidt. The output vectors are pairwise orthogonal and span the
/// same space as the (independent) inputs.
pub fn orthogonalize(vectors: &Matrix) -> Matrix {
    let mut out: Matrix = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let coeff = super::rational::dot(&w, u) / super::rational::norm_squared(u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= &coeff * ui;
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            out.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn identity_and_zero_ranks() {
        assert_eq!(rank(&identity(4), 4), 4);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]]), 2), 0);
        let zero = m(&[&[0, 0, 0]]);
        assert_eq!(null_projection(&row_basis(&zero, 3), 3), identity(3));
    }

    #[test]
    fn null_space_of_complement_difference() {
        let diffs = m(&[&[1, -1]]);
        let ns = null_space(&diffs, 2);
        assert_eq!(ns, m(&[&[1, 1]]));
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv, 2), identity(2));
        assert!(solve(&m(&[&[1, 2], &[2, 4]]), &[int(1), int(2)]).is_none());
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..4, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec((-3i64..4, 1i64..4), c), r)
                .prop_map(|rows| rows.into_iter().map(|row| row.into_iter().map(|(p, q)| rat(p, q)).collect()).collect())
        })
    }

    proptest! {
        #[test]
        fn bareiss_rank_agrees_with_rref(a in small_matrix()) {
            let ncols = a[0].len();
            prop_assert_eq!(rank(&a, ncols), rref(&a, ncols).1.len());
        }

        #[test]
        fn null_projection_annihilates(a in small_matrix(), v in proptest::collection::vec(-5i64..6, 4)) {
            let ncols = a[0].len();
            let basis = row_basis(&a, ncols);
            let p = null_projection(&basis, ncols);
            let v: Vec<Rational> = v.into_iter().take(ncols).map(int).collect();
            prop_assume!(v.len() == ncols);
            let pv = mat_vec(&p, &v);
            for row in &basis {
                prop_assert!(crate::numerics::rational::dot(row, &pv).is_zero());
            }
            prop_assert_eq!(mat_mul(&p, &p, ncols), p.clone());
            prop_assert_eq!(rank(&basis, ncols) + null_space(&a, ncols).len(), ncols);
        }
    }
}
