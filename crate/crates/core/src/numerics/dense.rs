//! Small dense floating-point helpers for the optimizers.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `mᵀ v` for a matrix with `ncols` columns.
pub fn mat_t_vec(m: &[Vec<f64>], v: &[f64], ncols: usize) -> Vec<f64> {
    let mut out = vec![0.0; ncols];
    for (row, &vi) in m.iter().zip(v) {
        axpy(vi, row, &mut out);
    }
    out
}

/// Solves a square system by Gaussian elimination with partial pivoting; `None` if singular.
pub fn solve(m: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut a: Vec<Vec<f64>> = m.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    let scale = a.iter().flat_map(|r| r[..n].iter()).fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() <= 1e-300f64.max(scale * 1e-15) {
            return None;
        }
        a.swap(col, p);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..=n {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][n] - s) / a[i][i];
    }
    Some(x)
}

/// Normalizes exactly-orthogonal rational rows into float unit vectors.
pub fn normalize_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| {
            let n = norm(r);
            r.iter().map(|x| x / n).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let x = solve(&[vec![2.0, 1.0], vec![1.0, 3.0]], &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0]).is_none());
        assert_eq!(solve(&[], &[]), Some(vec![]));
    }

    #[test]
    fn transpose_product() {
        let m = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        assert_eq!(mat_t_vec(&m, &[1.0, 0.0, 1.0], 2), vec![6.0, 8.0]);
        assert_eq!(mat_vec(&m, &[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
    }
}
