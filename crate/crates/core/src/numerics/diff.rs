/// Central finite-difference gradient of `f` at `x` with step `h`.
pub fn central_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient() {
        let g = central_gradient(|x| x[0] * x[0] + 3.0 * x[1], &[2.0, -1.0], 1e-4);
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn relative_error_floors_at_one() {
        assert_eq!(relative_error(1e-20, 0.0), 1e-20);
        assert!((relative_error(200.0, 100.0) - 0.5).abs() < 1e-15);
        assert_eq!(relative_error(f64::NEG_INFINITY, f64::NEG_INFINITY), 0.0);
    }
}
