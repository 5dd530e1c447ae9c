//! One-dimensional quadrature rules combined into tensor-product grids.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss–Legendre nodes and weights on `[a, b]` by the Golub–Welsch method.
pub fn gauss_legendre(count: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(count >= 1);
    let mut t = DMatrix::<f64>::zeros(count, count);
    for k in 1..count {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        t[(k - 1, k)] = beta;
        t[(k, k - 1)] = beta;
    }
    let eig = SymmetricEigen::new(t);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut out: Vec<(f64, f64)> = (0..count)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (mid + half * eig.eigenvalues[i], 2.0 * v0 * v0 * half)
        })
        .collect();
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// Trapezoid rule on the periodic interval `[a, b)`: equally spaced nodes, equal weights.
pub fn periodic_trapezoid(count: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(count >= 1);
    let h = (b - a) / count as f64;
    (0..count).map(|k| (a + k as f64 * h, h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(6, -1.0, 1.0);
        for deg in 0..12 {
            let q: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn gauss_legendre_on_shifted_interval() {
        let rule = gauss_legendre(20, 0.0, std::f64::consts::PI);
        let q: f64 = rule.iter().map(|&(x, w)| w * x.sin()).sum();
        assert!((q - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_is_exact_for_low_trigonometric_modes() {
        let tau = std::f64::consts::TAU;
        let rule = periodic_trapezoid(8, 0.0, tau);
        let q: f64 = rule.iter().map(|&(x, w)| w * (3.0 * x).cos().powi(2)).sum();
        assert!((q - std::f64::consts::PI).abs() < 1e-13);
    }
}
