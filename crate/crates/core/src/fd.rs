//! Central finite differences on `DVector` arguments.

use nalgebra::{DMatrix, DVector};

/// Step sizes for first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub first: f64,
    pub second: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self {
            first: 1e-4,
            second: 1e-3,
        }
    }
}

fn shifted(u: &DVector<f64>, i: usize, h: f64) -> DVector<f64> {
    let mut v = u.clone();
    v[i] += h;
    v
}

/// Directional derivative of a vector-valued map along `dir`.
pub fn directional<F>(f: F, u: &DVector<f64>, dir: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let plus = f(&(u + dir * h));
    let minus = f(&(u - dir * h));
    (plus - minus) / (2.0 * h)
}

/// Directional derivative of a scalar map along `dir`.
pub fn directional_scalar<F>(f: F, u: &DVector<f64>, dir: &DVector<f64>, h: f64) -> f64
where
    F: Fn(&DVector<f64>) -> f64,
{
    (f(&(u + dir * h)) - f(&(u - dir * h))) / (2.0 * h)
}

pub fn gradient<F>(f: F, u: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    DVector::from_iterator(
        u.len(),
        (0..u.len()).map(|i| (f(&shifted(u, i, h)) - f(&shifted(u, i, -h))) / (2.0 * h)),
    )
}

/// Jacobian `J[(r, i)] = ∂F_r/∂u_i`.
pub fn jacobian<F>(f: F, u: &DVector<f64>, h: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let cols: Vec<DVector<f64>> = (0..u.len())
        .map(|i| (f(&shifted(u, i, h)) - f(&shifted(u, i, -h))) / (2.0 * h))
        .collect();
    DMatrix::from_columns(&cols)
}

/// Symmetric second-derivative matrix by the standard central stencil.
pub fn hessian<F>(f: F, u: &DVector<f64>, h: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let d = u.len();
    let f0 = f(u);
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        let fp = f(&shifted(u, i, h));
        let fm = f(&shifted(u, i, -h));
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let pp = f(&shifted(&shifted(u, i, h), j, h));
            let pm = f(&shifted(&shifted(u, i, h), j, -h));
            let mp = f(&shifted(&shifted(u, i, -h), j, h));
            let mm = f(&shifted(&shifted(u, i, -h), j, -h));
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hessian_of_quadratic_is_exact_up_to_rounding() {
        let f = |u: &DVector<f64>| 3.0 * u[0] * u[0] + u[0] * u[1] - 2.0 * u[1] * u[1];
        let h = hessian(f, &DVector::from_vec(vec![0.3, -0.7]), 1e-3);
        assert!((h[(0, 0)] - 6.0).abs() < 1e-7);
        assert!((h[(0, 1)] - 1.0).abs() < 1e-7);
        assert!((h[(1, 1)] + 4.0).abs() < 1e-7);
    }

    #[test]
    fn jacobian_of_linear_map() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -3.0, 0.5]);
        let j = jacobian(|u| &m * u, &DVector::from_vec(vec![1.0, 1.0]), 1e-4);
        assert!((j - m).amax() < 1e-10);
    }
}
