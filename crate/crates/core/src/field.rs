//! Scalar functions on the ambient space `ℝ^{2n+2}` with value, gradient and
//! Hessian, plus the radial normalisation `y ↦ y/|y|` and its derivatives.

use crate::fd;
use nalgebra::{DMatrix, DVector};

pub trait AmbientFunction: Send + Sync {
    fn value(&self, y: &DVector<f64>) -> f64;
    fn gradient(&self, y: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64>;
}

/// `y ↦ yᵀ A y + c` with `A` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub matrix: DMatrix<f64>,
    pub constant: f64,
}

impl QuadraticForm {
    /// Symmetrises `matrix` before storing it.
    pub fn new(matrix: DMatrix<f64>, constant: f64) -> Self {
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Self {
            matrix: sym,
            constant,
        }
    }
}

impl AmbientFunction for QuadraticForm {
    fn value(&self, y: &DVector<f64>) -> f64 {
        y.dot(&(&self.matrix * y)) + self.constant
    }
    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.matrix * y * 2.0
    }
    fn hessian(&self, _y: &DVector<f64>) -> DMatrix<f64> {
        &self.matrix * 2.0
    }
}

/// `p = y/|y|`.
pub fn normalize(y: &DVector<f64>) -> DVector<f64> {
    y / y.norm()
}

/// `D p · a = (a − p⟨p,a⟩)/|y|`.
pub fn normalize_derivative(y: &DVector<f64>, a: &DVector<f64>) -> DVector<f64> {
    let r = y.norm();
    let p = y / r;
    (a - &p * p.dot(a)) / r
}

/// `D²p[a, c] = (3p⟨p,a⟩⟨p,c⟩ − a⟨p,c⟩ − c⟨p,a⟩ − p⟨a,c⟩)/|y|²`.
pub fn normalize_second(y: &DVector<f64>, a: &DVector<f64>, c: &DVector<f64>) -> DVector<f64> {
    let r2 = y.norm_squared();
    let p = y / r2.sqrt();
    let pa = p.dot(a);
    let pc = p.dot(c);
    (&p * (3.0 * pa * pc - a.dot(c)) - a * pc - c * pa) / r2
}

/// The r-constant extension `F(y) = f(y/|y|)` of a function on the unit sphere.
#[derive(Debug, Clone)]
pub struct RadialExtension<F> {
    pub inner: F,
}

impl<F: AmbientFunction> RadialExtension<F> {
    pub fn new(inner: F) -> Self {
        Self { inner }
    }
}

impl<F: AmbientFunction> AmbientFunction for RadialExtension<F> {
    fn value(&self, y: &DVector<f64>) -> f64 {
        self.inner.value(&normalize(y))
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        let r = y.norm();
        let p = y / r;
        let g = self.inner.gradient(&p);
        (&g - &p * p.dot(&g)) / r
    }

    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let d = y.len();
        let r = y.norm();
        let p = y / r;
        let g = self.inner.gradient(&p);
        let h = self.inner.hessian(&p);
        let dp = (DMatrix::identity(d, d) - &p * p.transpose()) / r;
        let mut out = dp.transpose() * h * &dp;
        let basis: Vec<DVector<f64>> = (0..d)
            .map(|i| {
                let mut e = DVector::zeros(d);
                e[i] = 1.0;
                e
            })
            .collect();
        for i in 0..d {
            for j in 0..=i {
                let s = g.dot(&normalize_second(y, &basis[i], &basis[j]));
                out[(i, j)] += s;
                if i != j {
                    out[(j, i)] += s;
                }
            }
        }
        out
    }
}

/// A closure with gradient and Hessian by central differences.
pub struct FdAmbient<F> {
    pub f: F,
    pub first: f64,
    pub second: f64,
}

impl<F> FdAmbient<F>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            first: 1e-5,
            second: 1e-3,
        }
    }
}

impl<F> AmbientFunction for FdAmbient<F>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
{
    fn value(&self, y: &DVector<f64>) -> f64 {
        (self.f)(y)
    }
    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        fd::gradient(&self.f, y, self.first)
    }
    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        fd::hessian(&self.f, y, self.second)
    }
}

impl<T: AmbientFunction + ?Sized> AmbientFunction for Box<T> {
    fn value(&self, y: &DVector<f64>) -> f64 {
        (**self).value(y)
    }
    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        (**self).gradient(y)
    }
    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        (**self).hessian(y)
    }
}

impl<T: AmbientFunction + ?Sized> AmbientFunction for &T {
    fn value(&self, y: &DVector<f64>) -> f64 {
        (**self).value(y)
    }
    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        (**self).gradient(y)
    }
    fn hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        (**self).hessian(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use proptest::prelude::*;

    fn sample_quadratic(seed: u64, d: usize) -> QuadraticForm {
        let mut rng = sampling::rng(seed);
        let m = DMatrix::from_fn(d, d, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
        QuadraticForm::new(m, 0.3)
    }

    proptest! {
        #[test]
        fn radial_extension_derivatives_match_finite_differences(seed in 0u64..500, scale in 0.6f64..1.8) {
            let q = sample_quadratic(seed, 4);
            let mut rng = sampling::rng(seed + 1);
            let y = sampling::unit_vector(&mut rng, 4) * scale;
            let ext = RadialExtension::new(q.clone());
            let fdr = FdAmbient::new(|z: &DVector<f64>| q.value(&normalize(z)));
            prop_assert!((ext.gradient(&y) - fdr.gradient(&y)).amax() < 1e-7);
            prop_assert!((ext.hessian(&y) - fdr.hessian(&y)).amax() < 1e-4);
        }
    }

    #[test]
    fn radial_extension_is_r_invariant() {
        let q = sample_quadratic(3, 6);
        let ext = RadialExtension::new(q);
        let mut rng = sampling::rng(5);
        let x = sampling::unit_vector(&mut rng, 6);
        assert!((ext.value(&(&x * 0.5)) - ext.value(&(&x * 2.0))).abs() < 1e-14);
        assert!(ext.gradient(&x).dot(&x).abs() < 1e-14);
    }
}
