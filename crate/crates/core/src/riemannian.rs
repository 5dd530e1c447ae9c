//! Chart-based Riemannian calculus: Christoffel symbols, covariant Hessians,
//! curvature and divergence in a single coordinate patch.
//!
//! Every evaluator takes the metric in coordinates. When the chart carries an
//! analytic metric derivative it is used directly; otherwise central finite
//! differences with the chart's [`FdSteps`] stand in for it.

use crate::fd::{self, FdSteps};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

pub type MetricFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;
/// Returns `∂g/∂u_m` for every coordinate `m`.
pub type MetricDerivativeFn = dyn Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync;

/// Box or periodic-box description of valid coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl CoordinateDomain {
    pub fn unbounded(dim: usize) -> Self {
        Self {
            lower: vec![f64::NEG_INFINITY; dim],
            upper: vec![f64::INFINITY; dim],
            periodic: vec![false; dim],
        }
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let dim = lower.len();
        Self {
            lower,
            upper,
            periodic: vec![false; dim],
        }
    }

    pub fn with_periodic(mut self, axis: usize) -> Self {
        self.periodic[axis] = true;
        self
    }

    pub fn contains(&self, u: &DVector<f64>) -> bool {
        u.len() == self.lower.len()
            && u.iter().enumerate().all(|(i, &x)| {
                x.is_finite() && (self.periodic[i] || (x >= self.lower[i] && x <= self.upper[i]))
            })
    }
}

/// A single coordinate patch with its metric.
#[derive(Clone)]
pub struct Chart {
    dim: usize,
    metric: Arc<MetricFn>,
    derivative: Option<Arc<MetricDerivativeFn>>,
    domain: CoordinateDomain,
    steps: FdSteps,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("domain", &self.domain)
            .field("steps", &self.steps)
            .finish()
    }
}

impl Chart {
    pub fn new<F>(dim: usize, metric: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            metric: Arc::new(metric),
            derivative: None,
            domain: CoordinateDomain::unbounded(dim),
            steps: FdSteps::default(),
        }
    }

    /// Constant identity metric on `ℝ^dim`.
    pub fn flat(dim: usize) -> Self {
        Self::new(dim, move |_| DMatrix::identity(dim, dim))
            .with_derivative(move |_| vec![DMatrix::zeros(dim, dim); dim])
    }

    /// Pullback of the Euclidean metric through an embedding with the given Jacobian.
    pub fn from_embedding<F>(dim: usize, jacobian: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self::new(dim, move |u| {
            let j = jacobian(u);
            j.transpose() * j
        })
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn without_derivative(mut self) -> Self {
        self.derivative = None;
        self
    }

    pub fn with_domain(mut self, domain: CoordinateDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_steps(mut self, steps: FdSteps) -> Self {
        self.steps = steps;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> FdSteps {
        self.steps
    }

    pub fn domain(&self) -> &CoordinateDomain {
        &self.domain
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    fn check_point(&self, u: &DVector<f64>) -> Result<()> {
        if !self.domain.contains(u) {
            return Err(Error::OutsideDomain(format!("{:?}", u.as_slice())));
        }
        Ok(())
    }

    /// Metric at `u`, validated as symmetric positive definite.
    pub fn metric_at(&self, u: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_point(u)?;
        let g = (self.metric)(u);
        if g.shape() != (self.dim, self.dim) || g.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateMetric("malformed metric matrix".into()));
        }
        let scale = g.amax().max(1.0);
        if crate::linalg::asymmetry(&g) > 1e-12 * scale {
            return Err(Error::DegenerateMetric("metric is not symmetric".into()));
        }
        if g.clone().cholesky().is_none() {
            return Err(Error::DegenerateMetric(format!(
                "not positive definite at {:?}",
                u.as_slice()
            )));
        }
        Ok(g)
    }

    /// `∂g/∂u_m` for each `m`, analytic when available.
    pub fn metric_derivatives(&self, u: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(u)?;
        if let Some(d) = &self.derivative {
            return Ok(d(u));
        }
        let h = self.steps.first;
        Ok((0..self.dim)
            .map(|m| {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[m] += h;
                dn[m] -= h;
                ((self.metric)(&up) - (self.metric)(&dn)) / (2.0 * h)
            })
            .collect())
    }
}

/// Christoffel symbols `Γ^k_{ij}` of the Levi-Civita connection.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γ^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let a = self.idx(k, i, j);
        self.data[a] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Entrywise max difference.
    pub fn max_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `∇_X Y` correction term `Γ^k_{ij} X^i Y^j`.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.dim,
            (0..self.dim).map(|k| {
                let mut s = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        s += self.get(k, i, j) * x[i] * y[j];
                    }
                }
                s
            }),
        )
    }
}

/// Christoffel symbols from `g` and `∂g`; symmetric in the lower indices by construction.
pub fn christoffel_from_metric(g: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Result<Christoffel> {
    let dim = g.nrows();
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric("singular metric".into()))?;
    let mut gamma = Christoffel::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            for k in 0..dim {
                let mut s = 0.0;
                for l in 0..dim {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma.set(k, i, j, 0.5 * s);
                gamma.set(k, j, i, 0.5 * s);
            }
        }
    }
    Ok(gamma)
}

pub fn christoffel(chart: &Chart, u: &DVector<f64>) -> Result<Christoffel> {
    let g = chart.metric_at(u)?;
    let dg = chart.metric_derivatives(u)?;
    christoffel_from_metric(&g, &dg)
}

/// `max |∂_k g_{ij} − Γ^l_{ki} g_{lj} − Γ^l_{kj} g_{il}|`.
pub fn metric_compatibility_residual(chart: &Chart, u: &DVector<f64>) -> Result<f64> {
    let g = chart.metric_at(u)?;
    let dg = chart.metric_derivatives(u)?;
    let gamma = christoffel_from_metric(&g, &dg)?;
    let d = chart.dim();
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut r = dg[k][(i, j)];
                for l in 0..d {
                    r -= gamma.get(l, k, i) * g[(l, j)] + gamma.get(l, k, j) * g[(i, l)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// A scalar function on chart coordinates with optional analytic derivatives.
pub trait ChartFunction {
    fn value(&self, u: &DVector<f64>) -> f64;
    fn gradient(&self, _u: &DVector<f64>) -> Option<DVector<f64>> {
        None
    }
    fn hessian(&self, _u: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }
}

impl<F: Fn(&DVector<f64>) -> f64> ChartFunction for F {
    fn value(&self, u: &DVector<f64>) -> f64 {
        self(u)
    }
}

/// `∇df(∂_i, ∂_j) = ∂_i∂_j f − Γ^k_{ij} ∂_k f`.
pub fn covariant_hessian(
    chart: &Chart,
    f: &dyn ChartFunction,
    u: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let gamma = christoffel(chart, u)?;
    let steps = chart.steps();
    let grad = f
        .gradient(u)
        .unwrap_or_else(|| fd::gradient(|v| f.value(v), u, steps.first));
    let second = f
        .hessian(u)
        .unwrap_or_else(|| fd::hessian(|v| f.value(v), u, steps.second));
    let d = chart.dim();
    let mut out = second;
    for i in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += gamma.get(k, i, j) * grad[k];
            }
            out[(i, j)] -= s;
        }
    }
    Ok(out)
}

/// Nonnegative Laplace–Beltrami operator `−g^{ij} ∇df_{ij}` in the chart.
pub fn laplace_beltrami(chart: &Chart, f: &dyn ChartFunction, u: &DVector<f64>) -> Result<f64> {
    let ginv = chart
        .metric_at(u)?
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric("singular metric".into()))?;
    let hess = covariant_hessian(chart, f, u)?;
    Ok(-ginv.component_mul(&hess).sum())
}

/// Christoffel symbols, Riemann (3,1)-tensor and Ricci tensor at one point.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    dim: usize,
    pub christoffel: Christoffel,
    riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
}

impl CurvatureData {
    #[inline]
    fn idx(&self, l: usize, k: usize, i: usize, j: usize) -> usize {
        ((l * self.dim + k) * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R^l_{kij}`, defined by `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l`.
    pub fn riemann(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.riemann[self.idx(l, k, i, j)]
    }

    /// `R(X, Y)Z` with `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_iterator(
            d,
            (0..d).map(|l| {
                let mut s = 0.0;
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            s += self.riemann(l, k, i, j) * z[k] * x[i] * y[j];
                        }
                    }
                }
                s
            }),
        )
    }

    pub fn riemann_max_abs(&self) -> f64 {
        self.riemann.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Max over coordinate triples of the first-Bianchi sum.
    pub fn bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for l in 0..d {
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let s = self.riemann(l, k, i, j)
                            + self.riemann(l, i, j, k)
                            + self.riemann(l, j, k, i);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn ricci_asymmetry(&self) -> f64 {
        crate::linalg::asymmetry(&self.ricci)
    }
}

/// Riemann and Ricci tensors. `∂Γ` is taken by central differences of the
/// Christoffel symbols: with step `steps.first` when the chart has an analytic
/// metric derivative (so `∂Γ` is a first derivative), `steps.second` otherwise.
pub fn riemann_ricci(chart: &Chart, u: &DVector<f64>) -> Result<CurvatureData> {
    let steps = chart.steps();
    for (name, h) in [("first", steps.first), ("second", steps.second)] {
        if !(h >= 1e-8) {
            return Err(Error::Configuration(format!(
                "{name}-derivative step {h:e} is below 1e-8"
            )));
        }
    }
    let h = if chart.has_analytic_derivative() {
        steps.first
    } else {
        steps.second
    };
    let d = chart.dim();
    let gamma = christoffel(chart, u)?;
    let mut dgamma = Vec::with_capacity(d);
    for m in 0..d {
        let mut up = u.clone();
        let mut dn = u.clone();
        up[m] += h;
        dn[m] -= h;
        let gp = christoffel(chart, &up)?;
        let gm = christoffel(chart, &dn)?;
        let mut out = Christoffel::zeros(d);
        for a in 0..out.data.len() {
            out.data[a] = (gp.data[a] - gm.data[a]) / (2.0 * h);
        }
        dgamma.push(out);
    }
    let mut riemann = vec![0.0; d * d * d * d];
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut r = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                    for m in 0..d {
                        r += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    riemann[((l * d + k) * d + i) * d + j] = r;
                }
            }
        }
    }
    let mut ricci = DMatrix::zeros(d, d);
    for k in 0..d {
        for j in 0..d {
            let mut s = 0.0;
            for i in 0..d {
                s += riemann[((i * d + k) * d + i) * d + j];
            }
            ricci[(k, j)] = s;
        }
    }
    Ok(CurvatureData {
        dim: d,
        christoffel: gamma,
        riemann,
        ricci,
    })
}

/// `div V = ∂_i V^i + Γ^i_{ik} V^k`.
pub fn divergence<V>(chart: &Chart, field: V, u: &DVector<f64>) -> Result<f64>
where
    V: Fn(&DVector<f64>) -> DVector<f64>,
{
    let gamma = christoffel(chart, u)?;
    let d = chart.dim();
    let h = chart.steps().first;
    let v0 = field(u);
    let mut s = 0.0;
    for i in 0..d {
        let mut up = u.clone();
        let mut dn = u.clone();
        up[i] += h;
        dn[i] -= h;
        s += (field(&up)[i] - field(&dn)[i]) / (2.0 * h);
        for k in 0..d {
            s += gamma.get(i, i, k) * v0[k];
        }
    }
    Ok(s)
}

/// Round-`S²` polar chart `(θ, φ)` with `g = diag(1, sin²θ)`.
pub fn round_s2_polar(analytic: bool) -> Chart {
    let chart = Chart::new(2, |u| {
        let s = u[0].sin();
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, s * s]))
    })
    .with_domain(
        CoordinateDomain::boxed(vec![0.0, 0.0], vec![std::f64::consts::PI, 0.0]).with_periodic(1),
    );
    if analytic {
        chart.with_derivative(|u| {
            let s2 = (2.0 * u[0]).sin();
            vec![
                DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, s2])),
                DMatrix::zeros(2, 2),
            ]
        })
    } else {
        chart
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::Rng;
    use std::f64::consts::PI;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn flat_torus() -> Chart {
        Chart::new(2, |_| DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]) / 3.0).with_domain(
            CoordinateDomain::boxed(vec![0.0; 2], vec![0.0; 2])
                .with_periodic(0)
                .with_periodic(1),
        )
    }

    // Hyperspherical embedding of S³ ⊂ ℝ⁴, coordinates (ψ, θ, φ).
    fn s3_embedded() -> Chart {
        Chart::from_embedding(3, |u| {
            let (sp, cp) = u[0].sin_cos();
            let (st, ct) = u[1].sin_cos();
            let (sf, cf) = u[2].sin_cos();
            DMatrix::from_row_slice(
                4,
                3,
                &[
                    cp * st * cf, sp * ct * cf, -sp * st * sf,
                    cp * st * sf, sp * ct * sf, sp * st * cf,
                    cp * ct, -sp * st, 0.0,
                    -sp, 0.0, 0.0,
                ],
            )
        })
    }

    #[test]
    fn flat_charts_have_vanishing_christoffel() {
        let g = christoffel(&flat_torus(), &v(&[0.3, 5.0])).unwrap();
        assert_eq!(g.max_abs(), 0.0);
        let circle = Chart::new(1, |_| DMatrix::identity(1, 1));
        assert_eq!(christoffel(&circle, &v(&[1.0])).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn s2_christoffel_matches_closed_form() {
        let u = v(&[PI / 3.0, 0.4]);
        for analytic in [true, false] {
            let g = christoffel(&round_s2_polar(analytic), &u).unwrap();
            assert!((g.get(0, 1, 1) + 3f64.sqrt() / 4.0).abs() < 1e-8);
            assert!((g.get(1, 0, 1) - 1.0 / 3f64.sqrt()).abs() < 1e-8);
            assert_eq!(g.get(1, 0, 1), g.get(1, 1, 0));
        }
    }

    #[test]
    fn degenerate_metric_and_domain_errors() {
        let bad = Chart::new(2, |_| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(matches!(
            christoffel(&bad, &v(&[0.0, 0.0])),
            Err(Error::DegenerateMetric(_))
        ));
        assert!(matches!(
            christoffel(&round_s2_polar(true), &v(&[4.0, 0.0])),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn hessian_examples() {
        let u = v(&[0.2, 1.7]);
        let lin = |x: &DVector<f64>| 2.0 * x[0] - x[1];
        assert!(covariant_hessian(&flat_torus(), &lin, &u).unwrap().amax() < 1e-9);
        let c = |_: &DVector<f64>| 4.2;
        assert_eq!(covariant_hessian(&round_s2_polar(true), &c, &u).unwrap().amax(), 0.0);

        let cos_theta = |x: &DVector<f64>| x[0].cos();
        let h = covariant_hessian(&round_s2_polar(true), &cos_theta, &v(&[PI / 4.0, 0.9])).unwrap();
        assert!((h[(0, 0)] + 2f64.sqrt() / 2.0).abs() < 1e-6);
        assert!((h[(1, 1)] + 2f64.sqrt() / 4.0).abs() < 1e-6);
        assert!(h[(0, 1)].abs() < 1e-8);
    }

    #[test]
    fn curvature_examples() {
        let flat = Chart::flat(4);
        let c = riemann_ricci(&flat, &v(&[0.1, 0.2, 0.3, 0.4])).unwrap();
        assert_eq!(c.riemann_max_abs(), 0.0);
        assert_eq!(c.ricci.amax(), 0.0);

        let u = v(&[1.1, 0.3]);
        let c = riemann_ricci(&round_s2_polar(true), &u).unwrap();
        let g = round_s2_polar(true).metric_at(&u).unwrap();
        assert!((&c.ricci - g).amax() < 1e-6);

        let u = v(&[1.0, 1.2, 0.5]);
        let chart = s3_embedded();
        let c = riemann_ricci(&chart, &u).unwrap();
        let g = chart.metric_at(&u).unwrap();
        assert!((&c.ricci - g * 2.0).amax() < 1e-5, "{}", c.ricci);
        assert!(c.bianchi_residual() < 1e-5);
    }

    #[test]
    fn rejects_underflowing_second_step() {
        let chart = round_s2_polar(false).with_steps(FdSteps {
            first: 1e-4,
            second: 1e-9,
        });
        assert!(matches!(
            riemann_ricci(&chart, &v(&[1.0, 0.0])),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn divergence_examples() {
        let flat = Chart::flat(1);
        assert!(divergence(&flat, |_| v(&[3.0]), &v(&[0.5])).unwrap().abs() < 1e-12);
        assert!((divergence(&flat, |x| x.clone(), &v(&[0.5])).unwrap() - 1.0).abs() < 1e-10);
        let m = DMatrix::from_fn(4, 4, |i, j| (i as f64 + 1.0) * 0.3 - j as f64 * 0.7);
        let d = divergence(&Chart::flat(4), |x| &m * x, &v(&[0.1, -0.2, 0.3, 0.9])).unwrap();
        assert!((d - m.trace()).abs() < 1e-9);
    }

    #[test]
    fn metric_compatibility_on_random_points() {
        let mut rng = sampling::rng(7);
        let charts = [round_s2_polar(true), round_s2_polar(false), flat_torus()];
        for chart in &charts {
            for _ in 0..100 {
                let u = v(&[rng.random_range(0.01..PI - 0.01), rng.random_range(0.0..2.0 * PI)]);
                assert!(metric_compatibility_residual(chart, &u).unwrap() < 1e-6);
            }
        }
        for _ in 0..100 {
            let u = v(&[
                rng.random_range(0.01..PI - 0.01),
                rng.random_range(0.01..PI - 0.01),
                rng.random_range(0.0..2.0 * PI),
            ]);
            assert!(metric_compatibility_residual(&s3_embedded(), &u).unwrap() < 1e-6);
        }
    }

    #[test]
    fn finite_difference_christoffel_converges_quadratically() {
        let u = v(&[0.8, 0.1]);
        let exact = christoffel(&round_s2_polar(true), &u).unwrap();
        let err = |h: f64| {
            let chart = round_s2_polar(false).with_steps(FdSteps { first: h, second: 1e-3 });
            christoffel(&chart, &u).unwrap().max_diff(&exact)
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e1 / e2 >= 3.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn hessian_symmetry_on_samples() {
        let mut rng = sampling::rng(11);
        let f = |x: &DVector<f64>| x[0].sin() * (2.0 * x[1]).cos() + x[0] * x[0];
        for _ in 0..50 {
            let u = v(&[rng.random_range(0.01..PI - 0.01), rng.random_range(0.0..2.0 * PI)]);
            let h = covariant_hessian(&round_s2_polar(true), &f, &u).unwrap();
            assert!(crate::linalg::asymmetry(&h) <= 1e-8);
        }
    }
}
