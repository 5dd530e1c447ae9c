//! Parameterised Legendrian immersions `L^n → S^{2n+1}` with induced geometry,
//! tensor-product quadrature and the normal-bundle isomorphism χ.
//!
//! Ambient points use the real layout `(Re z, Im z)`. For the immersions
//! shipped here the induced metric is the Euclidean pullback, since the round
//! metric on the sphere is the restriction of the flat one.

use crate::linalg::{gram_schmidt, pairwise_sum};
use crate::quadrature;
use crate::riemannian::{Chart, CoordinateDomain};
use crate::sampling;
use crate::sasaki::{SasakiStructure, StandardSphere};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

pub type MapFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
pub type JacobianFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// Distance kept from the poles of polar axes when sampling random coordinates.
pub const POLE_MARGIN: f64 = 1e-2;

/// Names accepted by [`by_name`].
pub const REGISTERED: [&str; 5] = [
    "great-circle-s3",
    "geodesic-sphere-n1",
    "geodesic-sphere-n2",
    "geodesic-sphere-n3",
    "clifford-torus-s5",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRule {
    /// Periodic axis, trapezoid rule.
    Periodic,
    /// Polar angle, Gauss–Legendre rule (nodes avoid the endpoints).
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub rule: AxisRule,
    pub resolution: usize,
}

impl Axis {
    pub fn periodic(resolution: usize) -> Self {
        Self {
            lower: 0.0,
            upper: TAU,
            rule: AxisRule::Periodic,
            resolution,
        }
    }

    pub fn polar(resolution: usize) -> Self {
        Self {
            lower: 0.0,
            upper: PI,
            rule: AxisRule::GaussLegendre,
            resolution,
        }
    }

    fn rule_nodes(&self) -> Vec<(f64, f64)> {
        match self.rule {
            AxisRule::Periodic => quadrature::periodic_trapezoid(self.resolution, self.lower, self.upper),
            AxisRule::GaussLegendre => quadrature::gauss_legendre(self.resolution, self.lower, self.upper),
        }
    }
}

/// Intrinsic geometry of `L` with its induced metric, used by the mesh discretisers.
#[derive(Debug, Clone, PartialEq)]
pub enum IntrinsicModel {
    /// Closed curve of the given length.
    Circle { length: f64 },
    /// `ℝ²/(2πℤ)²` with a constant metric.
    FlatTorus { metric: [[f64; 2]; 2] },
    /// Round sphere `S^dim` of the given radius.
    RoundSphere { dim: usize, radius: f64 },
}

/// A quadrature node: chart coordinates, ambient image and the full weight
/// (rule weight times `√det g`).
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub u: DVector<f64>,
    pub x: DVector<f64>,
    pub weight: f64,
}

#[derive(Clone)]
pub struct LegendrianImmersion {
    name: String,
    sphere: StandardSphere,
    map: Arc<MapFn>,
    jacobian: Arc<JacobianFn>,
    axes: Vec<Axis>,
    intrinsic: IntrinsicModel,
    second_step: f64,
}

impl std::fmt::Debug for LegendrianImmersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LegendrianImmersion")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("axes", &self.axes)
            .field("intrinsic", &self.intrinsic)
            .finish()
    }
}

impl LegendrianImmersion {
    pub fn new<M, J>(
        name: &str,
        sphere: StandardSphere,
        axes: Vec<Axis>,
        intrinsic: IntrinsicModel,
        map: M,
        jacobian: J,
    ) -> Self
    where
        M: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        J: Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        assert_eq!(axes.len(), sphere.n(), "one chart axis per intrinsic dimension");
        Self {
            name: name.to_string(),
            sphere,
            map: Arc::new(map),
            jacobian: Arc::new(jacobian),
            axes,
            intrinsic,
            second_step: 1e-4,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.sphere.n()
    }

    pub fn sphere(&self) -> &StandardSphere {
        &self.sphere
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn intrinsic(&self) -> &IntrinsicModel {
        &self.intrinsic
    }

    pub fn resolution(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.resolution).collect()
    }

    /// Replaces the per-axis quadrature resolution.
    pub fn with_resolution(mut self, resolution: &[usize]) -> Result<Self> {
        if resolution.len() != self.axes.len() || resolution.contains(&0) {
            return Err(Error::Configuration(format!(
                "{} needs {} positive resolutions, got {:?}",
                self.name,
                self.axes.len(),
                resolution
            )));
        }
        for (a, &r) in self.axes.iter_mut().zip(resolution) {
            a.resolution = r;
        }
        Ok(self)
    }

    pub fn point(&self, u: &DVector<f64>) -> DVector<f64> {
        (self.map)(u)
    }

    /// `(2n+2)×n` Jacobian; column `i` is `∂_i` of the map.
    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        (self.jacobian)(u)
    }

    /// `∂_a∂_b` of the map, by central differences of the analytic Jacobian.
    pub fn second_derivatives(&self, u: &DVector<f64>) -> Vec<Vec<DVector<f64>>> {
        let n = self.n();
        let h = self.second_step;
        let dj: Vec<DMatrix<f64>> = (0..n)
            .map(|a| {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[a] += h;
                dn[a] -= h;
                (self.jacobian(&up) - self.jacobian(&dn)) / (2.0 * h)
            })
            .collect();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| (dj[a].column(b) + dj[b].column(a)) * 0.5)
                    .collect()
            })
            .collect()
    }

    pub fn induced_metric(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let j = self.jacobian(u);
        j.transpose() * j
    }

    pub fn volume_element(&self, u: &DVector<f64>) -> Result<f64> {
        let det = self.induced_metric(u).determinant();
        if !(det > 0.0) {
            return Err(Error::DegenerateMetric(format!(
                "induced metric determinant {det:e} at {:?}",
                u.as_slice()
            )));
        }
        Ok(det.sqrt())
    }

    /// Tensor-product quadrature nodes in lexicographic axis order.
    pub fn nodes(&self) -> Result<Vec<Node>> {
        let rules: Vec<Vec<(f64, f64)>> = self.axes.iter().map(Axis::rule_nodes).collect();
        let total: usize = rules.iter().map(Vec::len).product();
        let n = self.n();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let u = DVector::from_iterator(n, (0..n).map(|a| rules[a][idx[a]].0));
            let w: f64 = (0..n).map(|a| rules[a][idx[a]].1).product();
            let weight = w * self.volume_element(&u)?;
            out.push(Node {
                x: self.point(&u),
                u,
                weight,
            });
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < rules[a].len() {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(out)
    }

    /// `∫_L f dv` over the quadrature nodes, summed pairwise in node order.
    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Node) -> f64,
    {
        let nodes = self.nodes()?;
        integrate_nodes(&nodes, f)
    }

    pub fn volume(&self) -> Result<f64> {
        self.integrate(|_| 1.0)
    }

    /// `max_i |η(∂_i)|` at `u`.
    pub fn legendrian_residual(&self, u: &DVector<f64>) -> f64 {
        let x = self.point(u);
        let j = self.jacobian(u);
        (0..self.n())
            .map(|i| self.sphere.eta(&x, &j.column(i).clone_owned()).abs())
            .fold(0.0, f64::max)
    }

    /// Seeded uniform coordinates; polar axes keep [`POLE_MARGIN`] from the poles.
    pub fn sample_coordinates(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = sampling::rng(seed);
        (0..count)
            .map(|_| {
                DVector::from_iterator(
                    self.n(),
                    self.axes.iter().map(|a| {
                        let (lo, hi) = match a.rule {
                            AxisRule::Periodic => (a.lower, a.upper),
                            AxisRule::GaussLegendre => (a.lower + POLE_MARGIN, a.upper - POLE_MARGIN),
                        };
                        rng.random_range(lo..hi)
                    }),
                )
            })
            .collect()
    }

    /// The induced metric as a riemannian-core chart (derivatives by finite differences).
    pub fn induced_chart(&self) -> Chart {
        let jac = self.jacobian.clone();
        let mut domain = CoordinateDomain::boxed(
            self.axes.iter().map(|a| a.lower).collect(),
            self.axes.iter().map(|a| a.upper).collect(),
        );
        for (i, a) in self.axes.iter().enumerate() {
            if a.rule == AxisRule::Periodic {
                domain = domain.with_periodic(i);
            }
        }
        Chart::from_embedding(self.n(), move |u| jac(u)).with_domain(domain)
    }

    /// Orthonormal frame, second fundamental form and mean curvature at `u`.
    pub fn shape_data(&self, u: &DVector<f64>) -> Result<ShapeData> {
        self.shape_data_mixed(u, &DMatrix::identity(self.n(), self.n()))
    }

    /// As [`shape_data`](Self::shape_data) with the Jacobian columns replaced by
    /// `jacobian · mixing` before Gram–Schmidt.
    pub fn shape_data_mixed(&self, u: &DVector<f64>, mixing: &DMatrix<f64>) -> Result<ShapeData> {
        let n = self.n();
        let x = self.point(u);
        let cols = self.jacobian(u) * mixing;
        let (frame, c) = gram_schmidt(&cols)?;
        let k = mixing * c;
        let d2 = self.second_derivatives(u);
        let normal = |v: &DVector<f64>| {
            let mut out = v - &x * x.dot(v);
            for e in frame.column_iter() {
                out -= e * e.dot(v);
            }
            out
        };
        let dim = x.len();
        let mut second = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = DVector::zeros(dim);
                for a in 0..n {
                    for b in 0..n {
                        acc += &d2[a][b] * (k[(a, i)] * k[(b, j)]);
                    }
                }
                second.push(normal(&acc));
            }
        }
        let mut mean = DVector::zeros(dim);
        for i in 0..n {
            mean += &second[i * n + i];
        }
        Ok(ShapeData {
            frame,
            second_fundamental: second,
            mean_curvature: mean,
        })
    }

    /// Splits `field(x)` (projected to `T_xM`) into its tangent and normal parts
    /// along `L` and returns `χ` of the normal part.
    pub fn chi_decompose<F>(&self, field: F, u: &DVector<f64>) -> Result<ChiDecomposition>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let x = self.point(u);
        let jac = self.jacobian(u);
        let (frame, _) = gram_schmidt(&jac)?;
        let v = self.sphere.tangent_projection(&x, &field(&x));
        let mut tangent = DVector::zeros(x.len());
        for e in frame.column_iter() {
            tangent += e * e.dot(&v);
        }
        let normal = &v - &tangent;
        let eta = self.sphere.eta(&x, &normal);
        let phi = self.sphere.phi(&x, &normal);
        // ι_V dη(∂_j) = g(ΦV, ∂_j)
        let covector = DVector::from_iterator(
            self.n(),
            jac.column_iter()
                .map(|d| -0.5 * self.sphere.metric(&x, &phi, &d.clone_owned())),
        );
        Ok(ChiDecomposition {
            tangent,
            normal,
            eta,
            covector,
        })
    }

    /// Inverse of χ: the normal vector `aξ + Φw` with `w = 2 g^{jk} c_j ∂_k`.
    pub fn chi_reconstruct(&self, u: &DVector<f64>, eta: f64, covector: &DVector<f64>) -> Result<DVector<f64>> {
        let x = self.point(u);
        let jac = self.jacobian(u);
        let g = jac.transpose() * &jac;
        let ginv = g
            .try_inverse()
            .ok_or_else(|| Error::DegenerateImmersion("singular induced metric".into()))?;
        let w = &jac * (ginv * covector * 2.0);
        Ok(self.sphere.reeb(&x) * eta + self.sphere.phi(&x, &w))
    }
}

/// Pairwise sum of `weight · f` over `nodes`; non-finite values are rejected.
pub fn integrate_nodes<F>(nodes: &[Node], f: F) -> Result<f64>
where
    F: Fn(&Node) -> f64,
{
    let mut terms = Vec::with_capacity(nodes.len());
    for node in nodes {
        let v = f(node);
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("integrand at {:?}", node.u.as_slice())));
        }
        terms.push(v * node.weight);
    }
    Ok(pairwise_sum(&terms))
}

/// Frame, second fundamental form and mean curvature at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeData {
    /// Columns are the orthonormal frame `e_i` in ambient coordinates.
    pub frame: DMatrix<f64>,
    /// `II(e_i, e_j)` stored at `i·n + j`.
    pub second_fundamental: Vec<DVector<f64>>,
    pub mean_curvature: DVector<f64>,
}

impl ShapeData {
    pub fn n(&self) -> usize {
        self.frame.ncols()
    }

    pub fn second(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.second_fundamental[i * self.n() + j]
    }

    pub fn mean_curvature_norm(&self) -> f64 {
        self.mean_curvature.norm()
    }

    /// Largest `|II(e_i, e_j)|`.
    pub fn second_fundamental_max(&self) -> f64 {
        self.second_fundamental.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.n();
        (self.frame.transpose() * &self.frame - DMatrix::identity(n, n)).amax()
    }

    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                r = r.max((self.second(i, j) - self.second(j, i)).amax());
            }
        }
        r
    }
}

/// Output of [`LegendrianImmersion::chi_decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChiDecomposition {
    pub tangent: DVector<f64>,
    pub normal: DVector<f64>,
    /// `η(X₂)`.
    pub eta: f64,
    /// `−½ ι_{X₂}dη` evaluated on the chart vectors `∂_j`.
    pub covector: DVector<f64>,
}

fn embed_real(n: usize, a: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(2 * n + 2);
    v.rows_mut(0, n + 1).copy_from_slice(a);
    v
}

/// The real unit sphere `S^n ⊂ ℝ^{n+1} ⊂ ℂ^{n+1}`, totally geodesic and Legendrian.
pub fn geodesic_sphere(n: usize) -> Result<LegendrianImmersion> {
    let sphere = StandardSphere::new(n.max(1));
    let name = format!("geodesic-sphere-n{n}");
    match n {
        1 => Ok(LegendrianImmersion::new(
            &name,
            sphere,
            vec![Axis::periodic(64)],
            IntrinsicModel::Circle { length: TAU },
            |u| embed_real(1, &[u[0].cos(), u[0].sin()]),
            |u| DMatrix::from_columns(&[embed_real(1, &[-u[0].sin(), u[0].cos()])]),
        )),
        2 => Ok(LegendrianImmersion::new(
            &name,
            sphere,
            vec![Axis::polar(24), Axis::periodic(48)],
            IntrinsicModel::RoundSphere { dim: 2, radius: 1.0 },
            |u| {
                let (st, ct) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                embed_real(2, &[st * cp, st * sp, ct])
            },
            |u| {
                let (st, ct) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                DMatrix::from_columns(&[
                    embed_real(2, &[ct * cp, ct * sp, -st]),
                    embed_real(2, &[-st * sp, st * cp, 0.0]),
                ])
            },
        )),
        3 => Ok(LegendrianImmersion::new(
            &name,
            sphere,
            vec![Axis::polar(12), Axis::polar(12), Axis::periodic(24)],
            IntrinsicModel::RoundSphere { dim: 3, radius: 1.0 },
            |u| {
                let (s1, c1) = u[0].sin_cos();
                let (s2, c2) = u[1].sin_cos();
                let (sp, cp) = u[2].sin_cos();
                embed_real(3, &[c1, s1 * c2, s1 * s2 * cp, s1 * s2 * sp])
            },
            |u| {
                let (s1, c1) = u[0].sin_cos();
                let (s2, c2) = u[1].sin_cos();
                let (sp, cp) = u[2].sin_cos();
                DMatrix::from_columns(&[
                    embed_real(3, &[-s1, c1 * c2, c1 * s2 * cp, c1 * s2 * sp]),
                    embed_real(3, &[0.0, -s1 * s2, s1 * c2 * cp, s1 * c2 * sp]),
                    embed_real(3, &[0.0, 0.0, -s1 * s2 * sp, s1 * s2 * cp]),
                ])
            },
        )),
        _ => Err(Error::Unsupported(format!("geodesic sphere with n = {n}"))),
    }
}

/// The Legendrian great circle `t ↦ (cos t, sin t)` in `S³`.
pub fn great_circle() -> LegendrianImmersion {
    let mut c = geodesic_sphere(1).expect("n = 1 is supported");
    c.name = "great-circle-s3".into();
    c
}

/// The minimal Legendrian torus `(u,v) ↦ (e^{iu}, e^{iv}, e^{−i(u+v)})/√3` in `S⁵`.
pub fn clifford_torus() -> LegendrianImmersion {
    let s = 1.0 / 3f64.sqrt();
    let point = move |u: &DVector<f64>| {
        let (a, b, c) = (u[0], u[1], u[0] + u[1]);
        DVector::from_vec(vec![
            s * a.cos(),
            s * b.cos(),
            s * c.cos(),
            s * a.sin(),
            s * b.sin(),
            -s * c.sin(),
        ])
    };
    let jac = move |u: &DVector<f64>| {
        let (a, b, c) = (u[0], u[1], u[0] + u[1]);
        DMatrix::from_columns(&[
            DVector::from_vec(vec![-s * a.sin(), 0.0, -s * c.sin(), s * a.cos(), 0.0, -s * c.cos()]),
            DVector::from_vec(vec![0.0, -s * b.sin(), -s * c.sin(), 0.0, s * b.cos(), -s * c.cos()]),
        ])
    };
    LegendrianImmersion::new(
        "clifford-torus-s5",
        StandardSphere::new(2),
        vec![Axis::periodic(32), Axis::periodic(32)],
        IntrinsicModel::FlatTorus {
            metric: [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]],
        },
        point,
        jac,
    )
}

/// A closed Legendrian curve `t ↦ (√(2/3) e^{it}, √(1/3) e^{−2it})` in `S³` that
/// is not a geodesic. Used as a non-minimal control.
pub fn legendrian_knot() -> LegendrianImmersion {
    let c1 = (2.0f64 / 3.0).sqrt();
    let c2 = (1.0f64 / 3.0).sqrt();
    LegendrianImmersion::new(
        "legendrian-knot-s3",
        StandardSphere::new(1),
        vec![Axis::periodic(128)],
        IntrinsicModel::Circle {
            length: TAU * 2f64.sqrt(),
        },
        move |u| {
            let t = u[0];
            DVector::from_vec(vec![
                c1 * t.cos(),
                c2 * (2.0 * t).cos(),
                c1 * t.sin(),
                -c2 * (2.0 * t).sin(),
            ])
        },
        move |u| {
            let t = u[0];
            DMatrix::from_columns(&[DVector::from_vec(vec![
                -c1 * t.sin(),
                -2.0 * c2 * (2.0 * t).sin(),
                c1 * t.cos(),
                -2.0 * c2 * (2.0 * t).cos(),
            ])])
        },
    )
}

/// Shipped examples of intrinsic dimension `n`.
pub fn builtin_examples(n: usize) -> Result<Vec<LegendrianImmersion>> {
    match n {
        1 => Ok(vec![great_circle(), geodesic_sphere(1)?]),
        2 => Ok(vec![geodesic_sphere(2)?, clifford_torus()]),
        3 => Ok(vec![geodesic_sphere(3)?]),
        _ => Err(Error::Unsupported(format!("builtin examples for n = {n}"))),
    }
}

/// Every registered immersion, in [`REGISTERED`] order.
pub fn all_builtin() -> Vec<LegendrianImmersion> {
    REGISTERED
        .iter()
        .map(|name| by_name(name).expect("registered names resolve"))
        .collect()
}

pub fn by_name(name: &str) -> Result<LegendrianImmersion> {
    match name {
        "great-circle-s3" => Ok(great_circle()),
        "geodesic-sphere-n1" => geodesic_sphere(1),
        "geodesic-sphere-n2" => geodesic_sphere(2),
        "geodesic-sphere-n3" => geodesic_sphere(3),
        "clifford-torus-s5" => Ok(clifford_torus()),
        _ => Err(Error::Configuration(format!("unknown immersion '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd;
    use crate::sasaki::complex_structure;

    fn random_skew_hermitian(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = sampling::rng(seed);
        let m = n + 1;
        let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
        let b = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
        let skew = (&a - a.transpose()) * 0.5;
        let sym = (&b + b.transpose()) * 0.5;
        let mut u = DMatrix::zeros(2 * m, 2 * m);
        u.view_mut((0, 0), (m, m)).copy_from(&skew);
        u.view_mut((m, m), (m, m)).copy_from(&skew);
        u.view_mut((0, m), (m, m)).copy_from(&(-&sym));
        u.view_mut((m, 0), (m, m)).copy_from(&sym);
        u
    }

    fn all_with_knot() -> Vec<LegendrianImmersion> {
        let mut v = all_builtin();
        v.push(legendrian_knot());
        v
    }

    #[test]
    fn jacobians_match_finite_differences_of_the_maps() {
        for l in all_with_knot() {
            for u in l.sample_coordinates(10, 1) {
                let fd = fd::jacobian(|v: &DVector<f64>| l.point(v), &u, 1e-5);
                assert!((fd - l.jacobian(&u)).amax() < 1e-8, "{}", l.name());
            }
        }
    }

    #[test]
    fn images_lie_on_the_sphere_and_are_legendrian() {
        for l in all_with_knot() {
            for node in l.nodes().unwrap() {
                assert!((node.x.norm() - 1.0).abs() < 1e-14);
                assert!(l.legendrian_residual(&node.u) <= 1e-8, "{}", l.name());
            }
        }
    }

    #[test]
    fn geodesic_sphere_residual_is_exactly_zero() {
        for n in 1..=3 {
            let l = geodesic_sphere(n).unwrap();
            for u in l.sample_coordinates(20, 2) {
                assert_eq!(l.legendrian_residual(&u), 0.0);
            }
        }
    }

    #[test]
    fn torus_origin_point_and_metric() {
        let l = clifford_torus();
        let u = DVector::from_vec(vec![0.0, 0.0]);
        let s = 1.0 / 3f64.sqrt();
        let expected = DVector::from_vec(vec![s, s, s, 0.0, 0.0, 0.0]);
        assert!((l.point(&u) - expected).amax() < 1e-15);
        let g = l.induced_metric(&u);
        let target = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]) / 3.0;
        assert!((g - target).amax() < 1e-15);
    }

    #[test]
    fn great_circle_metric_and_length() {
        let l = great_circle();
        for u in l.sample_coordinates(10, 3) {
            assert!((l.induced_metric(&u)[(0, 0)] - 1.0).abs() < 1e-15);
        }
        assert!((l.volume().unwrap() - TAU).abs() < 1e-10);
    }

    #[test]
    fn torus_area() {
        let area = clifford_torus().volume().unwrap();
        assert!((area - TAU * TAU / 3f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn sphere_volumes() {
        let s2 = geodesic_sphere(2).unwrap().volume().unwrap();
        assert!((s2 - 4.0 * PI).abs() < 1e-10);
        let s3 = geodesic_sphere(3).unwrap().volume().unwrap();
        assert!((s3 - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn quadrature_converges_under_doubling() {
        for l in [great_circle(), clifford_torus(), geodesic_sphere(2).unwrap()] {
            let base = l.resolution();
            let v1 = l.volume().unwrap();
            let doubled: Vec<usize> = base.iter().map(|r| 2 * r).collect();
            let v2 = l.clone().with_resolution(&doubled).unwrap().volume().unwrap();
            assert!((v1 - v2).abs() <= 1e-8, "{}: {v1} vs {v2}", l.name());
        }
    }

    #[test]
    fn resolution_must_match_the_axes() {
        assert!(matches!(
            clifford_torus().with_resolution(&[8]),
            Err(Error::Configuration(_))
        ));
        assert!(matches!(great_circle().with_resolution(&[0]), Err(Error::Configuration(_))));
    }

    #[test]
    fn non_finite_integrand_is_an_evaluation_error() {
        let r = great_circle().integrate(|node| if node.u[0] > 1.0 { f64::NAN } else { 1.0 });
        assert!(matches!(r, Err(Error::Evaluation(_))));
    }

    #[test]
    fn geodesic_spheres_are_totally_geodesic() {
        for n in 1..=3 {
            let l = geodesic_sphere(n).unwrap();
            for u in l.sample_coordinates(30, 4) {
                let s = l.shape_data(&u).unwrap();
                assert!(s.second_fundamental_max() <= 1e-6);
                assert!(s.mean_curvature_norm() <= 1e-6);
            }
        }
    }

    #[test]
    fn great_circle_is_a_geodesic() {
        let l = great_circle();
        for u in l.sample_coordinates(20, 5) {
            assert!(l.shape_data(&u).unwrap().mean_curvature_norm() <= 1e-8);
        }
    }

    #[test]
    fn torus_is_minimal_but_not_totally_geodesic() {
        let l = clifford_torus();
        for u in l.sample_coordinates(100, 6) {
            let s = l.shape_data(&u).unwrap();
            assert!(s.mean_curvature_norm() <= 1e-6);
            assert!(s.second_fundamental_max() >= 0.1);
            assert!(s.orthonormality_residual() <= 1e-10);
            assert!(s.symmetry_residual() <= 1e-8);
        }
    }

    #[test]
    fn knot_is_not_minimal() {
        let l = legendrian_knot();
        let u = DVector::from_vec(vec![0.3]);
        assert!(l.shape_data(&u).unwrap().mean_curvature_norm() > 0.1);
    }

    #[test]
    fn mean_curvature_is_frame_invariant() {
        let l = clifford_torus();
        let mut rng = sampling::rng(7);
        for u in l.sample_coordinates(20, 8) {
            let angle: f64 = rng.random_range(0.0..TAU);
            let q = DMatrix::from_row_slice(2, 2, &[angle.cos(), -angle.sin(), angle.sin(), angle.cos()]);
            let a = l.shape_data(&u).unwrap();
            let b = l.shape_data_mixed(&u, &q).unwrap();
            assert!((a.mean_curvature_norm() - b.mean_curvature_norm()).abs() <= 1e-8);
            let sa: f64 = a.second_fundamental.iter().map(|v| v.norm_squared()).sum();
            let sb: f64 = b.second_fundamental.iter().map(|v| v.norm_squared()).sum();
            assert!((sa - sb).abs() <= 1e-8);
        }
    }

    #[test]
    fn degenerate_jacobian_is_rejected() {
        let l = geodesic_sphere(2).unwrap();
        let pole = DVector::from_vec(vec![0.0, 0.3]);
        assert!(matches!(l.shape_data(&pole), Err(Error::DegenerateImmersion(_))));
    }

    #[test]
    fn induced_chart_matches_pullback() {
        let l = clifford_torus();
        let chart = l.induced_chart();
        let u = DVector::from_vec(vec![0.4, 5.9]);
        assert!((chart.metric_at(&u).unwrap() - l.induced_metric(&u)).amax() < 1e-15);
    }

    #[test]
    fn real_skew_fields_are_tangent_to_geodesic_spheres() {
        for n in 1..=3 {
            let l = geodesic_sphere(n).unwrap();
            let mut rng = sampling::rng(9);
            let a = DMatrix::from_fn(n + 1, n + 1, |_, _| rng.random_range(-1.0..1.0));
            let skew = (&a - a.transpose()) * 0.5;
            let mut u = DMatrix::zeros(2 * n + 2, 2 * n + 2);
            u.view_mut((0, 0), (n + 1, n + 1)).copy_from(&skew);
            u.view_mut((n + 1, n + 1), (n + 1, n + 1)).copy_from(&skew);
            for c in l.sample_coordinates(20, 10) {
                let chi = l.chi_decompose(|x| &u * x, &c).unwrap();
                assert!(chi.normal.amax() <= 1e-10);
            }
        }
    }

    #[test]
    fn reeb_field_is_normal_with_unit_eta() {
        for n in 1..=3 {
            let l = geodesic_sphere(n).unwrap();
            let j = complex_structure(n);
            for c in l.sample_coordinates(20, 11) {
                let chi = l.chi_decompose(|x| &j * x, &c).unwrap();
                assert!(chi.tangent.amax() <= 1e-10);
                assert!((chi.eta - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn zero_field_has_zero_decomposition() {
        let l = clifford_torus();
        let c = DVector::from_vec(vec![1.0, 2.0]);
        let chi = l.chi_decompose(|x| DVector::zeros(x.len()), &c).unwrap();
        assert_eq!(chi.tangent.amax(), 0.0);
        assert_eq!(chi.normal.amax(), 0.0);
        assert_eq!(chi.eta, 0.0);
        assert_eq!(chi.covector.amax(), 0.0);
    }

    #[test]
    fn chi_reconstruction_recovers_the_normal_part() {
        for l in all_with_knot() {
            let u_mat = random_skew_hermitian(l.n(), 12);
            for c in l.sample_coordinates(25, 13) {
                let chi = l.chi_decompose(|x| &u_mat * x, &c).unwrap();
                let back = l.chi_reconstruct(&c, chi.eta, &chi.covector).unwrap();
                assert!((back - &chi.normal).amax() <= 1e-8, "{}", l.name());
            }
        }
    }

    #[test]
    fn registry_resolves_names() {
        for name in REGISTERED {
            assert_eq!(by_name(name).unwrap().name(), name);
        }
        assert!(matches!(by_name("nope"), Err(Error::Configuration(_))));
        assert!(matches!(builtin_examples(4), Err(Error::Unsupported(_))));
        assert_eq!(builtin_examples(2).unwrap().len(), 2);
    }
}
