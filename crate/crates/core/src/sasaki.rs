//! Sasakian structures in embedding coordinates, the standard sphere
//! `S^{2n+1} ⊂ ℂ^{n+1}`, its Kähler cone, and residual checks of the defining
//! axioms and of the η-Einstein condition.
//!
//! Ambient coordinates are `y = (a, b) ∈ ℝ^{2n+2}` with `z = a + i b`, so the
//! complex structure is `J(a, b) = (−b, a)`.
//!
//! Exterior derivatives of 1-forms use `dη(X,Y) = ½(Xη(Y) − Yη(X) − η([X,Y]))`,
//! which is the normalisation under which `dη = g(Φ·,·)` holds on the round
//! sphere. The torsion axiom is evaluated in the equivalent unnormalised form
//! `N_Φ + 2 dη ⊗ ξ = 0`.

use crate::fd;
use crate::field::{normalize, normalize_derivative, normalize_second};
use crate::riemannian::{self, Chart, CoordinateDomain};
use crate::sampling;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Matrix of multiplication by `i` on `ℂ^{n+1} ≅ ℝ^{2n+2}`.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    let m = n + 1;
    let mut j = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        j[(k, m + k)] = -1.0;
        j[(m + k, k)] = 1.0;
    }
    j
}

/// Evaluators `(η, ξ, Φ, g)` of a Sasakian manifold embedded in `ℝ^{2n+2}`.
///
/// Points passed to the evaluators lie on the manifold; [`SasakiStructure::project`]
/// maps nearby ambient points onto it so the defaults below can differentiate
/// along extended fields.
pub trait SasakiStructure: Send + Sync {
    fn n(&self) -> usize;
    fn embed_dim(&self) -> usize {
        2 * self.n() + 2
    }
    fn eta(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64;
    fn reeb(&self, x: &DVector<f64>) -> DVector<f64>;
    fn phi(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64>;
    fn metric(&self, x: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64;
    fn einstein_constant(&self) -> f64;
    fn project(&self, y: &DVector<f64>) -> DVector<f64>;
    fn tangent_projection(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64>;
    fn manifold_residual(&self, x: &DVector<f64>) -> f64;
    fn tangency_residual(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64;
    /// Coordinate chart around `x` whose coordinate vectors at the origin are `basis`.
    fn local_chart(&self, x: &DVector<f64>) -> Result<LocalChart>;

    fn fd_step(&self) -> f64 {
        1e-5
    }

    /// `dη(v, w)` via extended fields and a finite-difference Lie bracket.
    fn d_eta(&self, x: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let h = self.fd_step();
        let ext = |a: &DVector<f64>| {
            let a = a.clone();
            move |y: &DVector<f64>| self.tangent_projection(&self.project(y), &a)
        };
        let vf = ext(v);
        let wf = ext(w);
        let eta_w = |y: &DVector<f64>| self.eta(&self.project(y), &wf(y));
        let eta_v = |y: &DVector<f64>| self.eta(&self.project(y), &vf(y));
        let v_eta_w = fd::directional_scalar(eta_w, x, v, h);
        let w_eta_v = fd::directional_scalar(eta_v, x, w, h);
        let bracket = lie_bracket(&vf, &wf, x, h);
        0.5 * (v_eta_w - w_eta_v - self.eta(x, &bracket))
    }

    /// Nijenhuis torsion `Φ²[X,Y] + [ΦX,ΦY] − Φ[ΦX,Y] − Φ[X,ΦY]`.
    fn nijenhuis(&self, x: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let h = self.fd_step();
        let ext = |a: &DVector<f64>| {
            let a = a.clone();
            move |y: &DVector<f64>| self.tangent_projection(&self.project(y), &a)
        };
        let vf = ext(v);
        let wf = ext(w);
        let phi_v = |y: &DVector<f64>| self.phi(&self.project(y), &vf(y));
        let phi_w = |y: &DVector<f64>| self.phi(&self.project(y), &wf(y));
        let vw = lie_bracket(&vf, &wf, x, h);
        let pp = lie_bracket(&phi_v, &phi_w, x, h);
        let pv_w = lie_bracket(&phi_v, &wf, x, h);
        let v_pw = lie_bracket(&vf, &phi_w, x, h);
        self.phi(x, &self.phi(x, &vw)) + pp - self.phi(x, &pv_w) - self.phi(x, &v_pw)
    }
}

/// `[X, Y] = DY·X − DX·Y` at `x`.
pub fn lie_bracket(
    xf: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    yf: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    let xv = xf(x);
    let yv = yf(x);
    fd::directional(yf, x, &xv, h) - fd::directional(xf, x, &yv, h)
}

/// Chart around a point together with the ambient images of its coordinate
/// vectors at the origin.
#[derive(Debug, Clone)]
pub struct LocalChart {
    pub chart: Chart,
    pub basis: Vec<DVector<f64>>,
}

/// Orthonormal basis of the complement of `leading[0]`: the remaining leading
/// vectors (assumed orthonormal) followed by Gram–Schmidt of the standard basis
/// in index order.
pub fn orthonormal_complement(leading: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let d = leading[0].len();
    let mut frame: Vec<DVector<f64>> = leading.iter().map(|v| v / v.norm()).collect();
    for i in 0..d {
        if frame.len() == d {
            break;
        }
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        for _ in 0..2 {
            for e in &frame {
                let p = e.dot(&v);
                v -= e * p;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            frame.push(v / norm);
        }
    }
    frame.remove(0);
    frame
}

/// The round sphere `S^{2n+1} ⊂ ℂ^{n+1}` with `ξ_x = Jx`, `η_x(v) = ⟨Jx, v⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardSphere {
    n: usize,
    j: DMatrix<f64>,
}

impl StandardSphere {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "sphere dimension parameter must be positive");
        Self {
            n,
            j: complex_structure(n),
        }
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn apply_j(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.j * v
    }
}

impl SasakiStructure for StandardSphere {
    fn n(&self) -> usize {
        self.n
    }
    fn eta(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.apply_j(x).dot(v)
    }
    fn reeb(&self, x: &DVector<f64>) -> DVector<f64> {
        self.apply_j(x)
    }
    fn phi(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let jv = self.apply_j(v);
        let c = jv.dot(x);
        jv - x * c
    }
    fn metric(&self, _x: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        v.dot(w)
    }
    fn einstein_constant(&self) -> f64 {
        2.0 * self.n as f64
    }
    fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        normalize(y)
    }
    fn tangent_projection(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        v - x * x.dot(v)
    }
    fn manifold_residual(&self, x: &DVector<f64>) -> f64 {
        (x.norm() - 1.0).abs()
    }
    fn tangency_residual(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        x.dot(v).abs()
    }

    fn local_chart(&self, x: &DVector<f64>) -> Result<LocalChart> {
        if self.manifold_residual(x) > 1e-8 {
            return Err(Error::InvalidPoint(format!(
                "|x| − 1 = {:e}",
                self.manifold_residual(x)
            )));
        }
        let x = normalize(x);
        // first coordinate vector is ξ; the rest span ker η
        let basis = orthonormal_complement(&[x.clone(), self.reeb(&x)]);
        let dim = basis.len();
        let center = x.clone();
        let b = basis.clone();
        let at = move |u: &DVector<f64>| {
            let mut y = center.clone();
            for (a, t) in b.iter().enumerate() {
                y += t * u[a];
            }
            y
        };
        let at_metric = at.clone();
        let b_metric = basis.clone();
        let b_deriv = basis.clone();
        let chart = Chart::new(dim, move |u| {
            let y = at_metric(u);
            let cols: Vec<DVector<f64>> = b_metric.iter().map(|t| normalize_derivative(&y, t)).collect();
            let jac = DMatrix::from_columns(&cols);
            jac.transpose() * jac
        })
        .with_derivative(move |u| {
            let y = at(u);
            let cols: Vec<DVector<f64>> = b_deriv.iter().map(|t| normalize_derivative(&y, t)).collect();
            (0..dim)
                .map(|c| {
                    DMatrix::from_fn(dim, dim, |a, bb| {
                        normalize_second(&y, &b_deriv[c], &b_deriv[a]).dot(&cols[bb])
                            + cols[a].dot(&normalize_second(&y, &b_deriv[c], &b_deriv[bb]))
                    })
                })
                .collect()
        })
        .with_domain(CoordinateDomain::boxed(vec![-0.5; dim], vec![0.5; dim]));
        Ok(LocalChart { chart, basis })
    }
}

/// One sample `(x, v, w)` with `x ∈ M` and `v, w ∈ T_xM`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomSample {
    pub point: DVector<f64>,
    pub v: DVector<f64>,
    pub w: DVector<f64>,
}

/// Seeded random points and tangent vectors on `S`.
pub fn axiom_samples(s: &dyn SasakiStructure, count: usize, seed: u64) -> Vec<AxiomSample> {
    let mut rng = sampling::rng(seed);
    let d = s.embed_dim();
    (0..count)
        .map(|_| {
            let x = s.project(&sampling::unit_vector(&mut rng, d));
            let v = s.tangent_projection(&x, &sampling::uniform_vector(&mut rng, d));
            let w = s.tangent_projection(&x, &sampling::uniform_vector(&mut rng, d));
            AxiomSample { point: x, v, w }
        })
        .collect()
}

/// Max residual of each defining axiom over a sample set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    /// `|η(ξ) − 1|`
    pub eta_of_reeb: f64,
    /// `|dη(ξ, v)|`
    pub reeb_contraction: f64,
    /// `‖Φ²v + v − η(v)ξ‖`
    pub phi_square: f64,
    /// `|g(Φv,Φw) − g(v,w) + η(v)η(w)|`
    pub metric_compatibility: f64,
    /// `|dη(v,w) − g(Φv,w)|`
    pub contact_metric: f64,
    /// `‖N_Φ(v,w) + 2dη(v,w)ξ‖`
    pub normality: f64,
    pub samples: usize,
}

impl AxiomReport {
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("eta_of_reeb", self.eta_of_reeb),
            ("reeb_contraction", self.reeb_contraction),
            ("phi_square", self.phi_square),
            ("metric_compatibility", self.metric_compatibility),
            ("contact_metric", self.contact_metric),
            ("normality", self.normality),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, (_, v)| m.max(*v))
    }
}

fn check_sample(s: &dyn SasakiStructure, sample: &AxiomSample) -> Result<()> {
    if s.manifold_residual(&sample.point) > 1e-12 {
        return Err(Error::InvalidSample(format!(
            "point off the manifold by {:e}",
            s.manifold_residual(&sample.point)
        )));
    }
    for (name, v) in [("v", &sample.v), ("w", &sample.w)] {
        let r = s.tangency_residual(&sample.point, v);
        if r > 1e-8 {
            return Err(Error::InvalidSample(format!(
                "{name} is not tangent (residual {r:e})"
            )));
        }
    }
    Ok(())
}

pub fn verify_sasaki_axioms(s: &dyn SasakiStructure, samples: &[AxiomSample]) -> Result<AxiomReport> {
    let mut report = AxiomReport {
        samples: samples.len(),
        ..Default::default()
    };
    for sample in samples {
        check_sample(s, sample)?;
        let (x, v, w) = (&sample.point, &sample.v, &sample.w);
        let xi = s.reeb(x);
        let eta_v = s.eta(x, v);
        let eta_w = s.eta(x, w);
        let phi_v = s.phi(x, v);
        let phi_w = s.phi(x, w);

        let a1 = (s.eta(x, &xi) - 1.0).abs();
        let a2 = s.d_eta(x, &xi, v).abs();
        let a3 = (s.phi(x, &phi_v) + v - &xi * eta_v).norm();
        let a4 = (s.metric(x, &phi_v, &phi_w) - s.metric(x, v, w) + eta_v * eta_w).abs();
        let d_eta_vw = s.d_eta(x, v, w);
        let a5 = (d_eta_vw - s.metric(x, &phi_v, w)).abs();
        let a6 = (s.nijenhuis(x, v, w) + &xi * (2.0 * d_eta_vw)).norm();

        report.eta_of_reeb = report.eta_of_reeb.max(a1);
        report.reeb_contraction = report.reeb_contraction.max(a2);
        report.phi_square = report.phi_square.max(a3);
        report.metric_compatibility = report.metric_compatibility.max(a4);
        report.contact_metric = report.contact_metric.max(a5);
        report.normality = report.normality.max(a6);
    }
    Ok(report)
}

/// `‖Ric − A g − (2n − A) η⊗η‖∞` over the local-chart basis at `x`.
pub fn eta_einstein_residual(s: &dyn SasakiStructure, x: &DVector<f64>) -> Result<f64> {
    eta_einstein_residual_with_constant(s, x, s.einstein_constant())
}

pub fn eta_einstein_residual_with_constant(
    s: &dyn SasakiStructure,
    x: &DVector<f64>,
    a: f64,
) -> Result<f64> {
    let local = s.local_chart(x)?;
    let dim = local.chart.dim();
    let origin = DVector::zeros(dim);
    let curvature = riemannian::riemann_ricci(&local.chart, &origin)?;
    let g = local.chart.metric_at(&origin)?;
    let eta: Vec<f64> = local.basis.iter().map(|t| s.eta(x, t)).collect();
    let two_n = 2.0 * s.n() as f64;
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let r = curvature.ricci[(i, j)] - a * g[(i, j)] - (two_n - a) * eta[i] * eta[j];
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// A point `(x, r)` of the cone `M × ℝ⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    pub x: DVector<f64>,
    pub r: f64,
}

impl ConePoint {
    pub fn new(x: DVector<f64>, r: f64) -> Self {
        Self { x, r }
    }

    /// Ambient image `r x ∈ ℂ^{n+1} \ {0}`.
    pub fn ambient(&self) -> DVector<f64> {
        &self.x * self.r
    }

    pub fn from_ambient(y: &DVector<f64>) -> Self {
        let r = y.norm();
        Self { x: y / r, r }
    }
}

/// A cone tangent vector `(v, a)` with `v ∈ T_xM` and `a` the `∂_r` component.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeVector {
    pub tangent: DVector<f64>,
    pub radial: f64,
}

/// Which cone metric to build in [`ConeGeometry::cone_chart`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeMetricVariant {
    /// `r² g + dr²`
    Warped,
    /// `r² g` alone; degenerate in `∂_r`.
    DropRadialTerm,
    /// `g + dr²`, the unwarped product.
    DropWarping,
}

/// Tolerance-free residuals of the cone-wide checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ConeRicciReport {
    /// Ricci of the flat ambient metric; zero for the sphere.
    pub flat_path: f64,
    /// Ricci of `r²g + dr²` in a cone chart.
    pub chart_path: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ConeConnectionReport {
    /// `‖∇̄_v ∂_r − v/r‖` on ambient vectors.
    pub radial_derivative: f64,
    /// `‖∇̄_W (r∂_r) − W‖`.
    pub euler_identity: f64,
    /// Same relations read off the Christoffel symbols of a cone chart.
    pub chart_christoffel: f64,
}

/// The Kähler cone of the standard sphere, identified with flat `ℂ^{n+1} \ {0}`.
#[derive(Debug, Clone)]
pub struct ConeGeometry {
    pub base: StandardSphere,
}

impl ConeGeometry {
    pub fn new(base: StandardSphere) -> Self {
        Self { base }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn j(&self) -> &DMatrix<f64> {
        self.base.j()
    }

    pub fn to_ambient(&self, p: &ConePoint, v: &ConeVector) -> DVector<f64> {
        &v.tangent * p.r + &p.x * v.radial
    }

    /// `ḡ = r² g + dr²`.
    pub fn cone_metric(&self, p: &ConePoint, v: &ConeVector, w: &ConeVector) -> f64 {
        p.r * p.r * self.base.metric(&p.x, &v.tangent, &w.tangent) + v.radial * w.radial
    }

    /// The Euler field `r∂_r`.
    pub fn radial(&self, p: &ConePoint) -> ConeVector {
        ConeVector {
            tangent: DVector::zeros(p.x.len()),
            radial: p.r,
        }
    }

    /// Chart `(u, r)` around `(x, ·)` for the selected cone metric.
    pub fn cone_chart(&self, x: &DVector<f64>, variant: ConeMetricVariant) -> Result<Chart> {
        let local = self.base.local_chart(x)?;
        let m = local.chart.dim();
        let base = local.chart.clone();
        let base_d = local.chart.clone();
        let split = move |u: &DVector<f64>| (DVector::from_iterator(m, u.iter().take(m).cloned()), u[m]);
        let warp = move |r: f64| match variant {
            ConeMetricVariant::DropWarping => (1.0, 0.0),
            _ => (r * r, 2.0 * r),
        };
        let radial = match variant {
            ConeMetricVariant::DropRadialTerm => 0.0,
            _ => 1.0,
        };
        let mut lower = vec![-0.5; m];
        lower.push(0.05);
        let mut upper = vec![0.5; m];
        upper.push(f64::INFINITY);
        let chart = Chart::new(m + 1, move |u| {
            let (v, r) = split(u);
            let gm = local_metric(&base, &v);
            let mut out = DMatrix::zeros(m + 1, m + 1);
            out.view_mut((0, 0), (m, m)).copy_from(&(gm * warp(r).0));
            out[(m, m)] = radial;
            out
        })
        .with_derivative(move |u| {
            let (v, r) = split(u);
            let gm = local_metric(&base_d, &v);
            let dg = base_d.metric_derivatives(&v).unwrap_or_default();
            let (w, dw) = warp(r);
            let mut out: Vec<DMatrix<f64>> = dg
                .into_iter()
                .map(|d| {
                    let mut o = DMatrix::zeros(m + 1, m + 1);
                    o.view_mut((0, 0), (m, m)).copy_from(&(d * w));
                    o
                })
                .collect();
            let mut dr = DMatrix::zeros(m + 1, m + 1);
            dr.view_mut((0, 0), (m, m)).copy_from(&(gm * dw));
            out.push(dr);
            out
        })
        .with_domain(CoordinateDomain::boxed(lower, upper));
        Ok(chart)
    }

    /// Ambient image `y(u, r) = r·normalize(x + Σ u_a t_a)` of the coordinates of
    /// [`cone_chart`](Self::cone_chart) around `x`, with its analytic Jacobian.
    pub fn cone_embedding(&self, x: &DVector<f64>) -> Result<ConeEmbedding> {
        let local = self.base.local_chart(x)?;
        Ok(ConeEmbedding {
            center: normalize(x),
            basis: local.basis,
        })
    }

    /// Max Ricci over cone samples on both the flat ambient and the chart path.
    pub fn cone_ricci_flat(&self, samples: &[ConePoint]) -> Result<ConeRicciReport> {
        self.cone_ricci_variant(samples, ConeMetricVariant::Warped)
    }

    pub fn cone_ricci_variant(
        &self,
        samples: &[ConePoint],
        variant: ConeMetricVariant,
    ) -> Result<ConeRicciReport> {
        let d = self.base.embed_dim();
        let flat = Chart::flat(d);
        let mut report = ConeRicciReport {
            samples: samples.len(),
            ..Default::default()
        };
        for p in samples {
            let c = riemannian::riemann_ricci(&flat, &p.ambient())?;
            report.flat_path = report.flat_path.max(c.ricci.amax());
            let chart = self.cone_chart(&p.x, variant)?;
            let mut u = DVector::zeros(d);
            u[d - 1] = p.r;
            let c = riemannian::riemann_ricci(&chart, &u)?;
            report.chart_path = report.chart_path.max(c.ricci.amax());
        }
        Ok(report)
    }

    /// Residuals of `∇̄_v ∂_r = v/r` and `∇̄(r∂_r) = id`.
    pub fn connection_residuals(&self, samples: &[(ConePoint, DVector<f64>)]) -> Result<ConeConnectionReport> {
        let h = 1e-5;
        let unit_radial = |y: &DVector<f64>| normalize(y);
        let euler = |y: &DVector<f64>| y.clone();
        let mut report = ConeConnectionReport::default();
        for (p, v) in samples {
            if self.base.tangency_residual(&p.x, v) > 1e-8 {
                return Err(Error::InvalidSample("cone sample vector not tangent to M".into()));
            }
            let y = p.ambient();
            let cv = ConeVector {
                tangent: v.clone(),
                radial: 0.0,
            };
            let amb = self.to_ambient(p, &cv);
            let lhs = fd::directional(unit_radial, &y, &amb, h);
            let rhs = self.to_ambient(
                p,
                &ConeVector {
                    tangent: v / p.r,
                    radial: 0.0,
                },
            );
            report.radial_derivative = report.radial_derivative.max((lhs - rhs).norm());
            let w = ConeVector {
                tangent: v.clone(),
                radial: 0.7,
            };
            let wa = self.to_ambient(p, &w);
            let e = fd::directional(euler, &y, &wa, h);
            report.euler_identity = report.euler_identity.max((e - wa).norm());

            let chart = self.cone_chart(&p.x, ConeMetricVariant::Warped)?;
            let m = chart.dim() - 1;
            let mut u = DVector::zeros(m + 1);
            u[m] = p.r;
            let gamma = riemannian::christoffel(&chart, &u)?;
            for a in 0..=m {
                for c in 0..=m {
                    let expected = if a == c && a < m { 1.0 / p.r } else { 0.0 };
                    let r = (gamma.get(c, a, m) - expected).abs();
                    report.chart_christoffel = report.chart_christoffel.max(r);
                }
            }
        }
        Ok(report)
    }
}

/// Coordinate map of a cone chart; see [`ConeGeometry::cone_embedding`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConeEmbedding {
    center: DVector<f64>,
    basis: Vec<DVector<f64>>,
}

impl ConeEmbedding {
    fn base_point(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut z = self.center.clone();
        for (a, t) in self.basis.iter().enumerate() {
            z += t * u[a];
        }
        z
    }

    pub fn dim(&self) -> usize {
        self.basis.len() + 1
    }

    pub fn point(&self, u: &DVector<f64>) -> DVector<f64> {
        normalize(&self.base_point(u)) * u[self.basis.len()]
    }

    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let m = self.basis.len();
        let z = self.base_point(u);
        let r = u[m];
        let mut cols: Vec<DVector<f64>> = self.basis.iter().map(|t| normalize_derivative(&z, t) * r).collect();
        cols.push(normalize(&z));
        DMatrix::from_columns(&cols)
    }
}

fn local_metric(chart: &Chart, v: &DVector<f64>) -> DMatrix<f64> {
    chart
        .metric_at(v)
        .unwrap_or_else(|_| DMatrix::from_element(chart.dim(), chart.dim(), f64::NAN))
}

/// Seeded cone samples `(x, r)` with `r ∈ (0.5, 2)`.
pub fn cone_samples(s: &StandardSphere, count: usize, seed: u64) -> Vec<ConePoint> {
    use rand::Rng;
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| {
            let x = sampling::unit_vector(&mut rng, s.embed_dim());
            let r = rng.random_range(0.5..2.0);
            ConePoint::new(x, r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_squares_to_minus_identity() {
        for n in 1..=3 {
            let j = complex_structure(n);
            assert_eq!(&j * &j, -DMatrix::identity(2 * n + 2, 2 * n + 2));
        }
    }

    #[test]
    fn s3_axioms_on_fifty_samples() {
        let s = StandardSphere::new(1);
        let r = verify_sasaki_axioms(&s, &axiom_samples(&s, 50, 1)).unwrap();
        assert!(r.max() <= 1e-7, "{r:?}");
    }

    #[test]
    fn reeb_contraction_and_zero_vector() {
        let s = StandardSphere::new(2);
        let sample = &axiom_samples(&s, 1, 3)[0];
        let xi = s.reeb(&sample.point);
        assert!(s.d_eta(&sample.point, &xi, &sample.v).abs() < 1e-8);
        assert!(s.d_eta(&sample.point, &sample.v, &xi).abs() < 1e-8);

        let zero = DVector::zeros(6);
        let z = AxiomSample {
            point: sample.point.clone(),
            v: zero.clone(),
            w: zero,
        };
        let r = verify_sasaki_axioms(&s, &[z]).unwrap();
        assert_eq!(r.reeb_contraction, 0.0);
        assert_eq!(r.phi_square, 0.0);
        assert_eq!(r.metric_compatibility, 0.0);
        assert_eq!(r.contact_metric, 0.0);
        assert_eq!(r.normality, 0.0);
    }

    #[test]
    fn non_tangent_sample_is_rejected() {
        let s = StandardSphere::new(1);
        let mut sample = axiom_samples(&s, 1, 9).remove(0);
        sample.v = sample.point.clone();
        assert!(matches!(
            verify_sasaki_axioms(&s, &[sample]),
            Err(Error::InvalidSample(_))
        ));
    }

    #[test]
    fn printed_sign_of_metric_axiom_fails_on_reeb_direction() {
        // g(Φξ, Φξ) = 0 while g(ξ,ξ) + η(ξ)² = 2.
        let s = StandardSphere::new(1);
        let x = axiom_samples(&s, 1, 2)[0].point.clone();
        let xi = s.reeb(&x);
        let lhs = s.metric(&x, &s.phi(&x, &xi), &s.phi(&x, &xi));
        let plus = s.metric(&x, &xi, &xi) + s.eta(&x, &xi).powi(2);
        assert!(lhs.abs() < 1e-15);
        assert!((plus - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unnormalised_d_eta_is_twice_the_contact_metric() {
        let s = StandardSphere::new(1);
        let sample = &axiom_samples(&s, 1, 4)[0];
        let half = s.d_eta(&sample.point, &sample.v, &sample.w);
        let g = s.metric(&sample.point, &s.phi(&sample.point, &sample.v), &sample.w);
        assert!((2.0 * half - 2.0 * g).abs() < 1e-8);
        assert!(g.abs() > 1e-3);
    }

    #[test]
    fn sphere_evaluators_are_consistent() {
        let s = StandardSphere::new(2);
        for sample in axiom_samples(&s, 100, 5) {
            let x = &sample.point;
            let jx = s.apply_j(x);
            assert!((s.eta(x, &sample.v) - jx.dot(&sample.v)).abs() < 1e-15);
            assert!((s.reeb(x) - &jx).amax() < 1e-15);
            let jv = s.apply_j(&sample.v);
            let proj = &jv - x * jv.dot(x);
            assert!((s.phi(x, &sample.v) - proj).norm() <= 1e-12);
        }
    }

    #[test]
    fn eta_einstein_examples() {
        for n in [1, 2] {
            let s = StandardSphere::new(n);
            for sample in axiom_samples(&s, 3, 10 + n as u64) {
                let r = eta_einstein_residual(&s, &sample.point).unwrap();
                assert!(r <= 1e-5, "n={n}: {r}");
                let wrong =
                    eta_einstein_residual_with_constant(&s, &sample.point, s.einstein_constant() + 1.0)
                        .unwrap();
                assert!((wrong - 1.0).abs() < 1e-4, "{wrong}");
            }
        }
    }

    #[test]
    fn cone_metric_restricts_to_g() {
        let cone = ConeGeometry::new(StandardSphere::new(1));
        for sample in axiom_samples(&cone.base, 20, 6) {
            let p = ConePoint::new(sample.point.clone(), 1.0);
            let v = ConeVector { tangent: sample.v.clone(), radial: 0.0 };
            let w = ConeVector { tangent: sample.w.clone(), radial: 0.0 };
            let gbar = cone.cone_metric(&p, &v, &w);
            assert!((gbar - cone.base.metric(&sample.point, &sample.v, &sample.w)).abs() < 1e-12);
            let q = ConePoint::new(sample.point.clone(), 1.7);
            let wr = ConeVector { tangent: sample.w.clone(), radial: -0.4 };
            let lhs = cone.cone_metric(&q, &v, &wr);
            let rhs = cone.to_ambient(&q, &v).dot(&cone.to_ambient(&q, &wr));
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn cone_is_ricci_flat_and_controls_fail() {
        let cone = ConeGeometry::new(StandardSphere::new(1));
        let samples = cone_samples(&cone.base, 4, 8);
        let r = cone.cone_ricci_flat(&samples).unwrap();
        assert!(r.flat_path <= 1e-8);
        assert!(r.chart_path <= 1e-5, "{r:?}");

        let p = ConePoint::new(samples[0].x.clone(), 1.5);
        assert!(cone.cone_ricci_flat(std::slice::from_ref(&p)).unwrap().flat_path <= 1e-8);

        let bad = cone
            .cone_ricci_variant(&samples, ConeMetricVariant::DropWarping)
            .unwrap();
        assert!(bad.chart_path > 1.0, "{bad:?}");
        assert!(matches!(
            cone.cone_ricci_variant(&samples, ConeMetricVariant::DropRadialTerm),
            Err(Error::DegenerateMetric(_))
        ));
    }

    #[test]
    fn cone_connection_relations() {
        let cone = ConeGeometry::new(StandardSphere::new(2));
        let pts = cone_samples(&cone.base, 10, 12);
        let vs = axiom_samples(&cone.base, 10, 13);
        let samples: Vec<_> = pts
            .into_iter()
            .zip(vs)
            .map(|(p, s)| {
                let v = cone.base.tangent_projection(&p.x, &s.v);
                (p, v)
            })
            .collect();
        let r = cone.connection_residuals(&samples).unwrap();
        assert!(r.radial_derivative <= 1e-8, "{r:?}");
        assert!(r.euler_identity <= 1e-8, "{r:?}");
        assert!(r.chart_christoffel <= 1e-8, "{r:?}");
    }
}
