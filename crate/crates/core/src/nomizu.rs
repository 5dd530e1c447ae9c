//! The corrected Nomizu operator `M_K = ∇̄K + div(JK)/(2n+2)·J` on the Kähler
//! cone of the standard sphere and the second eigenfunction family
//! `f_K = ḡ(M_K ∂_r, J∂_r)`.
//!
//! The cone is flat `ℂ^{n+1} \ {0}`, so `∇̄` is the ambient derivative and `R̄m`
//! vanishes. A cone-chart computation of `div(JK)` is kept as a cross-check.

use crate::field::QuadraticForm;
use crate::legendrian::LegendrianImmersion;
use crate::linalg::{gram_schmidt, skew_defect};
use crate::moment::{f_moment, AutomorphismField};
use crate::riemannian::{self, Chart};
use crate::sasaki::{complex_structure, ConeGeometry, ConeMetricVariant, ConePoint, StandardSphere};
use crate::{fd, Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::sync::Arc;

pub type ConeFieldFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;

/// Step for finite differences of cone fields and operators.
pub const FIELD_STEP: f64 = 1e-4;

/// Tolerance of the Killing and holomorphy pre-checks.
pub const FIELD_CHECK_TOLERANCE: f64 = 1e-7;

/// A vector field on the cone in ambient coordinates `y = r x`.
#[derive(Clone)]
pub struct ConeField {
    label: String,
    n: usize,
    field: Arc<ConeFieldFn>,
    matrix: Option<DMatrix<f64>>,
}

impl std::fmt::Debug for ConeField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConeField")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("matrix", &self.matrix)
            .finish()
    }
}

impl ConeField {
    /// The linear field `y ↦ My`.
    pub fn linear(label: &str, matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d < 4 || !d.is_multiple_of(2) || matrix.ncols() != d {
            return Err(Error::InvalidField(format!("{label}: bad matrix size {d}")));
        }
        let m = matrix.clone();
        Ok(Self {
            label: label.to_string(),
            n: d / 2 - 1,
            field: Arc::new(move |y| &m * y),
            matrix: Some(matrix),
        })
    }

    /// A general field with no matrix form; `∇̄K` is then taken by finite differences.
    pub fn general<F>(label: &str, n: usize, field: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            label: label.to_string(),
            n,
            field: Arc::new(field),
            matrix: None,
        }
    }

    /// Trivial cone extension of a Sasaki automorphism.
    pub fn from_automorphism(x: &AutomorphismField) -> Self {
        Self::linear(x.label(), x.matrix().clone()).expect("real forms have even size ≥ 4")
    }

    pub fn zero(n: usize) -> Self {
        Self::linear("0", DMatrix::zeros(2 * n + 2, 2 * n + 2)).expect("valid size")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix_form(&self) -> Option<&DMatrix<f64>> {
        self.matrix.as_ref()
    }

    pub fn value(&self, y: &DVector<f64>) -> DVector<f64> {
        (self.field)(y)
    }

    /// `∇̄K` at `y`: the matrix form when linear, central differences otherwise.
    pub fn derivative(&self, y: &DVector<f64>) -> DMatrix<f64> {
        match &self.matrix {
            Some(m) => m.clone(),
            None => fd::jacobian(|z: &DVector<f64>| self.value(z), y, FIELD_STEP),
        }
    }

    /// `(Killing, holomorphic)` residuals `(‖∇̄K + ∇̄Kᵀ‖∞, ‖∇̄K J − J∇̄K‖∞)` at `y`.
    pub fn field_residuals(&self, y: &DVector<f64>) -> (f64, f64) {
        let a = self.derivative(y);
        let j = complex_structure(self.n);
        (skew_defect(&a), (&a * &j - &j * &a).amax())
    }
}

/// `M_K` at one cone point together with its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct NomizuOperator {
    pub point: ConePoint,
    pub matrix: DMatrix<f64>,
    pub div_jk: f64,
}

impl NomizuOperator {
    pub fn skew_residual(&self) -> f64 {
        skew_defect(&self.matrix)
    }

    pub fn commute_residual(&self) -> f64 {
        let n = self.matrix.nrows() / 2 - 1;
        let j = complex_structure(n);
        (&self.matrix * &j - &j * &self.matrix).amax()
    }

    pub fn trace_residual(&self) -> f64 {
        let n = self.matrix.nrows() / 2 - 1;
        (complex_structure(n) * &self.matrix).trace().abs()
    }

    /// Largest of the three structural residuals.
    pub fn max_residual(&self) -> f64 {
        self.skew_residual().max(self.commute_residual()).max(self.trace_residual())
    }
}

/// `div(JK)` at `y`, as the flat divergence of the composite field `JK`.
pub fn div_jk(k: &ConeField, y: &DVector<f64>) -> Result<f64> {
    let j = complex_structure(k.n());
    let chart = Chart::flat(2 * k.n() + 2).with_steps(fd::FdSteps {
        first: FIELD_STEP,
        ..Default::default()
    });
    riemannian::divergence(&chart, |z: &DVector<f64>| &j * k.value(z), y)
}

/// `div(JK)` computed in the `(u, r)` cone chart of riemannian-core, with the
/// field pulled back through the chart embedding. Independent of [`div_jk`].
pub fn div_jk_chart(k: &ConeField, p: &ConePoint) -> Result<f64> {
    let cone = ConeGeometry::new(StandardSphere::new(k.n()));
    let chart = cone.cone_chart(&p.x, ConeMetricVariant::Warped)?;
    let emb = cone.cone_embedding(&p.x)?;
    let j = complex_structure(k.n());
    let mut u = DVector::zeros(emb.dim());
    u[emb.dim() - 1] = p.r;
    let pulled = |c: &DVector<f64>| {
        let jac = emb.jacobian(c);
        let rhs = &j * k.value(&emb.point(c));
        (jac.transpose() * &jac)
            .lu()
            .solve(&(jac.transpose() * rhs))
            .unwrap_or_else(|| DVector::from_element(emb.dim(), f64::NAN))
    };
    riemannian::divergence(&chart, pulled, &u)
}

/// `M_K` at `p`, after checking that `K` is Killing and holomorphic there.
pub fn nomizu_at(k: &ConeField, p: &ConePoint) -> Result<NomizuOperator> {
    let y = p.ambient();
    if y.len() != 2 * k.n() + 2 {
        return Err(Error::InvalidPoint(format!("dimension {} for n = {}", y.len(), k.n())));
    }
    let (killing, holo) = k.field_residuals(&y);
    if killing > FIELD_CHECK_TOLERANCE || holo > FIELD_CHECK_TOLERANCE {
        return Err(Error::InvalidField(format!(
            "{}: Killing residual {killing:e}, holomorphy residual {holo:e}",
            k.label()
        )));
    }
    let div = div_jk(k, &y)?;
    let d = (2 * k.n() + 2) as f64;
    let matrix = k.derivative(&y) + complex_structure(k.n()) * (div / d);
    Ok(NomizuOperator {
        point: p.clone(),
        matrix,
        div_jk: div,
    })
}

/// `f_K = ḡ(M_K ∂_r, J∂_r)` at `(x, r)`, with `∂_r` the unit vector `x`.
pub fn f_nomizu_at(k: &ConeField, x: &DVector<f64>, r: f64) -> Result<f64> {
    let op = nomizu_at(k, &ConePoint::new(x.clone(), r))?;
    let jx = complex_structure(k.n()) * x;
    Ok((op.matrix * x).dot(&jx))
}

/// `f_K` at `x ∈ M`, i.e. on the slice `r = 1`.
pub fn f_nomizu(k: &ConeField, x: &DVector<f64>) -> Result<f64> {
    f_nomizu_at(k, x, 1.0)
}

/// `f_K` for a linear field, whose `M_K` is constant on the flat cone, as an
/// ambient quadratic form `xᵀ(−M_K J)x`.
#[derive(Debug, Clone, PartialEq)]
pub struct NomizuFunction {
    pub operator: NomizuOperator,
}

impl NomizuFunction {
    pub fn new(k: &ConeField) -> Result<Self> {
        if k.matrix_form().is_none() {
            return Err(Error::Unsupported(format!("{}: f_K form needs a linear field", k.label())));
        }
        let mut e = DVector::zeros(2 * k.n() + 2);
        e[0] = 1.0;
        Ok(Self {
            operator: nomizu_at(k, &ConePoint::new(e, 1.0))?,
        })
    }

    pub fn ambient(&self) -> QuadraticForm {
        let n = self.operator.matrix.nrows() / 2 - 1;
        QuadraticForm::new(-(&self.operator.matrix * complex_structure(n)), 0.0)
    }

    pub fn at_point(&self, x: &DVector<f64>) -> f64 {
        let n = self.operator.matrix.nrows() / 2 - 1;
        (&self.operator.matrix * x).dot(&(complex_structure(n) * x))
    }
}

/// Residuals of the four operator identities.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LemmaReport {
    /// Max pairwise `|div(JK)(p) − div(JK)(q)|`.
    pub div_constancy: f64,
    /// Sample variance of `div(JK)`.
    pub div_variance: f64,
    /// `‖∇̄M_K − R̄m(·, K)‖∞`.
    pub nabla_m: f64,
    /// `R̄m(r∂_r, Jr∂_r)K` and `R̄m(r∂_r, JX)K` for `X` tangent to `M`.
    pub curvature_vanishing: f64,
    /// `|Σᵢ ḡ(M_K eᵢ, Jeᵢ) + r² f_K|` over nodes of `L`, per radius.
    pub frame_identity: Vec<(f64, f64)>,
    /// Max structural residual of `M_K` (skew, `J`-commuting, `tr(JM_K)`).
    pub operator: f64,
    /// `|div(JK)` flat − chart` cross-check.
    pub chart_divergence: f64,
    /// `max |f_K(x, r) − f_K(x, 1)|` over nodes and radii.
    pub r_independence: f64,
}

impl LemmaReport {
    pub fn frame_identity_max(&self) -> f64 {
        self.frame_identity.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

/// Default radii for the `−r² f_K` identity.
pub const LEMMA_RADII: [f64; 3] = [0.5, 1.0, 2.0];

/// Evaluates all the operator identities for `K` at `samples` and along `L`.
pub fn lemma_suite(k: &ConeField, l: &LegendrianImmersion, samples: &[ConePoint], radii: &[f64]) -> Result<LemmaReport> {
    if l.n() != k.n() {
        return Err(Error::Configuration("field and immersion dimensions differ".into()));
    }
    let nodes = l.nodes()?;
    let worst = nodes.iter().map(|nd| l.legendrian_residual(&nd.u)).fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::Precondition(format!(
            "{} is not Legendrian (residual {worst:e})",
            l.name()
        )));
    }
    let d = 2 * k.n() + 2;
    let j = complex_structure(k.n());
    let flat = Chart::flat(d);
    let mut report = LemmaReport::default();

    let mut divs = Vec::with_capacity(samples.len());
    for p in samples {
        let op = nomizu_at(k, p)?;
        report.operator = report.operator.max(op.max_residual());
        divs.push(op.div_jk);
        let y = p.ambient();
        let curv = riemannian::riemann_ricci(&flat, &y)?;
        let kv = k.value(&y);
        for a in 0..d {
            let mut e = DVector::zeros(d);
            e[a] = 1.0;
            let up = ConePoint::from_ambient(&(&y + &e * FIELD_STEP));
            let dn = ConePoint::from_ambient(&(&y - &e * FIELD_STEP));
            let dm = (nomizu_at(k, &up)?.matrix - nomizu_at(k, &dn)?.matrix) / (2.0 * FIELD_STEP);
            for b in 0..d {
                let mut z = DVector::zeros(d);
                z[b] = 1.0;
                let lhs = dm.column(b).clone_owned();
                let rhs = curv.apply(&e, &kv, &z);
                report.nabla_m = report.nabla_m.max((lhs - rhs).amax());
            }
        }
        let euler = y.clone();
        let jeuler = &j * &euler;
        report.curvature_vanishing = report.curvature_vanishing.max(curv.apply(&euler, &jeuler, &kv).amax());
        let shifted = DVector::from_fn(d, |i, _| p.x[(i + 1) % d]);
        let tangent = &shifted - &p.x * p.x.dot(&shifted);
        let jt = &j * &tangent;
        report.curvature_vanishing = report.curvature_vanishing.max(curv.apply(&euler, &jt, &kv).amax());
        report.chart_divergence = report.chart_divergence.max((div_jk_chart(k, p)? - op.div_jk).abs());
    }
    let lo = divs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = divs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !divs.is_empty() {
        report.div_constancy = hi - lo;
        let mean = divs.iter().sum::<f64>() / divs.len() as f64;
        report.div_variance = divs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / divs.len() as f64;
    }

    let unit: Vec<f64> = nodes
        .iter()
        .map(|nd| f_nomizu(k, &nd.x))
        .collect::<Result<_>>()?;
    for &r in radii {
        let mut worst: f64 = 0.0;
        for (nd, f1) in nodes.iter().zip(&unit) {
            let (frame, _) = gram_schmidt(&l.jacobian(&nd.u))?;
            let op = nomizu_at(k, &ConePoint::new(nd.x.clone(), r))?;
            // e_i is the lift of a g-unit vector: ambient length r at radius r
            let sum: f64 = frame
                .column_iter()
                .map(|t| {
                    let e = t * r;
                    (&op.matrix * &e).dot(&(&j * &e))
                })
                .sum();
            let f = (&op.matrix * &nd.x).dot(&(&j * &nd.x));
            worst = worst.max((sum + r * r * f).abs());
            report.r_independence = report.r_independence.max((f - f1).abs());
        }
        report.frame_identity.push((r, worst));
    }
    Ok(report)
}

/// Residuals relating `f_K` to `η(X)` and to `f_X`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RelationReport {
    /// `max |f_K − η(X) − div(JX)/(2n+2)|`.
    pub eta_relation: f64,
    /// `max |f_K − f_X|`.
    pub family_coincidence: f64,
    pub div_jx: f64,
    /// Mean of `η(X)` over `L`; equals `−div(JX)/(2n+2)` when the families coincide.
    pub eta_mean: f64,
    /// `|∫_L η(X) dv| / vol(L)`.
    pub normalized_integral: f64,
}

pub fn relation_check(x: &AutomorphismField, l: &LegendrianImmersion) -> Result<RelationReport> {
    let k = ConeField::from_automorphism(x);
    let fm = f_moment(l, x)?;
    let nodes = l.nodes()?;
    let d = (2 * l.n() + 2) as f64;
    let mut report = RelationReport {
        eta_mean: fm.mean,
        normalized_integral: fm.integral.abs() / fm.volume,
        ..Default::default()
    };
    for (i, nd) in nodes.iter().enumerate() {
        let op = nomizu_at(&k, &ConePoint::new(nd.x.clone(), 1.0))?;
        let jx = complex_structure(l.n()) * &nd.x;
        let fk = (&op.matrix * &nd.x).dot(&jx);
        if i == 0 {
            report.div_jx = op.div_jk;
        }
        let eta = fm.eta_at(&nd.x);
        report.eta_relation = report.eta_relation.max((fk - eta - op.div_jk / d).abs());
        report.family_coincidence = report.family_coincidence.max((fk - fm.at_point(&nd.x)).abs());
    }
    Ok(report)
}
