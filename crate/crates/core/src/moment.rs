//! The automorphism algebra 𝔲(n+1) of the standard sphere, the contact moment
//! map `μ(x)(X) = ⟨Xx, Jx⟩` and the eigenfunction family `f_X`.
//!
//! A complex matrix `A + iB` acts on `(Re z, Im z)` as `[[A, −B], [B, A]]`; it is
//! skew-Hermitian exactly when this real form is skew and commutes with `J`.

use crate::field::QuadraticForm;
use crate::legendrian::LegendrianImmersion;
use crate::linalg::{numerical_rank, skew_defect};
use crate::sasaki::complex_structure;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// A skew-Hermitian generator, viewed as the linear vector field `x ↦ Ux`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismField {
    label: String,
    n: usize,
    real: DMatrix<f64>,
}

impl AutomorphismField {
    /// From the real and imaginary parts of an `(n+1)×(n+1)` complex matrix.
    pub fn from_complex(label: &str, re: &DMatrix<f64>, im: &DMatrix<f64>) -> Result<Self> {
        let m = re.nrows();
        if m < 2 || re.shape() != (m, m) || im.shape() != (m, m) {
            return Err(Error::InvalidField(format!("{label}: generator must be square of size ≥ 2")));
        }
        let mut real = DMatrix::zeros(2 * m, 2 * m);
        real.view_mut((0, 0), (m, m)).copy_from(re);
        real.view_mut((m, m), (m, m)).copy_from(re);
        real.view_mut((0, m), (m, m)).copy_from(&(-im));
        real.view_mut((m, 0), (m, m)).copy_from(im);
        Self::from_real(label, real)
    }

    /// From a `(2n+2)×(2n+2)` real matrix; rejected unless skew and `J`-linear
    /// within 1e−12.
    pub fn from_real(label: &str, real: DMatrix<f64>) -> Result<Self> {
        let d = real.nrows();
        if d < 4 || !d.is_multiple_of(2) || real.ncols() != d {
            return Err(Error::InvalidField(format!("{label}: bad real form size {d}")));
        }
        let n = d / 2 - 1;
        let field = Self {
            label: label.to_string(),
            n,
            real,
        };
        let (skew, commute) = field.structure_residuals();
        if skew > 1e-12 || commute > 1e-12 {
            return Err(Error::InvalidField(format!(
                "{label}: not skew-Hermitian (skew {skew:e}, [U,J] {commute:e})"
            )));
        }
        Ok(field)
    }

    pub fn zero(n: usize) -> Self {
        Self {
            label: "0".into(),
            n,
            real: DMatrix::zeros(2 * n + 2, 2 * n + 2),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.real
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.real * x
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            label: format!("{a}·{} + {b}·{}", self.label, other.label),
            n: self.n,
            real: &self.real * a + &other.real * b,
        }
    }

    /// `trace(JU)`, the cone divergence of `JK` for the linear field `K = U`.
    pub fn trace_j(&self) -> f64 {
        (complex_structure(self.n) * &self.real).trace()
    }

    /// `(‖U + Uᵀ‖∞, ‖UJ − JU‖∞)`.
    pub fn structure_residuals(&self) -> (f64, f64) {
        let j = complex_structure(self.n);
        (skew_defect(&self.real), (&self.real * &j - &j * &self.real).amax())
    }

    /// `|⟨Ux, x⟩|`: tangency of the field to the sphere at `x`.
    pub fn tangency_residual(&self, x: &DVector<f64>) -> f64 {
        self.apply(x).dot(x).abs()
    }

    /// Lie-derivative residuals `(|L_X g(v,w)|, |L_X η(v)|)` at `x`, taken by a
    /// central difference in the flow parameter of `exp(tU)`.
    pub fn lie_residuals(&self, x: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>, h: f64) -> (f64, f64) {
        let j = complex_structure(self.n);
        let flow = |t: f64| (&self.real * t).exp();
        let (fp, fm) = (flow(h), flow(-h));
        let g_at = |f: &DMatrix<f64>| (f * v).dot(&(f * w));
        let eta_at = |f: &DMatrix<f64>| (&j * (f * x)).dot(&(f * v));
        let dg = (g_at(&fp) - g_at(&fm)) / (2.0 * h);
        let deta = (eta_at(&fp) - eta_at(&fm)) / (2.0 * h);
        (dg.abs(), deta.abs())
    }

    /// The function `η(X)` as a quadratic form `xᵀ(−UJ)x` on the ambient space.
    pub fn eta_form(&self) -> QuadraticForm {
        let j = complex_structure(self.n);
        QuadraticForm::new(-(&self.real * j), 0.0)
    }
}

fn unit(m: usize, k: usize, l: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(m, m);
    e[(k, l)] = 1.0;
    e
}

/// The `(n+1)²` generators `iE_kk`, `E_kl − E_lk` and `i(E_kl + E_lk)` for `k < l`.
pub fn algebra_basis(n: usize) -> Vec<AutomorphismField> {
    let m = n + 1;
    let zero = DMatrix::zeros(m, m);
    let mut out = Vec::with_capacity(m * m);
    for k in 0..m {
        out.push(AutomorphismField::from_complex(&format!("iE{k}{k}"), &zero, &unit(m, k, k)).expect("skew-Hermitian"));
    }
    for k in 0..m {
        for l in k + 1..m {
            let s = unit(m, k, l) - unit(m, l, k);
            let h = unit(m, k, l) + unit(m, l, k);
            out.push(AutomorphismField::from_complex(&format!("E{k}{l}-E{l}{k}"), &s, &zero).expect("skew-Hermitian"));
            out.push(AutomorphismField::from_complex(&format!("i(E{k}{l}+E{l}{k})"), &zero, &h).expect("skew-Hermitian"));
        }
    }
    out
}

/// `i·Id`, whose flow is the Reeb flow.
pub fn reeb_generator(n: usize) -> AutomorphismField {
    let m = n + 1;
    AutomorphismField::from_complex("iId", &DMatrix::zeros(m, m), &DMatrix::identity(m, m)).expect("skew-Hermitian")
}

/// `i·diag(d)` for a real diagonal.
pub fn diagonal_generator(d: &[f64]) -> Result<AutomorphismField> {
    let m = d.len();
    let label = format!("i·diag{d:?}");
    AutomorphismField::from_complex(&label, &DMatrix::zeros(m, m), &DMatrix::from_diagonal(&DVector::from_row_slice(d)))
}

/// A real skew-symmetric generator, an element of 𝔰𝔬(n+1).
pub fn real_skew_generator(a: &DMatrix<f64>) -> Result<AutomorphismField> {
    let m = a.nrows();
    AutomorphismField::from_complex("real-skew", a, &DMatrix::zeros(m, m))
}

/// Pairing `tr(UᵢᵀUⱼ)` of real forms.
pub fn trace_gram(basis: &[AutomorphismField]) -> DMatrix<f64> {
    let k = basis.len();
    DMatrix::from_fn(k, k, |a, b| (basis[a].matrix().transpose() * basis[b].matrix()).trace())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue {
    pub value: f64,
}

/// `μ(x)(X) = ⟨Xx, Jx⟩`.
pub fn moment(x: &DVector<f64>, field: &AutomorphismField) -> Result<MomentValue> {
    if x.len() != 2 * field.n() + 2 {
        return Err(Error::InvalidPoint(format!("dimension {} for n = {}", x.len(), field.n())));
    }
    let dev = (x.norm() - 1.0).abs();
    if dev > 1e-8 {
        return Err(Error::InvalidPoint(format!("|x| − 1 = {dev:e}")));
    }
    let jx = complex_structure(field.n()) * x;
    Ok(MomentValue {
        value: field.apply(x).dot(&jx),
    })
}

/// The function `f_X = η(X) − mean_L η(X)` on `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFunction {
    pub field: AutomorphismField,
    /// The subtracted constant `∫_L η(X) dv / vol(L)`.
    pub mean: f64,
    pub integral: f64,
    pub volume: f64,
}

impl MomentFunction {
    /// Value at an ambient point of `L`.
    pub fn at_point(&self, x: &DVector<f64>) -> f64 {
        self.eta_at(x) - self.mean
    }

    /// `η(X)` at an ambient point, without the mean.
    pub fn eta_at(&self, x: &DVector<f64>) -> f64 {
        let jx = complex_structure(self.field.n()) * x;
        self.field.apply(x).dot(&jx)
    }

    /// Ambient quadratic form whose restriction to the sphere is `f_X`.
    pub fn ambient(&self) -> QuadraticForm {
        let mut q = self.field.eta_form();
        q.constant = -self.mean;
        q
    }
}

pub fn f_moment(l: &LegendrianImmersion, field: &AutomorphismField) -> Result<MomentFunction> {
    if field.n() != l.n() {
        return Err(Error::Configuration(format!(
            "field for n = {} on immersion with n = {}",
            field.n(),
            l.n()
        )));
    }
    let nodes = l.nodes()?;
    let volume = crate::legendrian::integrate_nodes(&nodes, |_| 1.0)?;
    if !(volume > 0.0) {
        return Err(Error::Quadrature(format!("{} has volume {volume:e}", l.name())));
    }
    let probe = MomentFunction {
        field: field.clone(),
        mean: 0.0,
        integral: 0.0,
        volume,
    };
    let integral = crate::legendrian::integrate_nodes(&nodes, |node| probe.eta_at(&node.x))?;
    Ok(MomentFunction {
        mean: integral / volume,
        integral,
        ..probe
    })
}

/// Dimension of the subspace of `span(basis)` whose fields are tangent to `L` at
/// every sampled coordinate, from the numerical rank (relative threshold 1e−8)
/// of the stacked normal parts.
pub fn tangent_subalgebra_dimension(
    l: &LegendrianImmersion,
    basis: &[AutomorphismField],
    coordinates: &[DVector<f64>],
) -> Result<usize> {
    let d = 2 * l.n() + 2;
    let mut m = DMatrix::zeros(d * coordinates.len(), basis.len());
    for (k, x) in basis.iter().enumerate() {
        for (s, u) in coordinates.iter().enumerate() {
            let chi = l.chi_decompose(|p| x.apply(p), u)?;
            m.view_mut((s * d, k), (d, 1)).copy_from(&chi.normal);
        }
    }
    Ok(basis.len() - numerical_rank(&m, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendrian::{all_builtin, clifford_torus, geodesic_sphere};
    use crate::sampling;
    use crate::sasaki::{axiom_samples, SasakiStructure, StandardSphere};

    #[test]
    fn basis_sizes() {
        assert_eq!(algebra_basis(1).len(), 4);
        assert_eq!(algebra_basis(2).len(), 9);
        assert_eq!(algebra_basis(3).len(), 16);
    }

    #[test]
    fn gram_matrix_is_nonsingular() {
        for n in 1..=3 {
            let g = trace_gram(&algebra_basis(n));
            assert_eq!(numerical_rank(&g, 1e-8), (n + 1) * (n + 1));
        }
    }

    #[test]
    fn non_hermitian_generators_are_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let r = AutomorphismField::from_complex("bad", &m, &DMatrix::zeros(2, 2));
        assert!(matches!(r, Err(Error::InvalidField(_))));
    }

    #[test]
    fn basis_fields_are_sasaki_automorphisms() {
        for n in 1..=3 {
            let s = StandardSphere::new(n);
            let samples = axiom_samples(&s, 20, 40 + n as u64);
            for x in algebra_basis(n) {
                let (skew, commute) = x.structure_residuals();
                assert!(skew <= 1e-12 && commute <= 1e-12);
                for smp in &samples {
                    assert!(x.tangency_residual(&smp.point) <= 1e-14);
                    let (lg, le) = x.lie_residuals(&smp.point, &smp.v, &smp.w, 1e-4);
                    assert!(lg <= 1e-7 && le <= 1e-7, "{}: {lg:e} {le:e}", x.label());
                }
            }
        }
    }

    #[test]
    fn a_non_killing_field_fails_the_lie_check() {
        let s = StandardSphere::new(1);
        let smp = &axiom_samples(&s, 1, 3)[0];
        let stretch = AutomorphismField {
            label: "stretch".into(),
            n: 1,
            real: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 0.0, 0.0])),
        };
        let (lg, le) = stretch.lie_residuals(&smp.point, &smp.point, &smp.point, 1e-4);
        assert!(lg.max(le) > 1e-3);
    }

    #[test]
    fn moment_examples() {
        let mut e1 = DVector::zeros(4);
        e1[0] = 1.0;
        let i_e11 = &algebra_basis(1)[0];
        assert!((moment(&e1, i_e11).unwrap().value - 1.0).abs() < 1e-15);

        let mut rng = sampling::rng(1);
        for n in 1..=3 {
            let m = n + 1;
            let a = DMatrix::from_fn(m, m, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
            let skew = real_skew_generator(&((&a - a.transpose()) * 0.5)).unwrap();
            let mut x = DVector::zeros(2 * m);
            let r = sampling::unit_vector(&mut rng, m);
            x.rows_mut(0, m).copy_from(&r);
            assert!(moment(&x, &skew).unwrap().value.abs() < 1e-15);

            let s = StandardSphere::new(n);
            for smp in axiom_samples(&s, 20, 7) {
                assert!((moment(&smp.point, &reeb_generator(n)).unwrap().value - 1.0).abs() < 1e-14);
                for b in algebra_basis(n) {
                    let mu = moment(&smp.point, &b).unwrap().value;
                    assert!((mu - s.eta(&smp.point, &b.apply(&smp.point))).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn moment_rejects_points_off_the_sphere() {
        let x = DVector::from_vec(vec![1.1, 0.0, 0.0, 0.0]);
        assert!(matches!(moment(&x, &reeb_generator(1)), Err(Error::InvalidPoint(_))));
    }

    #[test]
    fn reeb_generator_gives_the_zero_function() {
        for l in all_builtin() {
            let f = f_moment(&l, &reeb_generator(l.n())).unwrap();
            assert!((f.mean - 1.0).abs() < 1e-12);
            for node in l.nodes().unwrap().iter().step_by(7) {
                assert!(f.at_point(&node.x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn real_skew_gives_the_zero_function_on_geodesic_spheres() {
        for n in 1..=3 {
            let l = geodesic_sphere(n).unwrap();
            for b in algebra_basis(n).iter().filter(|b| b.label().starts_with('E')) {
                let f = f_moment(&l, b).unwrap();
                for node in l.nodes().unwrap().iter().step_by(5) {
                    assert_eq!(f.at_point(&node.x), 0.0);
                }
            }
        }
    }

    #[test]
    fn diagonal_generator_gives_difference_of_squares() {
        let l = geodesic_sphere(2).unwrap();
        let x = diagonal_generator(&[1.0, -1.0, 0.0]).unwrap();
        let f = f_moment(&l, &x).unwrap();
        assert!(f.mean.abs() <= 1e-8);
        for node in l.nodes().unwrap().iter().step_by(11) {
            let p = &node.x;
            assert!((f.at_point(p) - (p[0] * p[0] - p[1] * p[1])).abs() < 1e-8);
        }
    }

    #[test]
    fn family_functions_have_zero_mean() {
        for l in all_builtin() {
            let nodes = l.nodes().unwrap();
            for b in algebra_basis(l.n()) {
                let f = f_moment(&l, &b).unwrap();
                let integral = crate::legendrian::integrate_nodes(&nodes, |nd| f.at_point(&nd.x)).unwrap();
                assert!(integral.abs() <= 1e-8 * f.volume, "{} {}", l.name(), b.label());
            }
        }
    }

    #[test]
    fn special_unitary_elements_integrate_to_zero() {
        for l in all_builtin() {
            for b in algebra_basis(l.n()).iter().filter(|b| b.trace_j().abs() < 1e-12) {
                let f = f_moment(&l, b).unwrap();
                assert!(f.integral.abs() <= 1e-8 * f.volume, "{} {}", l.name(), b.label());
            }
        }
    }

    #[test]
    fn f_moment_is_linear() {
        let l = clifford_torus();
        let basis = algebra_basis(2);
        let (x, y) = (&basis[1], &basis[5]);
        let (a, b) = (0.7, -1.3);
        let fx = f_moment(&l, x).unwrap();
        let fy = f_moment(&l, y).unwrap();
        let fc = f_moment(&l, &x.combine(a, y, b)).unwrap();
        for node in l.nodes().unwrap().iter().step_by(13) {
            let lhs = fc.at_point(&node.x);
            let rhs = a * fx.at_point(&node.x) + b * fy.at_point(&node.x);
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn tangent_subalgebra_on_geodesic_spheres_is_so() {
        for n in 1..=3 {
            let l = geodesic_sphere(n).unwrap();
            let coords = l.sample_coordinates(12, 50);
            let dim = tangent_subalgebra_dimension(&l, &algebra_basis(n), &coords).unwrap();
            assert_eq!(dim, n * (n + 1) / 2);
        }
    }

    #[test]
    fn mismatched_dimension_is_a_configuration_error() {
        let l = clifford_torus();
        assert!(matches!(f_moment(&l, &reeb_generator(1)), Err(Error::Configuration(_))));
    }
}
