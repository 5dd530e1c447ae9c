//! Two independent Laplacian pipelines on `L`: the pointwise extrinsic formula
//! `Δ_L f = −Σᵢ ∇̄df(eᵢ, eᵢ)` evaluated through the flat cone, and intrinsic
//! discretisations (periodic finite differences, icosphere finite elements).
//! Also eigen-residuals, multiplicity counting and the multiplicity bound.
//!
//! `Δ_L` is the nonnegative Laplacian throughout.

use crate::field::{AmbientFunction, RadialExtension};
use crate::legendrian::{integrate_nodes, IntrinsicModel, LegendrianImmersion, Node};
use crate::linalg::{numerical_rank, pairwise_sum};
use crate::mesh::{self, SubspaceSettings};
use crate::riemannian;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// `‖H‖` allowed on the minimal-immersion path.
pub const MINIMALITY_TOLERANCE: f64 = 1e-6;
/// Default relative half-width of the multiplicity window.
pub const DEFAULT_WINDOW: f64 = 0.05;
/// Required ratio of cluster gap to full window width.
pub const SEPARATION_FACTOR: f64 = 3.0;
/// Sup-norm below which a function counts as identically zero.
pub const DEGENERATE_NORM: f64 = 1e-12;
/// Number of eigenvalues kept in a report.
pub const REPORTED_EIGENVALUES: usize = 64;
/// Eigenvalues computed on the icosphere: through the `λ = 12` cluster.
pub const SPHERE_EIGENVALUES: usize = 16;

pub const CIRCLE_POINTS: std::ops::RangeInclusive<usize> = 64..=4096;
pub const TORUS_POINTS: std::ops::RangeInclusive<usize> = 32..=256;
pub const SPHERE_LEVELS: std::ops::RangeInclusive<usize> = 3..=6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianPath {
    /// `−Σ ∇̄df(eᵢ,eᵢ)` on the r-constant extension; requires `H = 0`.
    Minimal,
    /// `−Σ ∇df(eᵢ,eᵢ) − H·f` with the sphere connection; any immersion.
    General,
}

/// `Δ_L f` at `u` on the minimal path, after checking `‖H‖ ≤ 1e−6`.
pub fn extrinsic_laplacian(l: &LegendrianImmersion, f: &dyn AmbientFunction, u: &DVector<f64>) -> Result<f64> {
    extrinsic_laplacian_with(l, f, u, LaplacianPath::Minimal)
}

pub fn extrinsic_laplacian_with(
    l: &LegendrianImmersion,
    f: &dyn AmbientFunction,
    u: &DVector<f64>,
    path: LaplacianPath,
) -> Result<f64> {
    let x = l.point(u);
    match path {
        LaplacianPath::Minimal => {
            let shape = l.shape_data(u)?;
            let h = shape.mean_curvature_norm();
            if h > MINIMALITY_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "{} is not minimal at {:?}: |H| = {h:e}",
                    l.name(),
                    u.as_slice()
                )));
            }
            let hess = RadialExtension::new(f).hessian(&x);
            Ok(-shape.frame.column_iter().map(|e| e.dot(&(&hess * e))).sum::<f64>())
        }
        LaplacianPath::General => {
            let shape = l.shape_data(u)?;
            let grad = f.gradient(&x);
            let hess = f.hessian(&x);
            let radial = grad.dot(&x);
            let trace: f64 = shape.frame.column_iter().map(|e| e.dot(&(&hess * e)) - radial).sum();
            Ok(-trace - shape.mean_curvature.dot(&grad))
        }
    }
}

/// `Δ_L f` from the induced-metric chart of riemannian-core (finite differences
/// in chart coordinates). Independent of the extrinsic formula.
pub fn intrinsic_laplacian(l: &LegendrianImmersion, f: &dyn AmbientFunction, u: &DVector<f64>) -> Result<f64> {
    let chart = l.induced_chart();
    let pulled = |c: &DVector<f64>| f.value(&l.point(c));
    riemannian::laplace_beltrami(&chart, &pulled, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenResidual {
    /// `max |Δf − λf| / ‖f‖∞` over nodes, or 0 when degenerate.
    pub residual: f64,
    pub sup_norm: f64,
    /// `f` vanishes identically on the nodes.
    pub degenerate: bool,
}

/// Eigen-residual over the quadrature nodes of `L` on the minimal path.
pub fn eigen_residual(l: &LegendrianImmersion, f: &dyn AmbientFunction, lambda: f64) -> Result<EigenResidual> {
    let nodes = l.nodes()?;
    eigen_residual_at(l, f, lambda, &nodes, LaplacianPath::Minimal)
}

pub fn eigen_residual_at(
    l: &LegendrianImmersion,
    f: &dyn AmbientFunction,
    lambda: f64,
    nodes: &[Node],
    path: LaplacianPath,
) -> Result<EigenResidual> {
    let values: Vec<f64> = nodes.iter().map(|nd| f.value(&nd.x)).collect();
    let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup_norm <= DEGENERATE_NORM {
        return Ok(EigenResidual {
            residual: 0.0,
            sup_norm,
            degenerate: true,
        });
    }
    let laplacians: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|nd| extrinsic_laplacian_with(l, f, &nd.u, path))
        .collect();
    let mut worst: f64 = 0.0;
    for (lap, v) in laplacians.into_iter().zip(&values) {
        worst = worst.max((lap? - lambda * v).abs());
    }
    Ok(EigenResidual {
        residual: worst / sup_norm,
        sup_norm,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshMethod {
    /// Constant-coefficient central differences on a periodic grid.
    PeriodicFd,
    /// Cotangent finite elements with lumped mass on an icosphere.
    IcosphereFem,
}

/// Distance from the window to the nearest eigenvalue outside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Separation {
    pub gap: f64,
    pub required: f64,
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub immersion: String,
    pub method: MeshMethod,
    pub resolution: usize,
    /// Lowest eigenvalues, ascending (at most [`REPORTED_EIGENVALUES`]).
    pub eigenvalues: Vec<f64>,
    /// How many eigenvalues the discretisation produced in total.
    pub computed: usize,
    pub target: f64,
    pub window: f64,
    pub multiplicity: usize,
    pub cluster: Vec<f64>,
    pub cluster_mean: f64,
    pub bound: i64,
    pub separation: Separation,
    pub residuals: Vec<(String, f64)>,
}

/// `dim 𝔲(n+1) − n(n+1)/2 − 1`.
pub fn multiplicity_bound(n: usize) -> i64 {
    bound_for(n, (n + 1) * (n + 1))
}

fn bound_for(n: usize, dim_g: usize) -> i64 {
    dim_g as i64 - (n * (n + 1) / 2) as i64 - 1
}

/// Count of eigenvalues in `[λ*(1−w), λ*(1+w)]`.
pub fn count_in_window(eigenvalues: &[f64], target: f64, window: f64) -> usize {
    eigenvalues
        .iter()
        .filter(|&&e| e >= target * (1.0 - window) && e <= target * (1.0 + window))
        .count()
}

fn separation(eigenvalues: &[f64], target: f64, window: f64) -> Separation {
    let (lo, hi) = (target * (1.0 - window), target * (1.0 + window));
    let inside: Vec<f64> = eigenvalues.iter().cloned().filter(|&e| e >= lo && e <= hi).collect();
    let required = SEPARATION_FACTOR * 2.0 * window * target;
    if inside.is_empty() {
        return Separation {
            gap: 0.0,
            required,
            separated: false,
        };
    }
    let cmin = inside.iter().cloned().fold(f64::INFINITY, f64::min);
    let cmax = inside.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let below = eigenvalues.iter().cloned().filter(|&e| e < lo).fold(f64::NEG_INFINITY, f64::max);
    let above = eigenvalues.iter().cloned().filter(|&e| e > hi).fold(f64::INFINITY, f64::min);
    let gap = (cmin - below).min(above - cmax);
    Separation {
        gap,
        required,
        // an unresolved neighbour above counts as unseparated
        separated: gap.is_finite() && gap >= required,
    }
}

/// FD eigenvalues `4 sin²(πk/N)/h²` of a closed curve of the given length.
pub fn circle_fd_spectrum(length: f64, points: usize) -> Vec<f64> {
    let h = length / points as f64;
    let mut e: Vec<f64> = (0..points)
        .map(|k| {
            let s = (std::f64::consts::PI * k as f64 / points as f64).sin();
            4.0 * s * s / (h * h)
        })
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Symbol of `−g^{ij}∂_i∂_j` with the five-point and cross stencils on the
/// periodic `N×N` grid over `[0, 2π)²`.
pub fn torus_fd_symbol(ginv: &Matrix2<f64>, points: usize, p: usize, q: usize) -> f64 {
    let h = TAU / points as f64;
    let (a, b) = (p as f64 * h, q as f64 * h);
    let s = |t: f64| (0.5 * t).sin().powi(2);
    (ginv[(0, 0)] * 4.0 * s(a) + 2.0 * ginv[(0, 1)] * a.sin() * b.sin() + ginv[(1, 1)] * 4.0 * s(b)) / (h * h)
}

pub fn torus_fd_spectrum(metric: &[[f64; 2]; 2], points: usize) -> Result<Vec<f64>> {
    let ginv = torus_inverse_metric(metric)?;
    let mut e: Vec<f64> = (0..points)
        .flat_map(|p| (0..points).map(move |q| (p, q)))
        .map(|(p, q)| torus_fd_symbol(&ginv, points, p, q))
        .collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

fn torus_inverse_metric(metric: &[[f64; 2]; 2]) -> Result<Matrix2<f64>> {
    Matrix2::new(metric[0][0], metric[0][1], metric[1][0], metric[1][1])
        .try_inverse()
        .ok_or_else(|| Error::DegenerateMetric("torus metric is singular".into()))
}

/// FD operator `−(1/g) δ²/h²` applied to periodic samples on `[0, 2π)`.
pub fn apply_circle_fd(values: &[f64], metric: f64) -> Vec<f64> {
    let n = values.len();
    let h = TAU / n as f64;
    (0..n)
        .map(|i| {
            let (l, r) = (values[(i + n - 1) % n], values[(i + 1) % n]);
            -(l - 2.0 * values[i] + r) / (h * h * metric)
        })
        .collect()
}

/// FD operator `−g^{ij}δ_iδ_j` applied to row-major samples on the `N×N` grid.
pub fn apply_torus_fd(values: &[f64], points: usize, ginv: &Matrix2<f64>) -> Vec<f64> {
    let n = points;
    let h = TAU / n as f64;
    let at = |i: usize, j: usize| values[(i % n) * n + (j % n)];
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (ip, im, jp, jm) = (i + 1, i + n - 1, j + 1, j + n - 1);
            let c = at(i, j);
            let duu = (at(ip, j) - 2.0 * c + at(im, j)) / (h * h);
            let dvv = (at(i, jp) - 2.0 * c + at(i, jm)) / (h * h);
            let duv = (at(ip, jp) - at(ip, jm) - at(im, jp) + at(im, jm)) / (4.0 * h * h);
            out[i * n + j] = -(ginv[(0, 0)] * duu + 2.0 * ginv[(0, 1)] * duv + ginv[(1, 1)] * dvv);
        }
    }
    out
}

/// Dense matrix of [`apply_torus_fd`], for cross-checking the symbol at small `N`.
pub fn torus_fd_matrix(points: usize, ginv: &Matrix2<f64>) -> DMatrix<f64> {
    let m = points * points;
    let mut out = DMatrix::zeros(m, m);
    let mut e = vec![0.0; m];
    for c in 0..m {
        e[c] = 1.0;
        let col = apply_torus_fd(&e, points, ginv);
        out.set_column(c, &DVector::from_vec(col));
        e[c] = 0.0;
    }
    out
}

/// Intrinsic mesh spectrum of `L` at `λ* = 2n+2` with the default window.
pub fn mesh_spectrum(l: &LegendrianImmersion, resolution: usize) -> Result<SpectralReport> {
    mesh_spectrum_with(l, resolution, DEFAULT_WINDOW)
}

pub fn mesh_spectrum_with(l: &LegendrianImmersion, resolution: usize, window: f64) -> Result<SpectralReport> {
    let (method, all) = match l.intrinsic() {
        IntrinsicModel::Circle { length } => {
            check_range("circle points", resolution, &CIRCLE_POINTS)?;
            (MeshMethod::PeriodicFd, circle_fd_spectrum(*length, resolution))
        }
        IntrinsicModel::FlatTorus { metric } => {
            check_range("torus points per axis", resolution, &TORUS_POINTS)?;
            (MeshMethod::PeriodicFd, torus_fd_spectrum(metric, resolution)?)
        }
        IntrinsicModel::RoundSphere { dim: 2, radius } => {
            check_range("icosphere level", resolution, &SPHERE_LEVELS)?;
            let fem = mesh::cotangent_fem(&mesh::icosphere(resolution, *radius));
            let e = mesh::lowest_eigenvalues(&fem, SPHERE_EIGENVALUES, SubspaceSettings::default())?;
            (MeshMethod::IcosphereFem, e)
        }
        other => {
            return Err(Error::Unsupported(format!(
                "no intrinsic discretiser for {} ({other:?})",
                l.name()
            )))
        }
    };
    Ok(build_report(l.name(), l.n(), method, resolution, all, window))
}

fn check_range(what: &str, value: usize, range: &std::ops::RangeInclusive<usize>) -> Result<()> {
    if range.contains(&value) {
        Ok(())
    } else {
        Err(Error::Configuration(format!(
            "{what} {value} outside {}..={}",
            range.start(),
            range.end()
        )))
    }
}

/// Assembles a report from a sorted spectrum.
pub fn build_report(
    name: &str,
    n: usize,
    method: MeshMethod,
    resolution: usize,
    all: Vec<f64>,
    window: f64,
) -> SpectralReport {
    let target = (2 * n + 2) as f64;
    let computed = all.len();
    let (lo, hi) = (target * (1.0 - window), target * (1.0 + window));
    let cluster: Vec<f64> = all.iter().cloned().filter(|&e| e >= lo && e <= hi).collect();
    let cluster_mean = if cluster.is_empty() {
        f64::NAN
    } else {
        cluster.iter().sum::<f64>() / cluster.len() as f64
    };
    let sep = separation(&all, target, window);
    SpectralReport {
        immersion: name.to_string(),
        method,
        resolution,
        eigenvalues: all.iter().take(REPORTED_EIGENVALUES).cloned().collect(),
        computed,
        target,
        window,
        multiplicity: cluster.len(),
        cluster,
        cluster_mean,
        bound: multiplicity_bound(n),
        separation: sep,
        residuals: Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundVerdict {
    pub status: VerdictStatus,
    pub multiplicity: usize,
    pub bound: i64,
    /// Multiplicity equals the bound.
    pub equality: bool,
    pub diagnostics: String,
}

/// `multiplicity ≥ dim_g − n(n+1)/2 − 1`, inconclusive when the cluster is not separated.
pub fn bound_check(report: &SpectralReport, n: usize, dim_g: usize) -> BoundVerdict {
    let bound = bound_for(n, dim_g);
    let m = report.multiplicity as i64;
    let sep = report.separation;
    let first_ok = report
        .eigenvalues
        .first()
        .map(|e| e.abs() <= report.window * report.target)
        .unwrap_or(false);
    if !sep.separated || !first_ok {
        return BoundVerdict {
            status: VerdictStatus::Inconclusive,
            multiplicity: report.multiplicity,
            bound,
            equality: false,
            diagnostics: format!(
                "cluster gap {:.4} vs required {:.4}; lowest eigenvalue {:?}",
                sep.gap,
                sep.required,
                report.eigenvalues.first()
            ),
        };
    }
    BoundVerdict {
        status: if m >= bound { VerdictStatus::Pass } else { VerdictStatus::Fail },
        multiplicity: report.multiplicity,
        bound,
        equality: m == bound,
        diagnostics: format!(
            "multiplicity {m} at {} (cluster mean {:.6}), bound {bound}",
            report.target, report.cluster_mean
        ),
    }
}

/// `log(e_coarse / e_fine) / log(refinement)`.
pub fn convergence_order(e_coarse: f64, e_fine: f64, refinement: f64) -> f64 {
    (e_coarse / e_fine).ln() / refinement.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    /// `max |Δ_h f − Δ_ext f| / max |Δ_ext f|` over grid nodes.
    pub relative_error: f64,
    pub degenerate: bool,
}

/// Mesh operator applied to grid samples of `f` versus the extrinsic Laplacian
/// at the same nodes. Circle and torus only.
pub fn pipeline_agreement(l: &LegendrianImmersion, f: &dyn AmbientFunction, points: usize) -> Result<Agreement> {
    let h = TAU / points as f64;
    let (coords, mesh_values): (Vec<DVector<f64>>, Vec<f64>) = match l.intrinsic() {
        IntrinsicModel::Circle { length } => {
            let coords: Vec<DVector<f64>> = (0..points).map(|i| DVector::from_vec(vec![i as f64 * h])).collect();
            let samples: Vec<f64> = coords.iter().map(|u| f.value(&l.point(u))).collect();
            let metric = (length / TAU).powi(2);
            let applied = apply_circle_fd(&samples, metric);
            (coords, applied)
        }
        IntrinsicModel::FlatTorus { metric } => {
            let ginv = torus_inverse_metric(metric)?;
            let coords: Vec<DVector<f64>> = (0..points * points)
                .map(|k| DVector::from_vec(vec![(k / points) as f64 * h, (k % points) as f64 * h]))
                .collect();
            let samples: Vec<f64> = coords.iter().map(|u| f.value(&l.point(u))).collect();
            let applied = apply_torus_fd(&samples, points, &ginv);
            (coords, applied)
        }
        other => {
            return Err(Error::Unsupported(format!(
                "grid agreement needs a periodic grid, got {other:?}"
            )))
        }
    };
    let ext: Vec<Result<f64>> = coords.par_iter().map(|u| extrinsic_laplacian(l, f, u)).collect();
    let mut scale: f64 = 0.0;
    let mut diff: f64 = 0.0;
    for (e, m) in ext.into_iter().zip(&mesh_values) {
        let e = e?;
        scale = scale.max(e.abs());
        diff = diff.max((e - m).abs());
    }
    if scale <= DEGENERATE_NORM {
        return Ok(Agreement {
            relative_error: 0.0,
            degenerate: true,
        });
    }
    Ok(Agreement {
        relative_error: diff / scale,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rayleigh {
    /// `∫|∇f|² / ∫f²`, 0 when degenerate.
    pub quotient: f64,
    pub degenerate: bool,
}

/// Rayleigh quotient by quadrature, with `∇f` from the ambient gradient.
pub fn rayleigh_quotient(l: &LegendrianImmersion, f: &dyn AmbientFunction) -> Result<Rayleigh> {
    let nodes = l.nodes()?;
    let sup = nodes.iter().fold(0.0f64, |m, nd| m.max(f.value(&nd.x).abs()));
    if sup <= DEGENERATE_NORM {
        return Ok(Rayleigh {
            quotient: 0.0,
            degenerate: true,
        });
    }
    let mut grad_sq = Vec::with_capacity(nodes.len());
    for nd in &nodes {
        let jac = l.jacobian(&nd.u);
        let du = jac.transpose() * f.gradient(&nd.x);
        let ginv = (jac.transpose() * &jac)
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric("singular induced metric".into()))?;
        grad_sq.push(nd.weight * du.dot(&(ginv * &du)));
    }
    let den = integrate_nodes(&nodes, |nd| f.value(&nd.x).powi(2))?;
    Ok(Rayleigh {
        quotient: pairwise_sum(&grad_sq) / den,
        degenerate: false,
    })
}

/// Numerical rank of the node-sampled matrix of `functions`.
pub fn span_rank(l: &LegendrianImmersion, functions: &[&dyn AmbientFunction], rel: f64) -> Result<usize> {
    let nodes = l.nodes()?;
    let m = DMatrix::from_fn(nodes.len(), functions.len(), |i, j| functions[j].value(&nodes[i].x));
    Ok(numerical_rank(&m, rel))
}

/// Direct dense eigenvalues of a symmetric matrix, ascending.
pub fn dense_symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().cloned().collect();
    e.sort_by(f64::total_cmp);
    e
}
