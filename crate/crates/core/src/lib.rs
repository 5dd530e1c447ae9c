//! Numerical verification toolkit for Laplacian eigenfunctions on minimal
//! Legendrian submanifolds of the standard Sasakian sphere.
//!
//! The crate is organised bottom-up:
//!
//! - [`riemannian`]: chart-based Christoffel symbols, Hessians, curvature, divergence.
//! - [`sasaki`]: the standard Sasakian sphere, its Kähler cone and axiom residuals.
//! - [`legendrian`]: parameterised Legendrian immersions, shape data, quadrature, χ.
//! - [`moment`]: the 𝔲(n+1) automorphism algebra, the contact moment map and `f_X`.
//! - [`nomizu`]: the corrected Nomizu operator `M_K`, the family `f_K` and its identities.
//! - [`spectral`]: extrinsic and mesh Laplacians, spectra, multiplicity counting.
//!
//! Supporting numerics live in [`fd`], [`linalg`], [`quadrature`], [`mesh`] (icosphere
//! finite elements) and [`field`] (ambient test functions).

pub mod error;
pub mod fd;
pub mod field;
pub mod legendrian;
pub mod linalg;
pub mod mesh;
pub mod moment;
pub mod nomizu;
pub mod quadrature;
pub mod riemannian;
pub mod sampling;
pub mod sasaki;
pub mod spectral;

pub use error::{Error, Result};
