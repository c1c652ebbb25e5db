//! Complex-matrix kernel: storage, Hermitian eigen-decomposition, SVD-based
//! left pseudo-inverse, Cholesky log-determinant and small real solves.

mod cholesky;
pub mod dense;
mod eigen;
mod matrix;
mod svd;

pub use cholesky::{logdet_psd, Cholesky};
pub use eigen::{hermitian_eig, normalize_phase, principal_eigpair, HermitianEigen};
pub use matrix::{dot, norm, norm_sqr, quad_form, ComplexMatrix};
pub use svd::{left_pseudo_inverse, thin_svd, ThinSvd};
