//! Convex inner approximations of the quadratic global-reflection constraints
//! xᴴKx ≤ 0 with Hermitian, generally indefinite, K.

use crate::error::Result;
use crate::numerics::{hermitian_eig, ComplexMatrix};
use crate::scalar::Real;

/// Relative eigenvalue threshold separating zero from nonzero spectrum.
pub(crate) const SPECTRAL_TOL: f64 = 1e-12;

pub(crate) enum Split<T> {
    /// K ⪯ 0: the constraint always holds.
    Vacuous,
    /// K ⪰ 0 and nonzero: feasible points lie in null(K).
    Psd(ComplexMatrix<T>),
    /// K = K⁺ − K⁻ with both parts nonzero.
    Indefinite { plus: ComplexMatrix<T>, minus: ComplexMatrix<T> },
}

/// Eigen-split of K; `reference` is the magnitude against which eigenvalues are judged.
pub(crate) fn split<T: Real>(k: &ComplexMatrix<T>, reference: T) -> Result<Split<T>> {
    let eig = hermitian_eig(&k.hermitian_part())?;
    let tol = T::lit(SPECTRAL_TOL) * reference.max(k.frobenius_norm());
    let n = k.rows();
    let lmax = eig.eigenvalues.first().copied().unwrap_or(T::zero());
    let lmin = eig.eigenvalues.last().copied().unwrap_or(T::zero());
    if lmax <= tol {
        return Ok(Split::Vacuous);
    }
    let mut plus = ComplexMatrix::zeros(n, n);
    let mut minus = ComplexMatrix::zeros(n, n);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.vector(i);
        if l > tol {
            plus = plus.add(&ComplexMatrix::outer(&v, &v).scale(l))?;
        } else if l < -tol {
            minus = minus.add(&ComplexMatrix::outer(&v, &v).scale(-l))?;
        }
    }
    if lmin >= -tol {
        return Ok(Split::Psd(plus));
    }
    Ok(Split::Indefinite { plus: plus.hermitian_part(), minus: minus.hermitian_part() })
}

/// Orthonormal basis (columns) of the common null space of PSD matrices.
pub(crate) fn common_null_space<T: Real>(n: usize, psd: &[ComplexMatrix<T>], reference: T) -> Result<ComplexMatrix<T>> {
    if psd.is_empty() {
        return Ok(ComplexMatrix::identity(n));
    }
    let mut sum = ComplexMatrix::zeros(n, n);
    for k in psd {
        sum = sum.add(k)?;
    }
    let eig = hermitian_eig(&sum.hermitian_part())?;
    let tol = T::lit(SPECTRAL_TOL) * reference.max(sum.frobenius_norm());
    let idx: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] <= tol).collect();
    let mut out = ComplexMatrix::zeros(n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        for r in 0..n {
            out[(r, c)] = eig.eigenvectors[(r, i)];
        }
    }
    Ok(out)
}
