use num_complex::Complex;

use super::matrix::{norm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen<T> {
    /// Descending.
    pub eigenvalues: Vec<T>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Cx<T>> {
        self.eigenvectors.col(k)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Σ λ_k u_k u_kᴴ.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(re(T::zero()), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k])
        })
    }
}

pub(crate) fn hermitian_tol<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(100.0))
}

/// Multiplies `v` by a unit phase so its first largest-modulus entry is real nonnegative.
pub fn normalize_phase<T: Real>(v: &mut [Cx<T>]) {
    let max = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if max == T::zero() {
        return;
    }
    let thresh = max * (T::one() - T::lit(1e-10));
    let k = v.iter().position(|z| z.norm() >= thresh).unwrap_or(0);
    let z = v[k];
    let ph = z.conj() / z.norm();
    for x in v.iter_mut() {
        *x *= ph;
    }
    v[k] = Complex::new(v[k].re.abs(), T::zero());
}

/// Cyclic complex Jacobi eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eig<T: Real>(x: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !x.is_square() {
        return Err(Error::Dimension {
            op: "hermitian_eig",
            detail: format!("non-square input {:?}", x.shape()),
        });
    }
    let defect = x.hermitian_defect();
    if defect > hermitian_tol::<T>() {
        return Err(Error::NotHermitian { asymmetry: defect.as_f64() });
    }
    let n = x.rows();
    let mut a = x.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let zero = re(T::zero());

    if scale > T::zero() {
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= eps * scale * T::lit(1e-2) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= eps * eps * scale {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let ph = apq.conj() / r; // e^{-i arg a_pq}
                    let tau = (aqq - app) / (T::two() * r);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // W = [[c, s], [-s·ph, c·ph]] on (p, q)
                    let w_pp = re(c);
                    let w_pq = re(s);
                    let w_qp = ph * (-s);
                    let w_qq = ph * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * w_pp + akq * w_qp;
                        a[(k, q)] = akp * w_pq + akq * w_qq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
                        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
                    }
                    a[(p, q)] = zero;
                    a[(q, p)] = zero;
                    a[(p, p)] = re(a[(p, p)].re);
                    a[(q, q)] = re(a[(q, q)].re);
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * w_pp + vkq * w_qp;
                        v[(k, q)] = vkp * w_pq + vkq * w_qq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.col(src);
        let nn = norm(&col);
        if nn > T::zero() {
            for z in col.iter_mut() {
                *z /= nn;
            }
        }
        normalize_phase(&mut col);
        for i in 0..n {
            vectors[(i, dst)] = col[i];
        }
    }
    Ok(HermitianEigen { eigenvalues, eigenvectors: vectors })
}

/// Largest eigenvalue and its unit eigenvector of a Hermitian PSD matrix.
pub fn principal_eigpair<T: Real>(x: &ComplexMatrix<T>) -> Result<(T, Vec<Cx<T>>)> {
    let eig = hermitian_eig(x)?;
    if eig.is_empty() {
        return Err(Error::Dimension { op: "principal_eigpair", detail: "empty matrix".into() });
    }
    let min = *eig.eigenvalues.last().unwrap();
    let scale = x.frobenius_norm();
    if min < -hermitian_tol::<T>() * scale {
        return Err(Error::NotPsd { min_eigenvalue: min.as_f64() });
    }
    Ok((eig.eigenvalues[0].max(T::zero()), eig.vector(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn herm3() -> ComplexMatrix<f64> {
        ComplexMatrix::new(
            3,
            3,
            vec![
                cx(2.0, 0.0),
                cx(1.0, 1.0),
                cx(0.0, -0.5),
                cx(1.0, -1.0),
                cx(3.0, 0.0),
                cx(0.25, 0.0),
                cx(0.0, 0.5),
                cx(0.25, 0.0),
                cx(-1.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn diagonal_case() {
        let d = ComplexMatrix::<f64>::from_diag(&[cx(1.0, 0.0), cx(2.0, 0.0)]);
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 1.0]);
        assert_eq!(e.vector(0), vec![cx(0.0, 0.0), cx(1.0, 0.0)]);
        assert_eq!(e.vector(1), vec![cx(1.0, 0.0), cx(0.0, 0.0)]);
    }

    #[test]
    fn identity_case() {
        let e = hermitian_eig(&ComplexMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(e.vector(0), vec![cx(1.0, 0.0), cx(0.0, 0.0)]);
    }

    #[test]
    fn reconstructs_small_hermitian() {
        let x = herm3();
        let e = hermitian_eig(&x).unwrap();
        let r = e.reconstruct().sub(&x).unwrap().frobenius_norm();
        assert!(r <= 1e-12 * x.frobenius_norm(), "residual {r}");
        // trace is preserved
        let tr: f64 = e.eigenvalues.iter().sum();
        assert!((tr - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::<f64>::zeros(2, 3)),
            Err(Error::Dimension { .. })
        ));
        let mut x = herm3();
        x[(0, 1)] = cx(5.0, 0.0);
        assert!(matches!(hermitian_eig(&x), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn principal_rejects_indefinite() {
        let d = ComplexMatrix::<f64>::from_diag(&[cx(4.0, 0.0), cx(-1.0, 0.0)]);
        assert!(matches!(principal_eigpair(&d), Err(Error::NotPsd { .. })));
        let d = ComplexMatrix::<f64>::from_diag(&[cx(4.0, 0.0), cx(1.0, 0.0)]);
        let (l, u) = principal_eigpair(&d).unwrap();
        assert_eq!(l, 4.0);
        assert_eq!(u, vec![cx(1.0, 0.0), cx(0.0, 0.0)]);
    }

    #[test]
    fn phase_rule() {
        let mut v = vec![cx(0.1, 0.0), cx(0.0, -0.9)];
        normalize_phase(&mut v);
        assert!(v[1].im == 0.0 && v[1].re > 0.0);
    }
}
