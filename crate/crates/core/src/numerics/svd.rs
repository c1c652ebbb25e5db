use super::matrix::{norm, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

/// Thin singular value decomposition A = U·diag(σ)·Vᴴ of a tall matrix (rows ≥ cols).
#[derive(Debug, Clone)]
pub struct ThinSvd<T> {
    pub u: ComplexMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: ComplexMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD. Singular values are returned in descending order.
pub fn thin_svd<T: Real>(a: &ComplexMatrix<T>) -> Result<ThinSvd<T>> {
    let (m, n) = a.shape();
    if n > m {
        return Err(Error::Dimension {
            op: "thin_svd",
            detail: format!("expected rows >= cols, got {m}x{n}"),
        });
    }
    // columns stored contiguously
    let mut cols: Vec<Vec<Cx<T>>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<Cx<T>>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { re(T::one()) } else { re(T::zero()) }).collect())
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = cols[p].iter().zip(&cols[q]).fold(re(T::zero()), |acc, (&x, &y)| acc + x.conj() * y);
                let r = gamma.norm();
                if r <= eps * (alpha * beta).sqrt() || r == T::zero() {
                    continue;
                }
                rotated = true;
                let ph = gamma.conj() / r;
                let tau = (beta - alpha) / (T::two() * r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let w_qp = ph * (-s);
                let w_qq = ph * c;
                for k in 0..m {
                    let xp = cols[p][k];
                    let xq = cols[q][k];
                    cols[p][k] = xp * c + xq * w_qp;
                    cols[q][k] = xp * s + xq * w_qq;
                }
                for k in 0..n {
                    let xp = v[p][k];
                    let xq = v[q][k];
                    v[p][k] = xp * c + xq * w_qp;
                    v[q][k] = xp * s + xq * w_qq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sig: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = ComplexMatrix::zeros(m, n);
    let mut vm = ComplexMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sig[src];
        singular_values.push(s);
        for i in 0..m {
            u[(i, dst)] = if s > T::zero() { cols[src][i] / s } else { re(T::zero()) };
        }
        for i in 0..n {
            vm[(i, dst)] = v[src][i];
        }
    }
    Ok(ThinSvd { u, singular_values, v: vm })
}

/// Left pseudo-inverse C⁺ = (CᴴC)⁻¹Cᴴ of a full-column-rank matrix, via SVD.
pub fn left_pseudo_inverse<T: Real>(c: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (m, n) = c.shape();
    if n > m {
        return Err(Error::Dimension {
            op: "left_pseudo_inverse",
            detail: format!("{m}x{n} has more columns than rows; no left inverse exists"),
        });
    }
    let svd = thin_svd(c)?;
    let smax = svd.singular_values.first().copied().unwrap_or(T::zero());
    let smin = svd.singular_values.last().copied().unwrap_or(T::zero());
    if smax == T::zero() || smin < T::lit(1e-10) * smax {
        let ratio = if smax == T::zero() { 0.0 } else { (smin / smax).as_f64() };
        return Err(Error::IllConditioned { ratio });
    }
    // V Σ⁻¹ Uᴴ
    Ok(ComplexMatrix::from_fn(n, m, |i, j| {
        (0..n).fold(re(T::zero()), |acc, k| {
            acc + svd.v[(i, k)] * svd.u[(j, k)].conj() / svd.singular_values[k]
        })
    }))
}
