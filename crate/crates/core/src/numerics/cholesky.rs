use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};

/// Lower-triangular factor L with X = L·Lᴴ.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: ComplexMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(x: &ComplexMatrix<T>) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::Dimension {
                op: "cholesky",
                detail: format!("non-square input {:?}", x.shape()),
            });
        }
        let n = x.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = x[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let ljj = d.sqrt();
            l[(j, j)] = re(ljj);
            for i in (j + 1)..n {
                let mut s = x[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn l(&self) -> &ComplexMatrix<T> {
        &self.l
    }

    /// log₂ det X.
    pub fn logdet2(&self) -> T {
        let n = self.l.rows();
        T::two() * (0..n).map(|i| self.l[(i, i)].re.log2()).sum::<T>()
    }

    /// Solves X·y = b.
    pub fn solve_vec(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)].conj() * y[k];
            }
            y[i] = s / self.l[(i, i)].re;
        }
        y
    }

    /// X⁻¹·B.
    pub fn solve(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.col(j));
            for i in 0..b.rows() {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        let inv = self.solve(&ComplexMatrix::identity(self.l.rows()));
        inv.hermitian_part()
    }
}

/// log₂ det X for Hermitian positive-definite X.
pub fn logdet_psd<T: Real>(x: &ComplexMatrix<T>) -> Result<T> {
    Ok(Cholesky::factor(x)?.logdet2())
}
