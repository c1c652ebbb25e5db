//! Small real dense linear algebra used by the Newton steps.

use crate::scalar::Real;

/// Square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> RealMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] += v;
    }

    pub fn add_outer(&mut self, a: &[T], b: &[T], w: T) {
        for i in 0..self.n {
            let ai = a[i] * w;
            if ai == T::zero() {
                continue;
            }
            for j in 0..self.n {
                self.data[i * self.n + j] += ai * b[j];
            }
        }
    }

    pub fn max_abs_diag(&self) -> T {
        (0..self.n).fold(T::zero(), |m, i| m.max(self.get(i, i).abs()))
    }
}

/// Solves K·x = b for symmetric positive definite K, adding a growing ridge if the
/// factorization fails. Returns None if no ridge works.
pub fn solve_spd<T: Real>(k: &RealMatrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = k.n;
    let scale = k.max_abs_diag().max(T::min_positive_value());
    let mut ridge = T::zero();
    for _ in 0..30 {
        if let Some(x) = try_cholesky_solve(k, b, ridge) {
            return Some(x);
        }
        ridge = if ridge == T::zero() { scale * T::epsilon() * T::lit(n as f64 + 1.0) } else { ridge * T::lit(10.0) };
    }
    None
}

fn try_cholesky_solve<T: Real>(k: &RealMatrix<T>, b: &[T], ridge: T) -> Option<Vec<T>> {
    let n = k.n;
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut d = k.get(j, j) + ridge;
        for p in 0..j {
            d -= l[j * n + p] * l[j * n + p];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = (k.get(i, j) + k.get(j, i)) * T::lit(0.5);
            for p in 0..j {
                s -= l[i * n + p] * l[j * n + p];
            }
            l[i * n + j] = s / ljj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for p in 0..i {
            s -= l[i * n + p] * y[p];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for p in (i + 1)..n {
            s -= l[p * n + i] * y[p];
        }
        y[i] = s / l[i * n + i];
    }
    if y.iter().all(|v| v.is_finite()) {
        Some(y)
    } else {
        None
    }
}
