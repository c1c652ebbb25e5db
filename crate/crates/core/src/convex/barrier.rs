//! Log-barrier interior-point method with damped Newton steps.

use crate::numerics::dense::{solve_spd, RealMatrix};
use crate::scalar::Real;

use super::options::SolverOptions;

/// Smooth problem in real variables: maximize a concave `f` subject to convex `c_i(x) ≤ 0`
/// and an optional conic constraint represented by a self-concordant barrier `φ`.
pub(crate) trait BarrierProblem<T: Real> {
    fn dim(&self) -> usize;
    fn num_constraints(&self) -> usize;

    /// Objective value, or None outside its domain.
    fn objective(&self, x: &[T]) -> Option<T>;
    /// Gradient and Hessian of the objective.
    fn objective_derivs(&self, x: &[T]) -> (Vec<T>, RealMatrix<T>);

    fn constraint(&self, i: usize, x: &[T]) -> T;
    /// Gradient and Hessian (None when affine) of constraint `i`.
    fn constraint_derivs(&self, i: usize, x: &[T]) -> (Vec<T>, Option<RealMatrix<T>>);

    /// Cone barrier value, None outside the cone interior.
    fn cone(&self, _x: &[T]) -> Option<T> {
        Some(T::zero())
    }
    fn cone_derivs(&self, _x: &[T]) -> Option<(Vec<T>, RealMatrix<T>)> {
        None
    }
    fn cone_degree(&self) -> usize {
        0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierResult<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Duality-gap bound m/t plus the final scaled Newton decrement.
    pub kkt_residual: T,
    pub newton_steps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BarrierError {
    /// No strictly feasible point could be found.
    EmptyInterior,
    /// The supplied point lies outside the cone or objective domain.
    BadStart,
}

fn potential<T: Real, P: BarrierProblem<T> + ?Sized>(p: &P, x: &[T], t: T, with_obj: bool) -> Option<T> {
    let mut v = p.cone(x)?;
    for i in 0..p.num_constraints() {
        let c = p.constraint(i, x);
        if !(c < T::zero()) {
            return None;
        }
        v -= (-c).ln();
    }
    if with_obj {
        let f = p.objective(x)?;
        if !f.is_finite() {
            return None;
        }
        v -= t * f;
    }
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

fn newton_system<T: Real, P: BarrierProblem<T> + ?Sized>(
    p: &P,
    x: &[T],
    t: T,
    with_obj: bool,
) -> (Vec<T>, RealMatrix<T>) {
    let n = p.dim();
    let mut g = vec![T::zero(); n];
    let mut h = RealMatrix::zeros(n);
    if with_obj {
        let (fg, fh) = p.objective_derivs(x);
        for i in 0..n {
            g[i] -= t * fg[i];
        }
        for (hv, fv) in h.data.iter_mut().zip(&fh.data) {
            *hv -= t * *fv;
        }
    }
    for i in 0..p.num_constraints() {
        let c = p.constraint(i, x);
        let (cg, ch) = p.constraint_derivs(i, x);
        let inv = -T::one() / c; // positive
        for k in 0..n {
            g[k] += inv * cg[k];
        }
        h.add_outer(&cg, &cg, inv * inv);
        if let Some(ch) = ch {
            for (hv, cv) in h.data.iter_mut().zip(&ch.data) {
                *hv += inv * *cv;
            }
        }
    }
    if let Some((bg, bh)) = p.cone_derivs(x) {
        for k in 0..n {
            g[k] += bg[k];
        }
        for (hv, bv) in h.data.iter_mut().zip(&bh.data) {
            *hv += *bv;
        }
    }
    (g, h)
}

/// Centering: minimizes the barrier potential at fixed `t`. Returns the number of steps
/// and the final squared Newton decrement. `stop` is checked after every accepted step.
fn center<T: Real, P: BarrierProblem<T> + ?Sized>(
    p: &P,
    x: &mut Vec<T>,
    t: T,
    with_obj: bool,
    opts: &SolverOptions,
    stop: &dyn Fn(&[T]) -> bool,
) -> (usize, T) {
    let n = p.dim();
    let mut psi = match potential(p, x, t, with_obj) {
        Some(v) => v,
        None => return (0, T::infinity()),
    };
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(10.0));
    let mut lam2 = T::infinity();
    for step in 0..opts.max_newton {
        let (g, h) = newton_system(p, x, t, with_obj);
        let neg: Vec<T> = g.iter().map(|v| -*v).collect();
        let dx = match solve_spd(&h, &neg) {
            Some(d) => d,
            None => return (step, lam2),
        };
        lam2 = -(0..n).map(|k| g[k] * dx[k]).sum::<T>();
        if !(lam2 > T::zero()) || lam2 * T::lit(0.5) <= tol * psi.abs().max(T::one()) {
            return (step, lam2.max(T::zero()));
        }
        let mut s = T::one();
        let mut accepted = false;
        for _ in 0..80 {
            let trial: Vec<T> = (0..n).map(|k| x[k] + s * dx[k]).collect();
            if let Some(v) = potential(p, &trial, t, with_obj) {
                if v <= psi - T::lit(0.25) * s * lam2 {
                    *x = trial;
                    psi = v;
                    accepted = true;
                    break;
                }
            }
            s *= T::lit(0.5);
        }
        if !accepted {
            return (step, lam2);
        }
        if stop(x) {
            return (step + 1, lam2);
        }
    }
    (opts.max_newton, lam2)
}

/// Maximizes `p`'s objective from a strictly feasible `x0`.
pub(crate) fn maximize<T: Real, P: BarrierProblem<T> + ?Sized>(
    p: &P,
    x0: &[T],
    opts: &SolverOptions,
) -> Result<BarrierResult<T>, BarrierError> {
    let mut x = x0.to_vec();
    if potential(p, &x, T::one(), true).is_none() {
        return Err(BarrierError::BadStart);
    }
    let m = T::lit((p.num_constraints() + p.cone_degree()) as f64);
    let mu = T::lit(opts.barrier_mu);
    let target = T::lit(opts.inner_tol);
    let mut t = T::one();
    let mut steps = 0;
    let mut lam2;
    let no_stop = |_: &[T]| false;
    loop {
        let (k, l) = center(p, &mut x, t, true, opts, &no_stop);
        steps += k;
        lam2 = l;
        if m == T::zero() || m / t <= target || t > T::lit(1e300) {
            break;
        }
        if opts.expired() {
            break;
        }
        t *= mu;
    }
    let objective = p.objective(&x).unwrap_or(T::neg_infinity());
    let gap = if m == T::zero() { T::zero() } else { m / t };
    Ok(BarrierResult {
        kkt_residual: gap + lam2.max(T::zero()).sqrt() / t,
        converged: gap <= target * T::lit(1.0001),
        x,
        objective,
        newton_steps: steps,
    })
}

/// Phase-1 auxiliary problem: minimize s subject to c_i(x) ≤ s, s ≥ −1, keeping the cone.
struct Phase1<'a, T: Real, P: BarrierProblem<T> + ?Sized> {
    inner: &'a P,
    _t: std::marker::PhantomData<T>,
}

impl<T: Real, P: BarrierProblem<T> + ?Sized> BarrierProblem<T> for Phase1<'_, T, P> {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }
    fn num_constraints(&self) -> usize {
        self.inner.num_constraints() + 1
    }
    fn objective(&self, x: &[T]) -> Option<T> {
        Some(-x[x.len() - 1])
    }
    fn objective_derivs(&self, x: &[T]) -> (Vec<T>, RealMatrix<T>) {
        let n = x.len();
        let mut g = vec![T::zero(); n];
        g[n - 1] = -T::one();
        (g, RealMatrix::zeros(n))
    }
    fn constraint(&self, i: usize, x: &[T]) -> T {
        let n = x.len();
        let s = x[n - 1];
        if i == self.inner.num_constraints() {
            -T::one() - s
        } else {
            self.inner.constraint(i, &x[..n - 1]) - s
        }
    }
    fn constraint_derivs(&self, i: usize, x: &[T]) -> (Vec<T>, Option<RealMatrix<T>>) {
        let n = x.len();
        if i == self.inner.num_constraints() {
            let mut g = vec![T::zero(); n];
            g[n - 1] = -T::one();
            return (g, None);
        }
        let (cg, ch) = self.inner.constraint_derivs(i, &x[..n - 1]);
        let mut g = cg;
        g.push(-T::one());
        let h = ch.map(|ch| {
            let mut h = RealMatrix::zeros(n);
            for r in 0..n - 1 {
                for c in 0..n - 1 {
                    h.data[r * n + c] = ch.get(r, c);
                }
            }
            h
        });
        (g, h)
    }
    fn cone(&self, x: &[T]) -> Option<T> {
        self.inner.cone(&x[..x.len() - 1])
    }
    fn cone_derivs(&self, x: &[T]) -> Option<(Vec<T>, RealMatrix<T>)> {
        let n = x.len();
        self.inner.cone_derivs(&x[..n - 1]).map(|(g, h)| {
            let mut gg = g;
            gg.push(T::zero());
            let mut hh = RealMatrix::zeros(n);
            for r in 0..n - 1 {
                for c in 0..n - 1 {
                    hh.data[r * n + c] = h.get(r, c);
                }
            }
            (gg, hh)
        })
    }
    fn cone_degree(&self) -> usize {
        self.inner.cone_degree()
    }
}

/// True when every constraint is strictly satisfied and `x` is inside the cone.
pub(crate) fn strictly_feasible<T: Real, P: BarrierProblem<T> + ?Sized>(p: &P, x: &[T]) -> bool {
    p.cone(x).is_some() && (0..p.num_constraints()).all(|i| p.constraint(i, x) < T::zero())
}

/// Finds a strictly feasible point starting from `x0` (which must lie in the cone interior).
pub(crate) fn phase1<T: Real, P: BarrierProblem<T> + ?Sized>(
    p: &P,
    x0: &[T],
    opts: &SolverOptions,
) -> Result<Vec<T>, BarrierError> {
    if strictly_feasible(p, x0) {
        return Ok(x0.to_vec());
    }
    if p.cone(x0).is_none() {
        return Err(BarrierError::BadStart);
    }
    let aux = Phase1 { inner: p, _t: std::marker::PhantomData };
    let worst = (0..p.num_constraints()).fold(T::neg_infinity(), |m, i| m.max(p.constraint(i, x0)));
    let s0 = worst.max(T::zero()) * T::lit(1.5) + T::one();
    let mut x = x0.to_vec();
    x.push(s0);
    let stop = |y: &[T]| y[y.len() - 1] < T::zero() && strictly_feasible(p, &y[..y.len() - 1]);
    let m = T::lit((aux.num_constraints() + aux.cone_degree()) as f64);
    let mut t = T::one();
    for _ in 0..40 {
        center(&aux, &mut x, t, true, opts, &stop);
        if stop(&x) {
            x.pop();
            return Ok(x);
        }
        if m / t <= T::lit(1e-14) || opts.expired() {
            break;
        }
        t *= T::lit(opts.barrier_mu);
    }
    Err(BarrierError::EmptyInterior)
}
