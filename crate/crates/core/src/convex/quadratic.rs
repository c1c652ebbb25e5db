use num_complex::Complex;

use super::barrier::{self, BarrierError, BarrierProblem};
use super::options::{SolveReport, SolverOptions, Termination};
use crate::error::{Error, Result};
use crate::numerics::dense::RealMatrix;
use crate::numerics::{dot, hermitian_eig, norm, ComplexMatrix};
use crate::scalar::{Cx, Real};

/// Concave function of a complex vector.
///
/// Gradients are packed as ∂f/∂Re(q) + i·∂f/∂Im(q); Hessians are real 2n×2n in
/// [Re; Im] variable order.
pub trait ConcaveObjective<T: Real> {
    fn dim(&self) -> usize;
    /// Value, or None outside the domain.
    fn value(&self, q: &[Cx<T>]) -> Option<T>;
    fn gradient(&self, q: &[Cx<T>]) -> Vec<Cx<T>>;
    fn hessian(&self, q: &[Cx<T>]) -> RealMatrix<T>;
}

/// qᴴAq − 2Re{cᴴq} + d ≤ 0 with A ⪰ 0 (A = None for an affine constraint).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConstraint<T> {
    pub a: Option<ComplexMatrix<T>>,
    pub c: Vec<Cx<T>>,
    pub d: T,
}

impl<T: Real> QuadConstraint<T> {
    pub fn eval(&self, q: &[Cx<T>]) -> T {
        let quad = self.a.as_ref().map_or(T::zero(), |a| dot(q, &a.mv(q)).re);
        quad - T::two() * dot(&self.c, q).re + self.d
    }

    /// Packed gradient 2Aq − 2c.
    pub fn gradient(&self, q: &[Cx<T>]) -> Vec<Cx<T>> {
        let two = T::two();
        match &self.a {
            Some(a) => a.mv(q).iter().zip(&self.c).map(|(&x, &c)| (x - c) * two).collect(),
            None => self.c.iter().map(|&c| -c * two).collect(),
        }
    }

    /// ‖q‖² ≤ r2.
    pub fn ball(n: usize, r2: T) -> Self {
        Self { a: Some(ComplexMatrix::identity(n)), c: vec![Complex::new(T::zero(), T::zero()); n], d: -r2 }
    }
}

/// Real Hessian 2·[[Re A, −Im A], [Im A, Re A]] of qᴴAq.
pub fn quad_hessian<T: Real>(a: &ComplexMatrix<T>) -> RealMatrix<T> {
    let n = a.rows();
    let mut h = RealMatrix::zeros(2 * n);
    let two = T::two();
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            h.data[i * 2 * n + j] = two * z.re;
            h.data[i * 2 * n + n + j] = -two * z.im;
            h.data[(n + i) * 2 * n + j] = two * z.im;
            h.data[(n + i) * 2 * n + n + j] = two * z.re;
        }
    }
    h
}

pub(crate) fn pack<T: Real>(q: &[Cx<T>]) -> Vec<T> {
    q.iter().map(|z| z.re).chain(q.iter().map(|z| z.im)).collect()
}

pub(crate) fn unpack<T: Real>(x: &[T]) -> Vec<Cx<T>> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex::new(x[i], x[n + i])).collect()
}

fn packed_real<T: Real>(g: &[Cx<T>]) -> Vec<T> {
    pack(g)
}

struct Adapter<'a, T: Real, O: ConcaveObjective<T> + ?Sized> {
    obj: &'a O,
    cons: Vec<QuadConstraint<T>>,
    scales: Vec<T>,
    hess: Vec<Option<RealMatrix<T>>>,
}

impl<T: Real, O: ConcaveObjective<T> + ?Sized> BarrierProblem<T> for Adapter<'_, T, O> {
    fn dim(&self) -> usize {
        2 * self.obj.dim()
    }
    fn num_constraints(&self) -> usize {
        self.cons.len()
    }
    fn objective(&self, x: &[T]) -> Option<T> {
        self.obj.value(&unpack(x))
    }
    fn objective_derivs(&self, x: &[T]) -> (Vec<T>, RealMatrix<T>) {
        let q = unpack(x);
        (packed_real(&self.obj.gradient(&q)), self.obj.hessian(&q))
    }
    fn constraint(&self, i: usize, x: &[T]) -> T {
        self.cons[i].eval(&unpack(x)) / self.scales[i]
    }
    fn constraint_derivs(&self, i: usize, x: &[T]) -> (Vec<T>, Option<RealMatrix<T>>) {
        let s = self.scales[i];
        let g = packed_real(&self.cons[i].gradient(&unpack(x))).into_iter().map(|v| v / s).collect();
        (g, self.hess[i].clone())
    }
}

/// Maximizes a concave objective over the intersection of convex quadratic constraints
/// and the ball ‖q‖² ≤ `ball`, starting from `start` (phase-1 is run if it is not
/// strictly feasible).
pub fn solve_concave_quadratic<T: Real, O: ConcaveObjective<T> + ?Sized>(
    objective: &O,
    constraints: &[QuadConstraint<T>],
    ball: Option<T>,
    start: &[Cx<T>],
    opts: &SolverOptions,
) -> Result<(Vec<Cx<T>>, SolveReport)> {
    let n = objective.dim();
    if start.len() != n {
        return Err(Error::Dimension { op: "solve_concave_quadratic", detail: format!("start has {} entries, expected {n}", start.len()) });
    }
    let mut cons: Vec<QuadConstraint<T>> = Vec::with_capacity(constraints.len() + 1);
    for c in constraints {
        if c.c.len() != n || c.a.as_ref().is_some_and(|a| a.shape() != (n, n)) {
            return Err(Error::Dimension { op: "QuadConstraint", detail: format!("expected dimension {n}") });
        }
        if let Some(a) = &c.a {
            let eig = hermitian_eig(a)?;
            let min = eig.eigenvalues.last().copied().unwrap_or(T::zero());
            if min < -T::lit(1e-9) * a.frobenius_norm() {
                return Err(Error::NotPsd { min_eigenvalue: min.as_f64() });
            }
        }
        cons.push(c.clone());
    }
    if let Some(r2) = ball {
        if !(r2 > T::zero()) {
            return Err(Error::Parameter("ball radius must be positive".into()));
        }
        cons.push(QuadConstraint::ball(n, r2));
    }
    let r = norm(start).max(ball.map_or(T::zero(), |b| b.sqrt())).max(T::min_positive_value());
    let scales: Vec<T> = cons
        .iter()
        .map(|c| {
            let s = c.d.abs() + c.a.as_ref().map_or(T::zero(), |a| a.frobenius_norm()) * r * r + T::two() * norm(&c.c) * r;
            if s > T::zero() && s.is_finite() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    let hess = cons
        .iter()
        .zip(&scales)
        .map(|(c, &s)| {
            c.a.as_ref().map(|a| {
                let mut h = quad_hessian(a);
                for v in h.data.iter_mut() {
                    *v /= s;
                }
                h
            })
        })
        .collect();
    let prob = Adapter { obj: objective, cons, scales, hess };

    let x0 = pack(start);
    let xf = barrier::phase1(&prob, &x0, opts).map_err(|e| match e {
        BarrierError::EmptyInterior => Error::Infeasible("no strictly feasible point".into()),
        BarrierError::BadStart => Error::Infeasible("start outside the problem domain".into()),
    })?;
    let res = barrier::maximize(&prob, &xf, opts).map_err(|_| Error::Infeasible("feasible point outside the objective domain".into()))?;
    let q = unpack(&res.x);
    let mut report = SolveReport::new();
    if let Some(v) = objective.value(&unpack(&xf)) {
        report.objective_trace.push(v.as_f64());
    }
    report.objective_trace.push(res.objective.as_f64());
    report.iterations = res.newton_steps;
    report.kkt_residual = res.kkt_residual.as_f64();
    report.termination = if res.converged { Termination::Converged } else { Termination::MaxIters };
    report.constraint_residuals = prob.cons.iter().map(|c| c.eval(&q).as_f64()).collect();
    Ok((q, report))
}
