use std::f64::consts::LN_2;

use super::barrier::{self, BarrierError, BarrierProblem};
use super::options::{SolveReport, SolverOptions, Termination};
use crate::error::{Error, Result};
use crate::numerics::dense::RealMatrix;
use crate::numerics::{logdet_psd, norm_sqr, Cholesky, ComplexMatrix};
use crate::scalar::{cx, re, Cx, Real};

/// One term λ·R·X·Rᴴ of the log-det argument.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDetTerm<T> {
    pub weight: T,
    pub map: ComplexMatrix<T>,
}

/// tr(D·X) ≤ bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceConstraint<T> {
    pub d: ComplexMatrix<T>,
    pub bound: T,
}

/// Couples X with a vector γ through [[X, γ], [γᴴ, 1]] ⪰ 0 and the linearized cap
/// tr(X) + ‖γ₀‖² − 2Re{γ₀ᴴγ} ≤ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiLink<T> {
    pub gamma0: Vec<Cx<T>>,
}

/// maximize log₂|I + Σ (λ_m/σ²)·R_m X R_mᴴ| − tr(L·X) over X ⪰ 0 subject to trace
/// constraints and an optional LMI link.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDetProblem<T> {
    pub terms: Vec<MaxDetTerm<T>>,
    pub sigma2: T,
    pub linear_cost: Option<ComplexMatrix<T>>,
    pub trace_constraints: Vec<TraceConstraint<T>>,
    pub lmi_link: Option<LmiLink<T>>,
}

#[derive(Debug, Clone)]
pub struct MaxDetSolution<T> {
    pub x: ComplexMatrix<T>,
    pub gamma: Option<Vec<Cx<T>>>,
    pub objective: T,
    pub report: SolveReport,
}

impl<T: Real> MaxDetProblem<T> {
    pub fn dim(&self) -> Result<usize> {
        let n = self
            .terms
            .first()
            .map(|t| t.map.cols())
            .or_else(|| self.trace_constraints.first().map(|c| c.d.rows()))
            .or_else(|| self.linear_cost.as_ref().map(|l| l.rows()))
            .or_else(|| self.lmi_link.as_ref().map(|l| l.gamma0.len()))
            .ok_or_else(|| Error::Parameter("max-det problem has no data".into()))?;
        let rows = self.terms.first().map(|t| t.map.rows());
        for t in &self.terms {
            if t.map.cols() != n || Some(t.map.rows()) != rows {
                return Err(Error::Dimension { op: "solve_maxdet", detail: "inconsistent term maps".into() });
            }
            if !(t.weight >= T::zero()) {
                return Err(Error::Parameter("term weights must be nonnegative".into()));
            }
        }
        for c in &self.trace_constraints {
            if c.d.shape() != (n, n) {
                return Err(Error::Dimension { op: "solve_maxdet", detail: "trace constraint shape".into() });
            }
        }
        if self.linear_cost.as_ref().is_some_and(|l| l.shape() != (n, n)) {
            return Err(Error::Dimension { op: "solve_maxdet", detail: "linear cost shape".into() });
        }
        if self.lmi_link.as_ref().is_some_and(|l| l.gamma0.len() != n) {
            return Err(Error::Dimension { op: "solve_maxdet", detail: "LMI anchor length".into() });
        }
        if !(self.sigma2 > T::zero()) {
            return Err(Error::Parameter("noise power must be positive".into()));
        }
        Ok(n)
    }

    /// Objective at X.
    pub fn objective(&self, x: &ComplexMatrix<T>) -> Result<T> {
        let mut val = match self.terms.first() {
            None => T::zero(),
            Some(t0) => {
                let mut y = ComplexMatrix::identity(t0.map.rows());
                for t in &self.terms {
                    if t.weight == T::zero() {
                        continue;
                    }
                    let s = t.map.mul(x).mul(&t.map.adjoint()).scale(t.weight / self.sigma2);
                    y = y.add(&s)?;
                }
                logdet_psd(&y.hermitian_part())?
            }
        };
        if let Some(l) = &self.linear_cost {
            val -= l.mul(x).trace().re;
        }
        Ok(val)
    }

    /// Largest relative violation of the trace constraints at X.
    pub fn constraint_residuals(&self, x: &ComplexMatrix<T>) -> Vec<T> {
        self.trace_constraints.iter().map(|c| c.d.mul(x).trace().re - c.bound).collect()
    }
}

/// Coordinates of a Hermitian n×n matrix: diagonal, then (Re, Im) of each upper entry.
pub(crate) struct HermitianBasis {
    pub n: usize,
}

impl HermitianBasis {
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn to_matrix<T: Real>(&self, x: &[T]) -> ComplexMatrix<T> {
        let n = self.n;
        let mut m = ComplexMatrix::zeros(n, n);
        let mut k = n;
        for i in 0..n {
            m[(i, i)] = re(x[i]);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                m[(i, j)] = cx(x[k], x[k + 1]);
                m[(j, i)] = cx(x[k], -x[k + 1]);
                k += 2;
            }
        }
        m
    }

    pub fn from_matrix<T: Real>(&self, m: &ComplexMatrix<T>) -> Vec<T> {
        let n = self.n;
        let mut x = Vec::with_capacity(n * n);
        for i in 0..n {
            x.push(m[(i, i)].re);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * T::lit(0.5);
                x.push(z.re);
                x.push(z.im);
            }
        }
        x
    }

    /// ∂ tr(M·X)/∂x for Hermitian M.
    pub fn trace_gradient<T: Real>(&self, m: &ComplexMatrix<T>) -> Vec<T> {
        let n = self.n;
        let mut g = Vec::with_capacity(n * n);
        for i in 0..n {
            g.push(m[(i, i)].re);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let z = m[(i, j)] + m[(j, i)].conj();
                g.push(z.re);
                g.push(z.im);
            }
        }
        g
    }

    /// Calls `f(k, (i, j), coefficient)` for the nonzero entries of basis matrix B_k.
    pub fn entries<T: Real>(&self, k: usize) -> Vec<((usize, usize), Cx<T>)> {
        let n = self.n;
        if k < n {
            return vec![((k, k), re(T::one()))];
        }
        let mut idx = n;
        for i in 0..n {
            for j in (i + 1)..n {
                if k == idx {
                    return vec![((i, j), re(T::one())), ((j, i), re(T::one()))];
                }
                if k == idx + 1 {
                    return vec![((i, j), cx(T::zero(), T::one())), ((j, i), cx(T::zero(), -T::one()))];
                }
                idx += 2;
            }
        }
        unreachable!("basis index out of range")
    }

    /// Matrix P·B_k for a square P.
    pub fn right_mul<T: Real>(&self, p: &ComplexMatrix<T>, k: usize) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(p.rows(), self.n);
        for ((i, j), c) in self.entries::<T>(k) {
            for r in 0..p.rows() {
                out[(r, j)] += p[(r, i)] * c;
            }
        }
        out
    }
}

/// tr(A·B) for square matrices.
fn trace_prod<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..a.cols() {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

struct Engine<'a, T: Real> {
    p: &'a MaxDetProblem<T>,
    basis: HermitianBasis,
    /// Scaled weights λ_m/σ² of the active terms.
    active: Vec<(T, &'a ComplexMatrix<T>)>,
    cons_grad: Vec<Vec<T>>,
    cons_scale: Vec<T>,
    cost_grad: Vec<T>,
}

impl<T: Real> Engine<'_, T> {
    fn y(&self, x: &ComplexMatrix<T>) -> Option<ComplexMatrix<T>> {
        let rows = self.active.first()?.1.rows();
        let mut y = ComplexMatrix::identity(rows);
        for (w, r) in &self.active {
            y = y.add(&r.mul(x).mul(&r.adjoint()).scale(*w)).ok()?;
        }
        Some(y.hermitian_part())
    }
}

impl<T: Real> BarrierProblem<T> for Engine<'_, T> {
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn num_constraints(&self) -> usize {
        self.cons_grad.len()
    }
    fn objective(&self, x: &[T]) -> Option<T> {
        let xm = self.basis.to_matrix(x);
        let logdet = match self.y(&xm) {
            Some(y) => logdet_psd(&y).ok()?,
            None => T::zero(),
        };
        let lin: T = self.cost_grad.iter().zip(x).map(|(g, v)| *g * *v).sum();
        Some(logdet - lin)
    }
    fn objective_derivs(&self, x: &[T]) -> (Vec<T>, RealMatrix<T>) {
        let k = self.basis.len();
        let mut g: Vec<T> = self.cost_grad.iter().map(|v| -*v).collect();
        let mut h = RealMatrix::zeros(k);
        let xm = self.basis.to_matrix(x);
        if let Some(y) = self.y(&xm) {
            let inv_ln2 = T::lit(1.0 / LN_2);
            let yinv = match Cholesky::factor(&y) {
                Ok(c) => c.inverse(),
                Err(_) => return (g, h),
            };
            // M = Σ w RᴴY⁻¹R gives the gradient; P_k = Y⁻¹ S_k gives the Hessian
            let mut m = ComplexMatrix::zeros(self.basis.n, self.basis.n);
            for (w, r) in &self.active {
                m = m.add(&r.adjoint().mul(&yinv).mul(r).scale(*w)).expect("shapes");
            }
            for (gi, v) in g.iter_mut().zip(self.basis.trace_gradient(&m)) {
                *gi += v * inv_ln2;
            }
            let pk: Vec<ComplexMatrix<T>> = (0..k)
                .map(|kk| {
                    let mut s = ComplexMatrix::zeros(y.rows(), y.rows());
                    for (w, r) in &self.active {
                        let rb = self.basis.right_mul(r, kk);
                        s = s.add(&rb.mul(&r.adjoint()).scale(*w)).expect("shapes");
                    }
                    yinv.mul(&s)
                })
                .collect();
            for a in 0..k {
                for b in a..k {
                    let v = -trace_prod(&pk[a], &pk[b]) * inv_ln2;
                    h.data[a * k + b] = v;
                    h.data[b * k + a] = v;
                }
            }
        }
        (g, h)
    }
    fn constraint(&self, i: usize, x: &[T]) -> T {
        let lin: T = self.cons_grad[i].iter().zip(x).map(|(g, v)| *g * *v).sum();
        (lin - self.p.trace_constraints[i].bound) / self.cons_scale[i]
    }
    fn constraint_derivs(&self, i: usize, _x: &[T]) -> (Vec<T>, Option<RealMatrix<T>>) {
        let s = self.cons_scale[i];
        (self.cons_grad[i].iter().map(|v| *v / s).collect(), None)
    }
    fn cone(&self, x: &[T]) -> Option<T> {
        let c = Cholesky::factor(&self.basis.to_matrix(x)).ok()?;
        Some(-c.logdet2() * T::lit(LN_2))
    }
    fn cone_derivs(&self, x: &[T]) -> Option<(Vec<T>, RealMatrix<T>)> {
        let xinv = Cholesky::factor(&self.basis.to_matrix(x)).ok()?.inverse();
        let k = self.basis.len();
        let g = self.basis.trace_gradient(&xinv).into_iter().map(|v| -v).collect();
        let w: Vec<ComplexMatrix<T>> = (0..k).map(|kk| self.basis.right_mul(&xinv, kk)).collect();
        let mut h = RealMatrix::zeros(k);
        for a in 0..k {
            for b in a..k {
                let v = trace_prod(&w[a], &w[b]);
                h.data[a * k + b] = v;
                h.data[b * k + a] = v;
            }
        }
        Some((g, h))
    }
    fn cone_degree(&self) -> usize {
        self.basis.n
    }
}

/// Solves the determinant-maximization problem.
///
/// With an LMI link the feasible set in (X, γ) is the single point (γ₀γ₀ᴴ, γ₀): the LMI
/// implies tr(X) ≥ ‖γ‖² and the cap then forces ‖γ − γ₀‖² ≤ 0. That point is returned
/// when it satisfies the trace constraints; otherwise the problem is infeasible.
pub fn solve_maxdet<T: Real>(
    problem: &MaxDetProblem<T>,
    start: Option<&ComplexMatrix<T>>,
    opts: &SolverOptions,
) -> Result<MaxDetSolution<T>> {
    let n = problem.dim()?;
    let mut report = SolveReport::new();

    if let Some(link) = &problem.lmi_link {
        let g0 = &link.gamma0;
        let x = ComplexMatrix::outer(g0, g0);
        let res = problem.constraint_residuals(&x);
        let tol = T::lit(opts.feas_tol);
        for (r, c) in res.iter().zip(&problem.trace_constraints) {
            if *r > tol * c.bound.abs().max(c.d.frobenius_norm() * norm_sqr(g0)).max(T::lit(1e-300)) {
                report.termination = Termination::Infeasible;
                return Err(Error::Infeasible(format!("linked point violates a trace constraint by {r}")));
            }
        }
        let obj = problem.objective(&x)?;
        report.objective_trace.push(obj.as_f64());
        report.constraint_residuals = res.iter().map(|r| r.as_f64()).collect();
        report.iterations = 1;
        report.notes.push("LMI link admits a single feasible point".into());
        return Ok(MaxDetSolution { x, gamma: Some(g0.clone()), objective: obj, report });
    }

    let basis = HermitianBasis { n };
    let active = problem
        .terms
        .iter()
        .filter(|t| t.weight > T::zero())
        .map(|t| (t.weight / problem.sigma2, &t.map))
        .collect();
    let cons_grad: Vec<Vec<T>> =
        problem.trace_constraints.iter().map(|c| basis.trace_gradient(&c.d.hermitian_part())).collect();
    // size of X implied by the constraints, used to normalize them
    let size = problem
        .trace_constraints
        .iter()
        .filter_map(|c| {
            let tr = c.d.trace().re;
            (c.bound > T::zero() && tr > T::zero()).then(|| c.bound / tr)
        })
        .fold(T::zero(), |a, b| a.max(b));
    let size = if size > T::zero() { size } else { T::one() };
    let cons_scale = problem
        .trace_constraints
        .iter()
        .map(|c| {
            let s = c.bound.abs() + c.d.frobenius_norm() * size;
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    let cost_grad = match &problem.linear_cost {
        Some(l) => basis.trace_gradient(&l.hermitian_part()),
        None => vec![T::zero(); basis.len()],
    };
    let engine = Engine { p: problem, basis, active, cons_grad, cons_scale, cost_grad };

    let eps_start = ComplexMatrix::identity(n).scale(size * T::lit(0.5) / T::lit(n as f64));
    let x0 = match start {
        Some(s) => {
            // pull the warm start into the cone interior
            let blend = s.scale(T::lit(0.9)).add(&eps_start.scale(T::lit(0.1)))?;
            let xs = engine.basis.from_matrix(&blend);
            if barrier::strictly_feasible(&engine, &xs) {
                xs
            } else {
                engine.basis.from_matrix(&eps_start)
            }
        }
        None => engine.basis.from_matrix(&eps_start),
    };
    let xf = barrier::phase1(&engine, &x0, opts).map_err(|e| match e {
        BarrierError::EmptyInterior => Error::Infeasible("trace constraints have no strictly feasible PSD point".into()),
        BarrierError::BadStart => Error::Infeasible("start outside the PSD cone".into()),
    })?;
    if let Some(v) = engine.objective(&xf) {
        report.objective_trace.push(v.as_f64());
    }
    let res = barrier::maximize(&engine, &xf, opts).map_err(|_| Error::Infeasible("start outside the objective domain".into()))?;
    let x = engine.basis.to_matrix(&res.x);
    report.objective_trace.push(res.objective.as_f64());
    report.iterations = res.newton_steps;
    report.kkt_residual = res.kkt_residual.as_f64();
    report.termination = if res.converged { Termination::Converged } else { Termination::MaxIters };
    report.constraint_residuals = problem.constraint_residuals(&x).iter().map(|r| r.as_f64()).collect();
    Ok(MaxDetSolution { x, gamma: None, objective: res.objective, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_linked_example() {
        let p = MaxDetProblem {
            terms: vec![MaxDetTerm { weight: 4.0, map: ComplexMatrix::identity(1) }],
            sigma2: 1.0,
            linear_cost: None,
            trace_constraints: vec![TraceConstraint { d: ComplexMatrix::identity(1), bound: 1.0 }],
            lmi_link: Some(LmiLink { gamma0: vec![re(1.0)] }),
        };
        let s = solve_maxdet(&p, None, &SolverOptions::default()).unwrap();
        assert!((s.objective - 5f64.log2()).abs() < 1e-12);
        assert_eq!(s.gamma.unwrap(), vec![re(1.0)]);
    }

    #[test]
    fn scalar_unlinked_bound() {
        let p = MaxDetProblem {
            terms: vec![MaxDetTerm { weight: 4.0, map: ComplexMatrix::identity(1) }],
            sigma2: 1.0,
            linear_cost: None,
            trace_constraints: vec![TraceConstraint { d: ComplexMatrix::identity(1), bound: 1.0 }],
            lmi_link: None,
        };
        let s = solve_maxdet(&p, None, &SolverOptions::default()).unwrap();
        assert!((s.objective - 5f64.log2()).abs() < 1e-9, "{}", s.objective);
    }

    #[test]
    fn basis_roundtrip() {
        let b = HermitianBasis { n: 3 };
        let x: Vec<f64> = (0..9).map(|i| i as f64 * 0.3 - 1.0).collect();
        let m = b.to_matrix(&x);
        assert!(m.is_hermitian(0.0));
        assert_eq!(b.from_matrix(&m), x);
    }
}
