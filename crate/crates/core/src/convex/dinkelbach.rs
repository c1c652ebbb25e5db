use crate::error::Result;
use crate::scalar::Real;

use super::options::{SolveReport, SolverOptions, Termination};

/// Ratio `numerator/denominator` of a concave numerator and a positive convex denominator
/// over a convex set, given through its parametric subproblem.
pub trait FractionalProgram<T: Real> {
    type Point: Clone;

    fn numerator(&self, x: &Self::Point) -> T;
    fn denominator(&self, x: &Self::Point) -> T;

    /// argmax over the feasible set of numerator − η·denominator, warm-started at `warm`.
    fn maximize_parametric(&self, eta: T, warm: &Self::Point, opts: &SolverOptions) -> Result<Self::Point>;
}

/// Dinkelbach's algorithm from the feasible point `x0`.
///
/// Iterates η ← num(x)/den(x) and x ← argmax{num − η·den} until |F(η)| ≤ `obj_tol`.
/// The ratio trace is nondecreasing; an inner solve that does not raise the ratio ends the loop.
pub fn dinkelbach<T: Real, P: FractionalProgram<T>>(
    program: &P,
    x0: P::Point,
    opts: &SolverOptions,
) -> Result<(P::Point, SolveReport)> {
    let mut report = SolveReport::new();
    let mut x = x0;
    let mut ratio = program.numerator(&x) / program.denominator(&x);
    report.objective_trace.push(ratio.as_f64());
    let tol = T::lit(opts.obj_tol);
    let mut last_f = T::infinity();
    report.termination = Termination::MaxIters;
    for it in 0..opts.max_iters {
        report.iterations = it + 1;
        let eta = ratio;
        let cand = program.maximize_parametric(eta, &x, opts)?;
        let f = program.numerator(&cand) - eta * program.denominator(&cand);
        let cand_ratio = program.numerator(&cand) / program.denominator(&cand);
        // F(η) ≥ 0 because the current x attains zero
        last_f = f.max(T::zero());
        if cand_ratio > ratio {
            x = cand;
            ratio = cand_ratio;
            report.objective_trace.push(ratio.as_f64());
        } else {
            report.termination = Termination::Converged;
            break;
        }
        if last_f <= tol {
            report.termination = Termination::Converged;
            break;
        }
        if opts.expired() {
            break;
        }
    }
    report.kkt_residual = last_f.as_f64();
    report.dinkelbach_certificates.push(last_f.as_f64());
    Ok((x, report))
}
