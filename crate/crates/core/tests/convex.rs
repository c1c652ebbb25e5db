mod common;

use common::*;
use holobeam::convex::*;
use holobeam::numerics::dense::RealMatrix;
use holobeam::numerics::{dot, ComplexMatrix};
use holobeam::{Complex64, Result};

struct Parabola;
impl FractionalProgram<f64> for Parabola {
    type Point = f64;
    fn numerator(&self, x: &f64) -> f64 {
        10.0 - (x - 3.0).powi(2)
    }
    fn denominator(&self, _x: &f64) -> f64 {
        2.0
    }
    fn maximize_parametric(&self, _eta: f64, _w: &f64, _o: &SolverOptions) -> Result<f64> {
        Ok(3.0)
    }
}

/// (2p + 1)/(p + 1) on [0, 1].
struct Increasing;
impl FractionalProgram<f64> for Increasing {
    type Point = f64;
    fn numerator(&self, p: &f64) -> f64 {
        2.0 * p + 1.0
    }
    fn denominator(&self, p: &f64) -> f64 {
        p + 1.0
    }
    fn maximize_parametric(&self, eta: f64, _w: &f64, _o: &SolverOptions) -> Result<f64> {
        Ok(if 2.0 - eta > 0.0 { 1.0 } else { 0.0 })
    }
}

#[test]
fn dinkelbach_examples() {
    let opts = SolverOptions::default();
    let (x, rep) = dinkelbach(&Parabola, 0.0, &opts).unwrap();
    assert_eq!(x, 3.0);
    assert!((rep.final_objective().unwrap() - 5.0).abs() < 1e-15);
    assert!(rep.is_nondecreasing(0.0));

    let (p, rep) = dinkelbach(&Increasing, 0.0, &opts).unwrap();
    assert_eq!(p, 1.0);
    assert!((rep.final_objective().unwrap() - 1.5).abs() < 1e-15);
    assert!(rep.dinkelbach_certificates.iter().all(|c| *c <= opts.obj_tol));
}

fn diag(v: &[f64]) -> ComplexMatrix<f64> {
    ComplexMatrix::from_diag(&v.iter().map(|x| c(*x, 0.0)).collect::<Vec<_>>())
}

#[test]
fn maxdet_zero_weights_keeps_x_at_zero() {
    let p = MaxDetProblem {
        terms: vec![MaxDetTerm { weight: 0.0f64, map: ComplexMatrix::identity(2) }],
        sigma2: 1.0,
        linear_cost: Some(ComplexMatrix::identity(2)),
        trace_constraints: vec![TraceConstraint { d: ComplexMatrix::identity(2), bound: 1.0 }],
        lmi_link: None,
    };
    let s = solve_maxdet(&p, None, &SolverOptions::default()).unwrap();
    assert!(s.x.trace().re < 1e-8);
    assert!(s.objective.abs() < 1e-8);
}

fn weighted_trace_problem(bounds: &[f64]) -> MaxDetProblem<f64> {
    let mut cons = vec![TraceConstraint { d: diag(&[1.0, 2.0]), bound: 2.0 }];
    cons.extend(bounds.iter().map(|&b| TraceConstraint { d: ComplexMatrix::identity(2), bound: b }));
    MaxDetProblem {
        terms: vec![MaxDetTerm { weight: 1.0, map: ComplexMatrix::identity(2) }],
        sigma2: 1.0,
        linear_cost: None,
        trace_constraints: cons,
        lmi_link: None,
    }
}

#[test]
fn maxdet_diagonal_matches_grid() {
    // diagonal optimum by Hadamard; grid over x1 with x2 = (2 - x1)/2
    let mut best = f64::MIN;
    let mut k = 0.0f64;
    while k <= 2.0 {
        let v = ((1.0 + k) * (1.0 + (2.0 - k) / 2.0)).log2();
        best = best.max(v);
        k += 1e-4;
    }
    let s = solve_maxdet(&weighted_trace_problem(&[]), None, &SolverOptions::default()).unwrap();
    assert!((s.objective - best).abs() < 1e-6);
    assert!((s.x[(0, 0)].re - 1.5).abs() < 1e-5 && (s.x[(1, 1)].re - 0.25).abs() < 1e-5);
    assert!(s.x[(0, 1)].norm() < 1e-6);

    let loose = solve_maxdet(&weighted_trace_problem(&[100.0]), None, &SolverOptions::default()).unwrap();
    assert!((loose.objective - s.objective).abs() < 1e-7);
    assert!(loose.report.constraint_residuals[1] < -90.0);
}

#[test]
fn maxdet_random_respects_constraints() {
    let mut r = rng(4);
    let x = cmat(&mut r, 3, 3);
    let p = MaxDetProblem {
        terms: vec![MaxDetTerm { weight: 0.7, map: cmat(&mut r, 2, 3) }, MaxDetTerm { weight: 0.2, map: cmat(&mut r, 2, 3) }],
        sigma2: 0.5,
        linear_cost: None,
        trace_constraints: vec![
            TraceConstraint { d: ComplexMatrix::identity(3), bound: 1.0 },
            TraceConstraint { d: x.mul(&x.adjoint()), bound: 0.5 },
        ],
        lmi_link: None,
    };
    let s = solve_maxdet(&p, None, &SolverOptions::default()).unwrap();
    for (res, con) in s.report.constraint_residuals.iter().zip(&p.trace_constraints) {
        assert!(*res <= 1e-8 * con.bound);
    }
    // no random feasible point beats the solver
    for _ in 0..2000 {
        let y = cmat(&mut r, 3, 3);
        let mut cand = y.mul(&y.adjoint());
        let scale = p.trace_constraints.iter().map(|t| t.bound / t.d.mul(&cand).trace().re).fold(f64::MAX, f64::min);
        cand = cand.scale(scale);
        assert!(p.objective(&cand).unwrap() <= s.objective + 1e-9);
    }
}

/// 2Re{cᴴq} − qᴴBq.
struct ConcaveQuad {
    c: Vec<Complex64>,
    b: ComplexMatrix<f64>,
}
impl ConcaveObjective<f64> for ConcaveQuad {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, q: &[Complex64]) -> Option<f64> {
        Some(2.0 * dot(&self.c, q).re - dot(q, &self.b.mv(q)).re)
    }
    fn gradient(&self, q: &[Complex64]) -> Vec<Complex64> {
        self.b.mv(q).iter().zip(&self.c).map(|(bq, c)| (c - bq) * 2.0).collect()
    }
    fn hessian(&self, _q: &[Complex64]) -> RealMatrix<f64> {
        let mut h = quad_hessian(&self.b);
        for v in h.data.iter_mut() {
            *v = -*v;
        }
        h
    }
}

#[test]
fn concave_quadratic_active_constraint_matches_grid() {
    let obj = ConcaveQuad { c: vec![c(2.0, 1.0), c(-1.0, 2.0)], b: diag(&[0.1, 0.2]) };
    let a = ComplexMatrix::from_fn(2, 2, |i, j| [[c(1.0, 0.0), c(0.3, 0.4)], [c(0.3, -0.4), c(2.0, 0.0)]][i][j]);
    let con = QuadConstraint { a: Some(a.clone()), c: vec![c(0.0, 0.0); 2], d: -0.5 };
    let (q, rep) = solve_concave_quadratic(&obj, std::slice::from_ref(&con), Some(1.0), &[c(0.0, 0.0); 2], &SolverOptions::default()).unwrap();
    let got = obj.value(&q).unwrap();
    assert!(con.eval(&q) <= 1e-8);
    assert!(con.eval(&q) > -1e-6, "constraint should be active");
    assert_eq!(rep.termination, Termination::Converged);

    let step = 0.02;
    let n = (1.0 / step) as i32;
    let mut best = f64::MIN;
    let mut arg = [c(0.0, 0.0); 2];
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                for l in -n..=n {
                    let z = [c(i as f64 * step, j as f64 * step), c(k as f64 * step, l as f64 * step)];
                    if sq(&z) <= 1.0 && con.eval(&z) <= 0.0 && obj.value(&z).unwrap() > best {
                        best = obj.value(&z).unwrap();
                        arg = z;
                    }
                }
            }
        }
    }
    assert!(got >= best - 1e-9);
    // feasible random descent from the best grid point
    let mut r = rng(8);
    let mut rad = step;
    for _ in 0..200_000 {
        let d = cvec(&mut r, 2);
        let z = [arg[0] + d[0] * rad, arg[1] + d[1] * rad];
        if sq(&z) <= 1.0 && con.eval(&z) <= 0.0 && obj.value(&z).unwrap() > best {
            best = obj.value(&z).unwrap();
            arg = z;
        } else {
            rad = (rad * 0.9995).max(1e-9);
        }
    }
    assert!(got >= best - 1e-9);
    assert!(got - best < 1e-5 * got.abs(), "{got} vs {best}");
}
