//! General MIMO: surface steps for Γ_R and Γ_T, a Dinkelbach step for Q, and their
//! alternation.
//!
//! Each surface step maximizes log₂|I + Σ_m (w_m/σ²)·R_m γγᴴ R_mᴴ| over γ under the
//! global reflection constraints. The lifted variable Γ̃ = γγᴴ is rank one by
//! construction. Every iteration solves a convex-constrained local problem: Newton on the
//! exact log-det first, and if that does not improve, the concave MSE-based minorizer
//! (tight at the current point), which always does unless the point is stationary.
//! The non-convex transmit-side reflection constraint is handled by its DC inner
//! approximation around the current point.

use crate::channel::ChannelSet;
use crate::convex::{
    dinkelbach, quad_hessian, solve_concave_quadratic, solve_maxdet, ConcaveObjective, FractionalProgram,
    MaxDetProblem, MaxDetTerm, QuadConstraint, SolveReport, SolverOptions, Termination, TraceConstraint,
};
use crate::error::{Error, Result};
use crate::numerics::dense::RealMatrix;
use crate::numerics::{dot, hermitian_eig, logdet_psd, Cholesky, ComplexMatrix};
use crate::power::{capacity, Mode, PowerModel, SurfaceState, TransmitState};
use crate::reflection::{common_null_space, split, Split};
use crate::scalar::{re, Cx, Real};
use crate::single_stream::reflection_forms;

/// Relative threshold below which eigen-weights are dropped from the m-sum.
pub const WEIGHT_TRUNCATION: f64 = 1e-12;

/// Surface elements whose incident power is below this fraction of the largest are left
/// unchanged by a surface step (they carry no power).
pub const DARK_ELEMENT_TOL: f64 = 1e-14;

/// Data of one surface step: maximize log₂|I + Σ (w_m/σ²)·R_m γγᴴ R_mᴴ| subject to
/// γᴴDγ ≤ b and, for the transmit surface, γᴴ(E₁ − E₂)γ ≤ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSubproblem<T> {
    pub weights: Vec<T>,
    pub maps: Vec<ComplexMatrix<T>>,
    pub trace_matrix: ComplexMatrix<T>,
    pub trace_bound: T,
    pub extra_trace_pair: Option<(ComplexMatrix<T>, ComplexMatrix<T>)>,
    pub sigma2: T,
}

impl<T: Real> SurfaceSubproblem<T> {
    pub fn dim(&self) -> usize {
        self.trace_matrix.rows()
    }

    /// Exact objective in bits/s/Hz.
    pub fn objective(&self, gamma: &[Cx<T>]) -> Result<T> {
        match self.maps.first() {
            None => Ok(T::zero()),
            Some(r0) => {
                let x = self.stacked(gamma);
                let y = ComplexMatrix::identity(r0.rows()).add(&x.gram_left())?;
                logdet_psd(&y.hermitian_part())
            }
        }
    }

    /// X(γ) with columns √w_m/σ·R_m γ.
    fn stacked(&self, gamma: &[Cx<T>]) -> ComplexMatrix<T> {
        let rows = self.maps.first().map_or(0, |m| m.rows());
        let mut x = ComplexMatrix::zeros(rows, self.maps.len());
        let inv_sigma = T::one() / self.sigma2.sqrt();
        for (k, (w, r)) in self.weights.iter().zip(&self.maps).enumerate() {
            let col = r.mv(gamma);
            let s = w.sqrt() * inv_sigma;
            for i in 0..rows {
                x[(i, k)] = col[i] * s;
            }
        }
        x
    }

    /// (γᴴDγ − b, γᴴ(E₁−E₂)γ).
    pub fn constraint_residuals(&self, gamma: &[Cx<T>]) -> (T, Option<T>) {
        let d = dot(gamma, &self.trace_matrix.mv(gamma)).re - self.trace_bound;
        let e = self.extra_trace_pair.as_ref().map(|(e1, e2)| dot(gamma, &e1.mv(gamma)).re - dot(gamma, &e2.mv(gamma)).re);
        (d, e)
    }
}

fn check_q<T: Real>(channels: &ChannelSet<T>, q: &ComplexMatrix<T>) -> Result<()> {
    let n_t = channels.dims().n_t;
    if q.shape() != (n_t, n_t) {
        return Err(Error::Dimension { op: "transmit covariance", detail: format!("{:?} for N_T = {n_t}", q.shape()) });
    }
    Ok(())
}

fn eigen_terms<T: Real>(
    x: &ComplexMatrix<T>,
    map: impl Fn(&[Cx<T>]) -> ComplexMatrix<T>,
) -> Result<(Vec<T>, Vec<ComplexMatrix<T>>)> {
    let eig = hermitian_eig(&x.hermitian_part())?;
    let top = eig.eigenvalues.first().copied().unwrap_or(T::zero()).max(T::zero());
    let mut weights = Vec::new();
    let mut maps = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > T::lit(WEIGHT_TRUNCATION) * top && l > T::zero() {
            weights.push(l);
            maps.push(map(&eig.vector(i)));
        }
    }
    Ok((weights, maps))
}

fn diag_part<T: Real>(x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    ComplexMatrix::from_diag(&x.diag().iter().map(|z| re(z.re.max(T::zero()))).collect::<Vec<_>>())
}

/// Γ_R step data for fixed Γ_T and Q: B = CΓ_T HQHᴴ Γ_Tᴴ Cᴴ = Σ λ_m u_m u_mᴴ,
/// R_m = G·diag(u_m), D_R = diag(diag(B)), bound tr(B).
pub fn build_gamma_r_subproblem<T: Real>(
    channels: &ChannelSet<T>,
    gamma_t: &[Cx<T>],
    q: &ComplexMatrix<T>,
    sigma2: T,
) -> Result<SurfaceSubproblem<T>> {
    channels.validate()?;
    check_q(channels, q)?;
    let ct_h = channels.c.mul(&channels.h.scale_rows(gamma_t));
    let b = ct_h.mul(q).mul(&ct_h.adjoint()).hermitian_part();
    let (weights, maps) = eigen_terms(&b, |u| channels.g.scale_cols(u))?;
    Ok(SurfaceSubproblem {
        weights,
        maps,
        trace_matrix: diag_part(&b),
        trace_bound: b.trace().re.max(T::zero()),
        extra_trace_pair: None,
        sigma2,
    })
}

/// Γ_T step data for fixed Γ_R and Q: A = HQHᴴ = Σ β_m v_m v_mᴴ, S_m = GΓ_RC·diag(v_m),
/// D_T = diag(diag(A)), bound tr(A), E₁ = (ZᴴZ)∘Aᵀ with Z = Γ_R C, E₂ = (CᴴC)∘Aᵀ.
pub fn build_gamma_t_subproblem<T: Real>(
    channels: &ChannelSet<T>,
    gamma_r: &[Cx<T>],
    q: &ComplexMatrix<T>,
    sigma2: T,
) -> Result<SurfaceSubproblem<T>> {
    channels.validate()?;
    check_q(channels, q)?;
    let a = channels.h.mul(q).mul(&channels.h.adjoint()).hermitian_part();
    let z = channels.c.scale_rows(gamma_r);
    let f = channels.g.mul(&z);
    let (weights, maps) = eigen_terms(&a, |v| f.scale_cols(v))?;
    let at = a.transpose();
    let e1 = z.gram_right().hadamard(&at)?.hermitian_part();
    let e2 = channels.c.gram_right().hadamard(&at)?.hermitian_part();
    Ok(SurfaceSubproblem {
        weights,
        maps,
        trace_matrix: diag_part(&a),
        trace_bound: a.trace().re.max(T::zero()),
        extra_trace_pair: Some((e1, e2)),
        sigma2,
    })
}

/// (2Re{cᴴζ} − ζᴴAζ)/ln2.
struct Minorizer<T> {
    a: ComplexMatrix<T>,
    c: Vec<Cx<T>>,
}

impl<T: Real> ConcaveObjective<T> for Minorizer<T> {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, z: &[Cx<T>]) -> Option<T> {
        Some((T::two() * dot(&self.c, z).re - dot(z, &self.a.mv(z)).re) / T::LN_2())
    }
    fn gradient(&self, z: &[Cx<T>]) -> Vec<Cx<T>> {
        let az = self.a.mv(z);
        let s = T::two() / T::LN_2();
        self.c.iter().zip(&az).map(|(&c, &x)| (c - x) * s).collect()
    }
    fn hessian(&self, _z: &[Cx<T>]) -> RealMatrix<T> {
        let mut h = quad_hessian(&self.a);
        let s = -T::one() / T::LN_2();
        for v in h.data.iter_mut() {
            *v *= s;
        }
        h
    }
}

/// log₂|I + Σ_m R̃_m zzᴴ R̃_mᴴ| with exact derivatives (not concave; the barrier engine
/// treats it as a local model with a ridge-regularized Newton system).
struct ExactLogDet<T> {
    maps: Vec<ComplexMatrix<T>>,
}

impl<T: Real> ExactLogDet<T> {
    fn gram(&self, z: &[Cx<T>]) -> (Vec<Vec<Cx<T>>>, ComplexMatrix<T>) {
        let rows = self.maps[0].rows();
        let us: Vec<Vec<Cx<T>>> = self.maps.iter().map(|r| r.mv(z)).collect();
        let mut y = ComplexMatrix::identity(rows);
        for u in &us {
            y = y.add(&ComplexMatrix::outer(u, u)).expect("shapes");
        }
        (us, y.hermitian_part())
    }
}

impl<T: Real> ConcaveObjective<T> for ExactLogDet<T> {
    fn dim(&self) -> usize {
        self.maps[0].cols()
    }
    fn value(&self, z: &[Cx<T>]) -> Option<T> {
        logdet_psd(&self.gram(z).1).ok()
    }
    fn gradient(&self, z: &[Cx<T>]) -> Vec<Cx<T>> {
        let (us, y) = self.gram(z);
        let chol = match Cholesky::factor(&y) {
            Ok(c) => c,
            Err(_) => return vec![re(T::zero()); z.len()],
        };
        let s = T::two() / T::LN_2();
        let mut g = vec![re(T::zero()); z.len()];
        for (r, u) in self.maps.iter().zip(&us) {
            let pu = chol.solve_vec(u);
            for (gi, v) in g.iter_mut().zip(r.adj_mv(&pu)) {
                *gi += v * s;
            }
        }
        g
    }
    fn hessian(&self, z: &[Cx<T>]) -> RealMatrix<T> {
        let n = z.len();
        let (us, y) = self.gram(z);
        let p = match Cholesky::factor(&y) {
            Ok(c) => c.inverse(),
            Err(_) => return RealMatrix::zeros(2 * n),
        };
        let rows = p.rows();
        let mut s = ComplexMatrix::zeros(n, n);
        for r in &self.maps {
            s = s.add(&r.adjoint().mul(&p).mul(r)).expect("shapes");
        }
        let mut h = quad_hessian(&s.hermitian_part());
        // W_k = P·Δ_k with Δ_k = Σ_m u_m v_mkᴴ + v_mk u_mᴴ, v_mk = R̃_m d_k
        let imag = Cx::new(T::zero(), T::one());
        let ws: Vec<ComplexMatrix<T>> = (0..2 * n)
            .map(|k| {
                let (j, ph) = if k < n { (k, re(T::one())) } else { (k - n, imag) };
                let mut delta = ComplexMatrix::zeros(rows, rows);
                for (r, u) in self.maps.iter().zip(&us) {
                    let v: Vec<Cx<T>> = (0..rows).map(|i| r[(i, j)] * ph).collect();
                    let a = ComplexMatrix::outer(u, &v);
                    delta = delta.add(&a.add(&a.adjoint()).expect("shapes")).expect("shapes");
                }
                p.mul(&delta)
            })
            .collect();
        for k in 0..2 * n {
            for l in k..2 * n {
                let mut t = T::zero();
                for i in 0..rows {
                    for j in 0..rows {
                        t += (ws[k][(i, j)] * ws[l][(j, i)]).re;
                    }
                }
                h.data[k * 2 * n + l] -= t;
                if l != k {
                    h.data[l * 2 * n + k] -= t;
                }
            }
        }
        let inv = T::one() / T::LN_2();
        for v in h.data.iter_mut() {
            *v *= inv;
        }
        h
    }
}

/// Concave quadratic lower bound of the log-det objective, tight at γ₀: returns (A, c).
fn minorizer<T: Real>(sub: &SurfaceSubproblem<T>, gamma0: &[Cx<T>]) -> Result<(ComplexMatrix<T>, Vec<Cx<T>>)> {
    let n = sub.dim();
    let x0 = sub.stacked(gamma0);
    let rows = x0.rows();
    let y = ComplexMatrix::identity(rows).add(&x0.gram_left())?.hermitian_part();
    let u0 = Cholesky::factor(&y)?.solve(&x0);
    let w0 = ComplexMatrix::identity(x0.cols()).add(&x0.gram_right())?.hermitian_part();
    let wu = w0.mul(&u0.adjoint()); // K × N_R
    let uwu = u0.mul(&w0).mul(&u0.adjoint()).hermitian_part();
    let inv_sigma = T::one() / sub.sigma2.sqrt();
    let mut a = ComplexMatrix::zeros(n, n);
    let mut c = vec![re(T::zero()); n];
    for (k, (w, r)) in sub.weights.iter().zip(&sub.maps).enumerate() {
        let s = w.sqrt() * inv_sigma;
        let row: Vec<Cx<T>> = wu.row_vec(k).iter().map(|z| z.conj() * s).collect();
        for (ci, v) in c.iter_mut().zip(r.adj_mv(&row)) {
            *ci += v;
        }
        a = a.add(&r.adjoint().mul(&uwu).mul(r).scale(*w / sub.sigma2))?;
    }
    Ok((a.hermitian_part(), c))
}

fn restrict<T: Real>(m: &ComplexMatrix<T>, idx: &[usize]) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// λ₂/λ₁ of Γ̃ = γγᴴ.
pub fn rank_ratio<T: Real>(gamma: &[Cx<T>]) -> Result<T> {
    let eig = hermitian_eig(&ComplexMatrix::outer(gamma, gamma))?;
    let l1 = eig.eigenvalues.first().copied().unwrap_or(T::zero());
    if !(l1 > T::zero()) {
        return Ok(T::zero());
    }
    let l2 = eig.eigenvalues.get(1).copied().unwrap_or(T::zero()).max(T::zero());
    Ok(l2 / l1)
}

/// Sequential convex surface step from the feasible γ₀.
pub fn optimize_surface<T: Real>(
    sub: &SurfaceSubproblem<T>,
    gamma0: &[Cx<T>],
    opts: &SolverOptions,
) -> Result<(Vec<Cx<T>>, SolveReport)> {
    let n = sub.dim();
    if gamma0.len() != n {
        return Err(Error::Dimension { op: "surface step", detail: format!("γ₀ has {} entries, expected {n}", gamma0.len()) });
    }
    let mut report = SolveReport::new();
    let mut gamma = gamma0.to_vec();
    let mut obj = sub.objective(&gamma)?;
    report.objective_trace.push(obj.as_f64());
    report.termination = Termination::Converged;
    if sub.weights.is_empty() {
        return Ok((gamma, report));
    }
    let dmax = sub.trace_matrix.diag().iter().fold(T::zero(), |m, z| m.max(z.re));
    let active: Vec<usize> = (0..n).filter(|&i| sub.trace_matrix[(i, i)].re > T::lit(DARK_ELEMENT_TOL) * dmax).collect();
    if active.is_empty() {
        return Ok((gamma, report));
    }
    let d_a = restrict(&sub.trace_matrix, &active);
    let extra = sub.extra_trace_pair.as_ref().map(|(e1, e2)| {
        let e = e1.sub(e2).expect("same shapes").hermitian_part();
        let reference = e1.frobenius_norm() + e2.frobenius_norm();
        (restrict(&e, &active), reference)
    });
    let split_extra = match &extra {
        Some((e, reference)) => Some(split(e, *reference)?),
        None => None,
    };
    let psd: Vec<ComplexMatrix<T>> = match &split_extra {
        Some(Split::Psd(p)) => vec![p.clone()],
        _ => Vec::new(),
    };
    let basis = common_null_space(active.len(), &psd, d_a.frobenius_norm())?;
    if basis.cols() == 0 {
        report.notes.push("reflection constraint pins the surface".into());
        return Ok((gamma, report));
    }
    let d_z = basis.adjoint().mul(&d_a).mul(&basis).hermitian_part();
    let dc = match &split_extra {
        Some(Split::Indefinite { plus, minus }) => Some((
            basis.adjoint().mul(plus).mul(&basis).hermitian_part(),
            basis.adjoint().mul(minus).mul(&basis).hermitian_part(),
        )),
        _ => None,
    };

    let inv_sigma = T::one() / sub.sigma2.sqrt();
    let reduced: Vec<ComplexMatrix<T>> = sub
        .weights
        .iter()
        .zip(&sub.maps)
        .map(|(w, r)| {
            let cols = ComplexMatrix::from_fn(r.rows(), active.len(), |i, j| r[(i, active[j])]);
            cols.mul(&basis).scale(w.sqrt() * inv_sigma)
        })
        .collect();

    report.termination = Termination::MaxIters;
    for it in 0..opts.max_iters {
        report.iterations = it + 1;
        let (a_full, c_full) = minorizer(sub, &gamma)?;
        let a_z = basis.adjoint().mul(&restrict(&a_full, &active)).mul(&basis).hermitian_part();
        let c_act: Vec<Cx<T>> = active.iter().map(|&i| c_full[i]).collect();
        let c_z = basis.adj_mv(&c_act);
        let g_act: Vec<Cx<T>> = active.iter().map(|&i| gamma[i]).collect();
        let z0 = basis.adj_mv(&g_act);
        let mut cons = vec![QuadConstraint { a: Some(d_z.clone()), c: vec![re(T::zero()); z0.len()], d: -sub.trace_bound }];
        if let Some((p, m)) = &dc {
            let mz = m.mv(&z0);
            cons.push(QuadConstraint { a: Some(p.clone()), c: mz.clone(), d: dot(&z0, &mz).re });
        }
        // Newton on the exact objective first, the minorizer step as the monotone fallback.
        let exact = ExactLogDet { maps: reduced.clone() };
        let newton = solve_concave_quadratic(&exact, &cons, None, &z0, opts)
            .ok()
            .map(|(z, _)| z)
            .filter(|z| exact.value(z).is_some_and(|v| v > obj));
        let step = match newton {
            Some(z) => Ok((z, SolveReport::new())),
            None => solve_concave_quadratic(&Minorizer { a: a_z, c: c_z }, &cons, None, &z0, opts),
        };
        let z = match step {
            Ok((z, _)) => z,
            Err(Error::Infeasible(msg)) => {
                report.notes.push(format!("surface surrogate has no interior ({msg})"));
                report.termination = Termination::Converged;
                break;
            }
            Err(e) => return Err(e),
        };
        let mut cand = gamma.clone();
        for (&i, v) in active.iter().zip(basis.mv(&z)) {
            cand[i] = v;
        }
        let cand_obj = sub.objective(&cand)?;
        if !(cand_obj >= obj) {
            report.termination = Termination::Converged;
            break;
        }
        let delta = cand_obj - obj;
        gamma = cand;
        obj = cand_obj;
        report.objective_trace.push(obj.as_f64());
        if delta <= T::lit(opts.rel_tol) * obj.abs().max(T::lit(1e-300)) {
            report.termination = Termination::Converged;
            break;
        }
        if opts.expired() {
            break;
        }
    }
    let (rd, re_) = sub.constraint_residuals(&gamma);
    report.constraint_residuals = std::iter::once(rd.as_f64()).chain(re_.map(|v| v.as_f64())).collect();
    Ok((gamma, report))
}

/// Γ_R step.
pub fn optimize_gamma_r<T: Real>(
    sub: &SurfaceSubproblem<T>,
    gamma_r0: &[Cx<T>],
    opts: &SolverOptions,
) -> Result<(Vec<Cx<T>>, SolveReport)> {
    optimize_surface(sub, gamma_r0, opts)
}

/// Γ_T step for fixed Γ_R and Q.
pub fn optimize_gamma_t<T: Real>(
    channels: &ChannelSet<T>,
    gamma_r: &[Cx<T>],
    q: &ComplexMatrix<T>,
    gamma_t0: &[Cx<T>],
    sigma2: T,
    opts: &SolverOptions,
) -> Result<(Vec<Cx<T>>, SolveReport)> {
    let sub = build_gamma_t_subproblem(channels, gamma_r, q, sigma2)?;
    optimize_surface(&sub, gamma_t0, opts)
}

/// Q step as a fractional program in reduced coordinates Q = N·Q'·Nᴴ.
struct QProgram<T> {
    z1n: ComplexMatrix<T>,
    mu: T,
    p_c: T,
    cons: Vec<TraceConstraint<T>>,
}

impl<T: Real> QProgram<T> {
    fn rate(&self, q: &ComplexMatrix<T>) -> T {
        let y = ComplexMatrix::identity(self.z1n.rows()).add(&self.z1n.mul(q).mul(&self.z1n.adjoint())).expect("shapes");
        logdet_psd(&y.hermitian_part()).unwrap_or(T::neg_infinity())
    }

    fn problem(&self, eta: T) -> MaxDetProblem<T> {
        let n = self.z1n.cols();
        MaxDetProblem {
            terms: vec![MaxDetTerm { weight: T::one(), map: self.z1n.clone() }],
            sigma2: T::one(),
            linear_cost: (eta * self.mu > T::zero()).then(|| ComplexMatrix::identity(n).scale(eta * self.mu)),
            trace_constraints: self.cons.clone(),
            lmi_link: None,
        }
    }
}

impl<T: Real> FractionalProgram<T> for QProgram<T> {
    type Point = ComplexMatrix<T>;
    fn numerator(&self, q: &ComplexMatrix<T>) -> T {
        self.rate(q)
    }
    fn denominator(&self, q: &ComplexMatrix<T>) -> T {
        self.mu * q.trace().re + self.p_c
    }
    fn maximize_parametric(&self, eta: T, warm: &ComplexMatrix<T>, opts: &SolverOptions) -> Result<ComplexMatrix<T>> {
        Ok(solve_maxdet(&self.problem(eta), Some(warm), opts)?.x)
    }
}

/// Transmit covariance for fixed surfaces: EE (Dinkelbach) or capacity (single solve).
#[allow(clippy::too_many_arguments)]
pub fn optimize_q<T: Real>(
    channels: &ChannelSet<T>,
    surfaces: &SurfaceState<T>,
    pm: &PowerModel<T>,
    p_max: T,
    sigma2: T,
    bandwidth: T,
    q0: Option<&ComplexMatrix<T>>,
    opts: &SolverOptions,
    mode: Mode,
) -> Result<(ComplexMatrix<T>, SolveReport)> {
    opts.validate()?;
    let d = channels.dims();
    let z1 = crate::single_stream::snr_matrix(channels, surfaces, sigma2);
    let mut report = SolveReport::new();
    report.termination = Termination::Converged;
    let p_c = pm.static_power(d.m_t, d.m_r, d.n_t, d.n_r);
    let ee_of = |q: &ComplexMatrix<T>| -> Result<T> {
        let cap = capacity(channels, surfaces, &TransmitState::Covariance(q.clone()), sigma2, bandwidth)?;
        Ok(cap / (pm.mu * q.trace().re + p_c))
    };
    if z1.frobenius_norm() == T::zero() {
        report.objective_trace.push(0.0);
        report.notes.push("composite channel is zero".into());
        return Ok((ComplexMatrix::zeros(d.n_t, d.n_t), report));
    }
    let mut psd = Vec::new();
    let mut lin = Vec::new();
    for (k, reference) in reflection_forms(channels, surfaces) {
        match split(&k, reference)? {
            Split::Vacuous => {}
            Split::Psd(_) => psd.push(k.clone()),
            Split::Indefinite { .. } => lin.push(k.clone()),
        }
    }
    let basis = common_null_space(d.n_t, &psd, z1.gram_right().frobenius_norm())?;
    if basis.cols() == 0 {
        report.objective_trace.push(0.0);
        report.notes.push("reflection constraints force Q = 0".into());
        return Ok((ComplexMatrix::zeros(d.n_t, d.n_t), report));
    }
    let r = basis.cols();
    let mut cons = vec![TraceConstraint { d: ComplexMatrix::identity(r), bound: p_max }];
    for k in &lin {
        cons.push(TraceConstraint { d: basis.adjoint().mul(k).mul(&basis).hermitian_part(), bound: T::zero() });
    }
    let mu = match mode {
        Mode::EnergyEfficiency => pm.mu,
        Mode::Capacity => T::zero(),
    };
    let prog = QProgram { z1n: z1.mul(&basis), mu, p_c, cons };
    let start = match q0 {
        Some(q) => basis.adjoint().mul(q).mul(&basis).hermitian_part(),
        None => ComplexMatrix::identity(r).scale(p_max / T::lit(r as f64)),
    };
    let qr = if mode == Mode::Capacity || mu == T::zero() {
        let sol = solve_maxdet(&prog.problem(T::zero()), Some(&start), opts)?;
        report.kkt_residual = sol.report.kkt_residual;
        sol.x
    } else {
        // a feasible start for the fractional program
        let x0 = solve_maxdet(&MaxDetProblem { terms: vec![], ..prog.problem(T::zero()) }, Some(&start), opts)
            .map(|s| s.x)
            .unwrap_or(start);
        let (q, inner) = dinkelbach(&prog, x0, opts)?;
        report.absorb(&inner);
        report.iterations = inner.iterations;
        report.kkt_residual = inner.kkt_residual;
        report.termination = inner.termination;
        q
    };
    let q = basis.mul(&qr).mul(&basis.adjoint()).hermitian_part();
    report.objective_trace.push(ee_of(&q)?.as_f64());
    report.constraint_residuals = std::iter::once(q.trace().re - p_max)
        .chain(reflection_forms(channels, surfaces).iter().map(|(k, _)| k.mul(&q).trace().re))
        .map(|v| v.as_f64())
        .collect();
    Ok((q, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiStreamSolution<T> {
    pub surfaces: SurfaceState<T>,
    pub q: ComplexMatrix<T>,
    pub ee: T,
    pub capacity: T,
    /// λ₂/λ₁ of (Γ̃_T, Γ̃_R) at the last surface steps.
    pub rank_diagnostics: (T, T),
    /// λ₂/λ₁ at every surface-step convergence, in order.
    pub rank_trace: Vec<f64>,
    pub report: SolveReport,
}

/// Alternates the Γ_R, Γ_T and Q steps from Q₀ = (P_max/N_T)·I and unit surfaces until
/// the EE change is below ε.
pub fn alternate_multi_stream<T: Real>(
    channels: &ChannelSet<T>,
    pm: &PowerModel<T>,
    p_max: T,
    sigma2: T,
    bandwidth: T,
    opts: &SolverOptions,
    mode: Mode,
) -> Result<MultiStreamSolution<T>> {
    opts.validate()?;
    pm.validate()?;
    channels.validate()?;
    if !(p_max > T::zero()) || !(sigma2 > T::zero()) {
        return Err(Error::Parameter("P_max and noise power must be positive".into()));
    }
    let d = channels.dims();
    let p_c = pm.static_power(d.m_t, d.m_r, d.n_t, d.n_r);
    let work_mu = match mode {
        Mode::EnergyEfficiency => pm.mu,
        Mode::Capacity => T::zero(),
    };
    let objective = |s: &SurfaceState<T>, q: &ComplexMatrix<T>| -> Result<T> {
        let cap = capacity(channels, s, &TransmitState::Covariance(q.clone()), sigma2, bandwidth)?;
        Ok(cap / (work_mu * q.trace().re + p_c))
    };
    let mut q = ComplexMatrix::identity(d.n_t).scale(p_max / T::lit(d.n_t as f64));
    let mut s = SurfaceState::identity(d.m_t, d.m_r);
    let mut val = objective(&s, &q)?;
    let mut report = SolveReport::new();
    report.objective_trace.push(val.as_f64());
    report.termination = Termination::MaxIters;
    let mut rank_trace = Vec::new();
    let mut ranks = (T::zero(), T::zero());
    for it in 0..opts.max_iters {
        report.iterations = it + 1;
        let start = val;

        let sub_r = build_gamma_r_subproblem(channels, &s.gamma_t, &q, sigma2)?;
        let (gr, rep) = optimize_gamma_r(&sub_r, &s.gamma_r, opts)?;
        report.absorb(&rep);
        let cand = SurfaceState { gamma_t: s.gamma_t.clone(), gamma_r: gr };
        let v = objective(&cand, &q)?;
        if v >= val {
            ranks.1 = rank_ratio(&cand.gamma_r)?;
            rank_trace.push(ranks.1.as_f64());
            s = cand;
            val = v;
        }

        let (gt, rep) = optimize_gamma_t(channels, &s.gamma_r, &q, &s.gamma_t, sigma2, opts)?;
        report.absorb(&rep);
        let cand = SurfaceState { gamma_t: gt, gamma_r: s.gamma_r.clone() };
        let v = objective(&cand, &q)?;
        if v >= val {
            ranks.0 = rank_ratio(&cand.gamma_t)?;
            rank_trace.push(ranks.0.as_f64());
            s = cand;
            val = v;
        }

        let (q_new, rep) = optimize_q(channels, &s, pm, p_max, sigma2, bandwidth, Some(&q), opts, mode)?;
        report.absorb(&rep);
        let v = objective(&s, &q_new)?;
        if v >= val {
            q = q_new;
            val = v;
        }
        report.objective_trace.push(val.as_f64());
        if val - start <= T::lit(opts.rel_tol) * val.abs() {
            report.termination = Termination::Converged;
            break;
        }
        if opts.expired() {
            break;
        }
    }
    let cap = capacity(channels, &s, &TransmitState::Covariance(q.clone()), sigma2, bandwidth)?;
    let ee = cap / (pm.mu * q.trace().re + p_c);
    Ok(MultiStreamSolution { surfaces: s, q, ee, capacity: cap, rank_diagnostics: ranks, rank_trace, report })
}
