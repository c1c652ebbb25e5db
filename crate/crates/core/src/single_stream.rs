//! Rank-one transmission with multi-antenna transceivers: closed-form surfaces for a
//! given beamvector, sequential fractional programming over the beamvector, and their
//! alternation.

use crate::channel::ChannelSet;
use crate::convex::{
    dinkelbach, solve_concave_quadratic, ConcaveObjective, FractionalProgram, QuadConstraint, SolveReport,
    SolverOptions, Termination,
};
use crate::error::{Error, Result};
use crate::numerics::dense::RealMatrix;
use crate::numerics::{dot, norm_sqr, principal_eigpair, ComplexMatrix};
use crate::power::{composite_channel, Mode, PowerModel, SurfaceState};
use crate::reflection::{common_null_space, split, Split};
use crate::siso::{design_for_incident, SurfaceDesign};
use crate::convex::pack;
use crate::scalar::{re, Cx, Real};

/// Surfaces maximizing ‖GΓ_R C Γ_T H q‖ for fixed q, as a [`SurfaceDesign`].
pub fn surface_design_given_q<T: Real>(q: &[Cx<T>], channels: &ChannelSet<T>) -> Result<SurfaceDesign<T>> {
    channels.validate()?;
    let h = channels.h.matvec(q)?;
    let (_, u_g) = principal_eigpair(&channels.g.gram_right())?;
    design_for_incident(&h, &channels.c, &u_g)
}

/// Surfaces maximizing ‖GΓ_R C Γ_T H q‖ for fixed q.
pub fn optimize_surfaces_given_q<T: Real>(q: &[Cx<T>], channels: &ChannelSet<T>) -> Result<SurfaceState<T>> {
    Ok(surface_design_given_q(q, channels)?.surfaces)
}

/// (1/σ)·G Γ_R C Γ_T H.
pub fn snr_matrix<T: Real>(channels: &ChannelSet<T>, surfaces: &SurfaceState<T>, sigma2: T) -> ComplexMatrix<T> {
    composite_channel(channels, surfaces).scale(T::one() / sigma2.sqrt())
}

/// K_T = Hᴴ(Γ_TᴴΓ_T − I)H and K_R = (CΓ_TH)ᴴ(Γ_RᴴΓ_R − I)(CΓ_TH), with their reference scales.
pub(crate) fn reflection_forms<T: Real>(
    channels: &ChannelSet<T>,
    surfaces: &SurfaceState<T>,
) -> [(ComplexMatrix<T>, T); 2] {
    let h = &channels.h;
    let wt: Vec<Cx<T>> = surfaces.gamma_t.iter().map(|z| re(z.norm_sqr() - T::one())).collect();
    let kt = h.adjoint().mul(&h.scale_rows(&wt)).hermitian_part();
    let ref_t = h.gram_right().frobenius_norm();
    let x = channels.c.mul(&h.scale_rows(&surfaces.gamma_t));
    let wr: Vec<Cx<T>> = surfaces.gamma_r.iter().map(|z| re(z.norm_sqr() - T::one())).collect();
    let kr = x.adjoint().mul(&x.scale_rows(&wr)).hermitian_part();
    let ref_r = x.gram_right().frobenius_norm();
    [(kt, ref_t), (kr, ref_r)]
}

/// Beam EE B·log₂(1+‖Mq‖²)/(μ‖q‖²+P_c).
fn beam_ee<T: Real>(m: &ComplexMatrix<T>, q: &[Cx<T>], mu: T, p_c: T, bandwidth: T) -> T {
    bandwidth * norm_sqr(&m.mv(q)).ln_1p() / T::LN_2() / (mu * norm_sqr(q) + p_c)
}

/// log₂(1 + 2Re{m₀ᴴz} − s₀) − κ‖z‖².
struct SurrogateObjective<T> {
    m0: Vec<Cx<T>>,
    s0: T,
    kappa: T,
}

impl<T: Real> SurrogateObjective<T> {
    fn arg(&self, z: &[Cx<T>]) -> T {
        T::one() + T::two() * dot(&self.m0, z).re - self.s0
    }
}

impl<T: Real> ConcaveObjective<T> for SurrogateObjective<T> {
    fn dim(&self) -> usize {
        self.m0.len()
    }
    fn value(&self, z: &[Cx<T>]) -> Option<T> {
        let u = self.arg(z);
        (u > T::zero()).then(|| u.log2() - self.kappa * norm_sqr(z))
    }
    fn gradient(&self, z: &[Cx<T>]) -> Vec<Cx<T>> {
        let u = self.arg(z);
        let c = T::two() / (u * T::LN_2());
        self.m0.iter().zip(z).map(|(&m, &x)| m * c - x * (T::two() * self.kappa)).collect()
    }
    fn hessian(&self, z: &[Cx<T>]) -> RealMatrix<T> {
        let u = self.arg(z);
        let n = 2 * self.m0.len();
        let gu: Vec<T> = pack(&self.m0).into_iter().map(|v| v * T::two()).collect();
        let mut h = RealMatrix::zeros(n);
        h.add_outer(&gu, &gu, -T::one() / (u * u * T::LN_2()));
        for i in 0..n {
            h.add_at(i, i, -T::two() * self.kappa);
        }
        h
    }
}

/// Surrogate fractional program in the reduced coordinates z (q = N z).
struct Surrogate<T> {
    m0: Vec<Cx<T>>,
    s0: T,
    mu: T,
    p_c: T,
    constraints: Vec<QuadConstraint<T>>,
    p_max: T,
}

impl<T: Real> FractionalProgram<T> for Surrogate<T> {
    type Point = Vec<Cx<T>>;
    fn numerator(&self, z: &Vec<Cx<T>>) -> T {
        let u = T::one() + T::two() * dot(&self.m0, z).re - self.s0;
        if u > T::zero() {
            u.log2()
        } else {
            T::neg_infinity()
        }
    }
    fn denominator(&self, z: &Vec<Cx<T>>) -> T {
        self.mu * norm_sqr(z) + self.p_c
    }
    fn maximize_parametric(&self, eta: T, warm: &Vec<Cx<T>>, opts: &SolverOptions) -> Result<Vec<Cx<T>>> {
        let obj = SurrogateObjective { m0: self.m0.clone(), s0: self.s0, kappa: eta * self.mu };
        let (z, _) = solve_concave_quadratic(&obj, &self.constraints, Some(self.p_max), warm, opts)?;
        Ok(z)
    }
}

/// Checks ‖q‖² ≤ P_max and both reflection constraints at relative tolerance `tol`.
pub(crate) fn beam_feasible<T: Real>(
    channels: &ChannelSet<T>,
    surfaces: &SurfaceState<T>,
    q: &[Cx<T>],
    p_max: T,
    tol: T,
) -> bool {
    if norm_sqr(q) > p_max * (T::one() + tol) {
        return false;
    }
    let tx = crate::power::TransmitState::Beamvector(q.to_vec());
    crate::power::check_reflection(channels, surfaces, &tx, tol).is_ok_and(|r| r.feasible)
}

/// Sequential fractional programming over the beamvector for fixed surfaces, from the
/// feasible point `q0`.
#[allow(clippy::too_many_arguments)]
pub fn sfp_beamforming<T: Real>(
    channels: &ChannelSet<T>,
    surfaces: &SurfaceState<T>,
    pm: &PowerModel<T>,
    p_max: T,
    sigma2: T,
    bandwidth: T,
    q0: &[Cx<T>],
    opts: &SolverOptions,
) -> Result<(Vec<Cx<T>>, SolveReport)> {
    opts.validate()?;
    pm.validate()?;
    let d = channels.dims();
    if q0.len() != d.n_t {
        return Err(Error::Dimension { op: "sfp_beamforming", detail: format!("q0 has {} entries for N_T = {}", q0.len(), d.n_t) });
    }
    let tol = T::lit(opts.feas_tol);
    if !beam_feasible(channels, surfaces, q0, p_max, tol) {
        return Err(Error::Infeasible("initial beamvector violates the power or reflection constraints".into()));
    }
    let m = snr_matrix(channels, surfaces, sigma2);
    let p_c = pm.static_power(d.m_t, d.m_r, d.n_t, d.n_r);
    let mut report = SolveReport::new();

    // constraint classification depends only on the surfaces
    let mut psd = Vec::new();
    let mut indefinite = Vec::new();
    for (k, reference) in reflection_forms(channels, surfaces) {
        match split(&k, reference)? {
            Split::Vacuous => {}
            Split::Psd(p) => psd.push(p),
            Split::Indefinite { plus, minus } => indefinite.push((plus, minus)),
        }
    }
    if !psd.is_empty() {
        report.notes.push("a reflection constraint restricts the beamvector to a subspace".into());
    }
    let basis = common_null_space(d.n_t, &psd, m.gram_right().frobenius_norm())?;
    if basis.cols() == 0 {
        report.objective_trace.push(beam_ee(&m, q0, pm.mu, p_c, bandwidth).as_f64());
        report.notes.push("feasible beam set is {0}".into());
        return Ok((q0.to_vec(), report));
    }
    let mz = m.mul(&basis);
    let reduced: Vec<(ComplexMatrix<T>, ComplexMatrix<T>)> = indefinite
        .iter()
        .map(|(p, n)| (basis.adjoint().mul(p).mul(&basis).hermitian_part(), basis.adjoint().mul(n).mul(&basis).hermitian_part()))
        .collect();

    let mut z = basis.adj_mv(q0);
    let mut q = basis.mv(&z);
    let mut ee = beam_ee(&m, &q, pm.mu, p_c, bandwidth);
    report.objective_trace.push(ee.as_f64());
    report.termination = Termination::MaxIters;
    for it in 0..opts.max_iters {
        report.iterations = it + 1;
        let mzz = mz.mv(&z);
        let s0 = norm_sqr(&mzz);
        let m0 = mz.adj_mv(&mzz);
        let mut constraints: Vec<QuadConstraint<T>> = reduced
            .iter()
            .map(|(p, n)| {
                let nz = n.mv(&z);
                QuadConstraint { a: Some(p.clone()), c: nz.clone(), d: dot(&z, &nz).re }
            })
            .collect();
        // keep the surrogate's log argument positive
        constraints.push(QuadConstraint { a: None, c: m0.clone(), d: s0 - T::one() + T::lit(1e-12) });
        let sur = Surrogate { m0, s0, mu: pm.mu, p_c, constraints, p_max };
        let (z_new, inner) = match dinkelbach(&sur, z.clone(), opts) {
            Ok(r) => r,
            Err(Error::Infeasible(msg)) => {
                report.notes.push(format!("surrogate has no interior ({msg}); stopping at current point"));
                report.termination = Termination::Converged;
                break;
            }
            Err(e) => return Err(e),
        };
        report.absorb(&inner);
        let q_new = basis.mv(&z_new);
        let ee_new = beam_ee(&m, &q_new, pm.mu, p_c, bandwidth);
        if !(ee_new >= ee) || !beam_feasible(channels, surfaces, &q_new, p_max, tol) {
            report.termination = Termination::Converged;
            break;
        }
        let delta = ee_new - ee;
        z = z_new;
        q = q_new;
        ee = ee_new;
        report.objective_trace.push(ee.as_f64());
        if delta <= T::lit(opts.rel_tol) * ee.abs() {
            report.termination = Termination::Converged;
            break;
        }
        if opts.expired() {
            break;
        }
    }
    Ok((q, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleStreamSolution<T> {
    pub surfaces: SurfaceState<T>,
    pub q: Vec<Cx<T>>,
    pub ee: T,
    pub capacity: T,
    pub report: SolveReport,
}

/// Alternates closed-form surfaces and SFP beamforming until the EE change is below ε.
/// In capacity mode the amplifier term is dropped (μ = 0) during optimization; the
/// reported EE uses the full power model.
pub fn alternate_single_stream<T: Real>(
    channels: &ChannelSet<T>,
    pm: &PowerModel<T>,
    p_max: T,
    sigma2: T,
    bandwidth: T,
    opts: &SolverOptions,
    mode: Mode,
) -> Result<SingleStreamSolution<T>> {
    opts.validate()?;
    pm.validate()?;
    channels.validate()?;
    if !(p_max > T::zero()) || !(sigma2 > T::zero()) {
        return Err(Error::Parameter("P_max and noise power must be positive".into()));
    }
    let d = channels.dims();
    let work_pm = match mode {
        Mode::EnergyEfficiency => *pm,
        Mode::Capacity => pm.without_amplifier(),
    };
    let p_c = pm.static_power(d.m_t, d.m_r, d.n_t, d.n_r);
    let objective = |s: &SurfaceState<T>, q: &[Cx<T>]| beam_ee(&snr_matrix(channels, s, sigma2), q, work_pm.mu, p_c, bandwidth);

    let (_, v) = principal_eigpair(&channels.h.gram_right())?;
    let mut q: Vec<Cx<T>> = v.iter().map(|&x| x * p_max.sqrt()).collect();
    let mut surfaces = SurfaceState::identity(d.m_t, d.m_r);
    let mut report = SolveReport::new();
    let mut val = objective(&surfaces, &q);
    report.objective_trace.push(val.as_f64());
    report.termination = Termination::MaxIters;
    for it in 0..opts.max_iters {
        report.iterations = it + 1;
        let start = val;
        let design = surface_design_given_q(&q, channels)?;
        let v_s = objective(&design.surfaces, &q);
        if v_s >= val {
            surfaces = design.surfaces.clone();
            val = v_s;
            for n in design.notes() {
                if !report.notes.contains(&n) {
                    report.notes.push(n);
                }
            }
        }
        let (q_new, inner) = sfp_beamforming(channels, &surfaces, &work_pm, p_max, sigma2, bandwidth, &q, opts)?;
        report.absorb(&inner);
        let v_q = objective(&surfaces, &q_new);
        if v_q >= val {
            q = q_new;
            val = v_q;
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
    let tx = crate::power::TransmitState::Beamvector(q.clone());
    let capacity = crate::power::capacity(channels, &surfaces, &tx, sigma2, bandwidth)?;
    let ee = capacity / (pm.mu * norm_sqr(&q) + p_c);
    Ok(SingleStreamSolution { surfaces, q, ee, capacity, report })
}
