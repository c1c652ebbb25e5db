//! Closed-form global solution for single-antenna transceivers.

use crate::channel::ChannelSet;
use crate::convex::{SolveReport, Termination};
use crate::error::{Error, Result};
use crate::numerics::{left_pseudo_inverse, norm, principal_eigpair, ComplexMatrix};
use crate::power::{capacity, Mode, PowerModel, SurfaceState, TransmitState};
use crate::scalar::{re, Cx, Real};

/// Entries below this fraction of the largest modulus are treated as zero.
pub const DARK_THRESHOLD: f64 = 1e-12;

/// Surfaces together with the quantities of their construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceDesign<T> {
    pub surfaces: SurfaceState<T>,
    /// λ_max(CCᴴ).
    pub lambda_c: T,
    /// Indices of transmit-surface elements switched off because h_i ≈ 0.
    pub dark_t: Vec<usize>,
    /// Indices of receive-surface elements switched off because x̄_i ≈ 0.
    pub dark_r: Vec<usize>,
}

impl<T: Real> SurfaceDesign<T> {
    pub fn notes(&self) -> Vec<String> {
        let mut n = Vec::new();
        if !self.dark_t.is_empty() {
            n.push(format!("transmit surface elements {:?} set dark (zero incident field)", self.dark_t));
        }
        if !self.dark_r.is_empty() {
            n.push(format!("receive surface elements {:?} set dark (zero incident field)", self.dark_r));
        }
        if self.surfaces.max_modulus() > T::one() {
            n.push(format!(
                "some |gamma| exceed 1 (max {:.4}); allowed under global reflection constraints",
                self.surfaces.max_modulus()
            ));
        }
        n
    }
}

fn entrywise_ratio<T: Real>(num: &[Cx<T>], den: &[Cx<T>], dark: &mut Vec<usize>) -> Vec<Cx<T>> {
    let max = den.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let thr = max * T::lit(DARK_THRESHOLD);
    num.iter()
        .zip(den)
        .enumerate()
        .map(|(i, (&a, &b))| {
            if b.norm() <= thr {
                dark.push(i);
                re(T::zero())
            } else {
                a / b
            }
        })
        .collect()
}

/// Surfaces steering the incident vector `h` so that the transmit surface output feeds the
/// principal mode of C and the receive surface output aligns with the unit vector `rx_dir`.
pub(crate) fn design_for_incident<T: Real>(
    h: &[Cx<T>],
    c: &ComplexMatrix<T>,
    rx_dir: &[Cx<T>],
) -> Result<SurfaceDesign<T>> {
    let (m_r, m_t) = c.shape();
    if h.len() != m_t || rx_dir.len() != m_r {
        return Err(Error::Dimension {
            op: "surface design",
            detail: format!("h has {} entries and the receive direction {}, C is {m_r}x{m_t}", h.len(), rx_dir.len()),
        });
    }
    if m_t > m_r {
        return Err(Error::NoLeftInverse { m_t, m_r });
    }
    let hn = norm(h);
    if !(hn > T::zero()) {
        return Err(Error::DegenerateChannel("incident field on the transmit surface is zero".into()));
    }
    let c_pinv = left_pseudo_inverse(c)?;
    let (lambda_c, u) = principal_eigpair(&c.gram_left())?;
    let amp = hn * lambda_c.sqrt();
    let x: Vec<Cx<T>> = u.iter().map(|&z| z * amp).collect();
    let mut dark_t = Vec::new();
    let mut dark_r = Vec::new();
    let gamma_t = entrywise_ratio(&c_pinv.mv(&x), h, &mut dark_t);
    let x_max = x.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let live: Vec<bool> = x.iter().map(|z| z.norm() > x_max * T::lit(DARK_THRESHOLD)).collect();
    // with dark entries in x̄, ȳ follows the receive direction restricted to the live support
    let restricted: Vec<Cx<T>> =
        rx_dir.iter().zip(&live).map(|(&z, &l)| if l { z } else { re(T::zero()) }).collect();
    let rn = norm(&restricted);
    let y: Vec<Cx<T>> = if rn > T::zero() {
        restricted.iter().map(|&z| z * (amp / rn)).collect()
    } else {
        restricted
    };
    let gamma_r = entrywise_ratio(&y, &x, &mut dark_r);
    Ok(SurfaceDesign { surfaces: SurfaceState { gamma_t, gamma_r }, lambda_c, dark_t, dark_r })
}

/// Optimal surfaces for channel vectors h (length M_T), g (length M_R) and C (M_R×M_T).
pub fn optimize_surfaces_siso<T: Real>(
    h: &[Cx<T>],
    g: &[Cx<T>],
    c: &ComplexMatrix<T>,
) -> Result<SurfaceState<T>> {
    Ok(siso_surface_design(h, g, c)?.surfaces)
}

/// As [`optimize_surfaces_siso`], also returning λ_max and dark-element notices.
pub fn siso_surface_design<T: Real>(
    h: &[Cx<T>],
    g: &[Cx<T>],
    c: &ComplexMatrix<T>,
) -> Result<SurfaceDesign<T>> {
    let gn = norm(g);
    if !(gn > T::zero()) {
        return Err(Error::DegenerateChannel("receive vector g is zero".into()));
    }
    let dir: Vec<Cx<T>> = g.iter().map(|&z| z / gn).collect();
    design_for_incident(h, c, &dir)
}

/// a·(μp+P_c)/(ln2·(1+ap)) − μ·log₂(1+ap).
fn stationarity<T: Real>(a: T, mu: T, p_c: T, p: T) -> T {
    let ap = a * p;
    a * (mu * p + p_c) / (T::LN_2() * (T::one() + ap)) - mu * ap.ln_1p() / T::LN_2()
}

/// Transmit power maximizing B·log₂(1+ap)/(μp+P_c) on [0, P_max] (EE mode) or P_max
/// (capacity mode).
pub fn optimize_power_siso<T: Real>(a: T, mu: T, p_c: T, p_max: T, mode: Mode) -> Result<T> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::DegenerateChannel(format!("effective gain must be positive, got {a}")));
    }
    if !(p_max > T::zero()) {
        return Err(Error::Parameter("P_max must be positive".into()));
    }
    if mode == Mode::Capacity || mu == T::zero() {
        return Ok(p_max);
    }
    if !(p_c > T::zero()) {
        // the ratio is decreasing in p when there is no static power; the limit p → 0 is not attained
        return Err(Error::Model("EE-optimal power needs positive static power".into()));
    }
    let mut lo = T::zero();
    let mut hi = T::one() / a;
    while stationarity(a, mu, p_c, hi) > T::zero() {
        if hi >= p_max {
            return Ok(p_max);
        }
        lo = hi;
        hi *= T::two();
    }
    for _ in 0..400 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi || hi - lo <= T::lit(1e-13) * hi {
            break;
        }
        if stationarity(a, mu, p_c, mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((lo + hi) * T::lit(0.5)).min(p_max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisoSolution<T> {
    pub surfaces: SurfaceState<T>,
    pub power: T,
    /// a = |gᴴΓ_R C Γ_T h|²/σ².
    pub effective_gain: T,
    pub ee: T,
    pub capacity: T,
    pub lambda_max: T,
    pub report: SolveReport,
}

/// Global EE (or capacity) solution for N_T = N_R = 1.
pub fn solve_siso<T: Real>(
    channels: &ChannelSet<T>,
    sigma2: T,
    bandwidth: T,
    pm: &PowerModel<T>,
    p_max: T,
    mode: Mode,
) -> Result<SisoSolution<T>> {
    pm.validate()?;
    if !(sigma2 > T::zero()) {
        return Err(Error::Parameter("noise power must be positive".into()));
    }
    let (h, g) = channels.siso_vectors()?;
    let design = siso_surface_design(&h, &g, &channels.c)?;
    let s = &design.surfaces;
    let d = channels.dims();
    let gt_h: Vec<Cx<T>> = h.iter().zip(&s.gamma_t).map(|(&a, &b)| a * b).collect();
    let x = channels.c.mv(&gt_h);
    let y: Vec<Cx<T>> = x.iter().zip(&s.gamma_r).map(|(&a, &b)| a * b).collect();
    let scalar = g.iter().zip(&y).fold(re(T::zero()), |acc, (&gi, &yi)| acc + gi.conj() * yi);
    let a = scalar.norm_sqr() / sigma2;
    let p_c = pm.static_power(d.m_t, d.m_r, 1, 1);
    let power = optimize_power_siso(a, pm.mu, p_c, p_max, mode)?;
    let tx = TransmitState::ScalarPower(power);
    let cap = capacity(channels, s, &tx, sigma2, bandwidth)?;
    let ee = cap / (pm.mu * power + p_c);
    let mut report = SolveReport::new();
    report.objective_trace.push(ee.as_f64());
    report.iterations = 1;
    report.termination = Termination::Converged;
    report.notes = design.notes();
    Ok(SisoSolution {
        surfaces: design.surfaces,
        power,
        effective_gain: a,
        ee,
        capacity: cap,
        lambda_max: design.lambda_c,
        report,
    })
}
