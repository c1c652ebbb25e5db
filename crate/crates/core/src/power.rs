//! Capacity, surface powers, power consumption and energy efficiency.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, logdet_psd, norm_sqr, ComplexMatrix};
use crate::scalar::{dbm_to_watts, re, Cx, Real};

/// Reflection vectors of the two surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceState<T> {
    pub gamma_t: Vec<Cx<T>>,
    pub gamma_r: Vec<Cx<T>>,
}

impl<T: Real> SurfaceState<T> {
    /// All-ones (unit-modulus) surfaces.
    pub fn identity(m_t: usize, m_r: usize) -> Self {
        Self { gamma_t: vec![re(T::one()); m_t], gamma_r: vec![re(T::one()); m_r] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_t.iter().chain(&self.gamma_r).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Largest |γ_i| over both surfaces; values above one are allowed under global constraints.
    pub fn max_modulus(&self) -> T {
        self.gamma_t.iter().chain(&self.gamma_r).fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

/// Transmit strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum TransmitState<T> {
    Covariance(ComplexMatrix<T>),
    Beamvector(Vec<Cx<T>>),
    ScalarPower(T),
}

impl<T: Real> TransmitState<T> {
    /// Radiated power tr(Q), ‖q‖² or p.
    pub fn radiated_power(&self) -> T {
        match self {
            Self::Covariance(q) => q.trace().re,
            Self::Beamvector(q) => norm_sqr(q),
            Self::ScalarPower(p) => *p,
        }
    }

    pub fn n_t(&self) -> usize {
        match self {
            Self::Covariance(q) => q.rows(),
            Self::Beamvector(q) => q.len(),
            Self::ScalarPower(_) => 1,
        }
    }

    /// Q as a matrix.
    pub fn covariance(&self) -> ComplexMatrix<T> {
        match self {
            Self::Covariance(q) => q.clone(),
            Self::Beamvector(q) => ComplexMatrix::outer(q, q),
            Self::ScalarPower(p) => ComplexMatrix::from_diag(&[re(*p)]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Covariance(q) => {
                let eig = hermitian_eig(q)?;
                let min = eig.eigenvalues.last().copied().unwrap_or(T::zero());
                if min < -T::lit(1e-9) * q.frobenius_norm().max(T::one()) {
                    return Err(Error::NotPsd { min_eigenvalue: min.as_f64() });
                }
                Ok(())
            }
            Self::Beamvector(q) => {
                if q.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
                Ok(())
            }
            Self::ScalarPower(p) => {
                if !(*p >= T::zero()) {
                    return Err(Error::Parameter(format!("power must be nonnegative, got {p}")));
                }
                Ok(())
            }
        }
    }
}

/// Static and dynamic power consumption parameters, all in watts except `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PowerModel<T> {
    pub mu: T,
    pub per_element_static_t: T,
    pub per_element_static_r: T,
    pub per_chain_static_t: T,
    pub per_chain_static_r: T,
    pub surface_overhead: T,
    pub system_overhead: T,
}

impl<T: Real> PowerModel<T> {
    /// 0 dBm per surface element, 34 dBm per RF chain, 37 dBm overhead, μ = 1.
    pub fn reference() -> Self {
        Self::from_dbm(T::one(), T::zero(), T::lit(34.0), T::lit(37.0))
    }

    pub fn from_dbm(mu: T, per_element_dbm: T, per_chain_dbm: T, overhead_dbm: T) -> Self {
        let e = dbm_to_watts(per_element_dbm);
        let a = dbm_to_watts(per_chain_dbm);
        Self {
            mu,
            per_element_static_t: e,
            per_element_static_r: e,
            per_chain_static_t: a,
            per_chain_static_r: a,
            surface_overhead: T::zero(),
            system_overhead: dbm_to_watts(overhead_dbm),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu,
            self.per_element_static_t,
            self.per_element_static_r,
            self.per_chain_static_t,
            self.per_chain_static_r,
            self.surface_overhead,
            self.system_overhead,
        ];
        if all.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Model("power model terms must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// P_c.
    pub fn static_power(&self, m_t: usize, m_r: usize, n_t: usize, n_r: usize) -> T {
        let c = |n: usize| T::lit(n as f64);
        c(m_t) * self.per_element_static_t
            + c(m_r) * self.per_element_static_r
            + c(n_t) * self.per_chain_static_t
            + c(n_r) * self.per_chain_static_r
            + self.surface_overhead
            + self.system_overhead
    }

    /// The same model with μ = 0, used to turn EE maximization into rate maximization.
    pub fn without_amplifier(&self) -> Self {
        Self { mu: T::zero(), ..*self }
    }
}

/// Objective selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Mode {
    #[default]
    #[serde(rename = "EE", alias = "ee")]
    EnergyEfficiency,
    #[serde(rename = "Capacity", alias = "capacity")]
    Capacity,
}

fn check_shapes<T: Real>(ch: &ChannelSet<T>, s: &SurfaceState<T>, tx: &TransmitState<T>) -> Result<()> {
    ch.validate()?;
    let d = ch.dims();
    if s.gamma_t.len() != d.m_t || s.gamma_r.len() != d.m_r {
        return Err(Error::Dimension {
            op: "surfaces",
            detail: format!(
                "surfaces ({}, {}) for M_T = {}, M_R = {}",
                s.gamma_t.len(),
                s.gamma_r.len(),
                d.m_t,
                d.m_r
            ),
        });
    }
    if tx.n_t() != d.n_t {
        return Err(Error::Dimension {
            op: "transmit state",
            detail: format!("transmit dimension {} for N_T = {}", tx.n_t(), d.n_t),
        });
    }
    Ok(())
}

/// G·Γ_R·C·Γ_T·H.
pub fn composite_channel<T: Real>(ch: &ChannelSet<T>, s: &SurfaceState<T>) -> ComplexMatrix<T> {
    let gt_h = ch.h.scale_rows(&s.gamma_t);
    let gr_c = ch.c.scale_rows(&s.gamma_r);
    ch.g.mul(&gr_c.mul(&gt_h))
}

/// Achievable rate in bits/s.
pub fn capacity<T: Real>(
    ch: &ChannelSet<T>,
    s: &SurfaceState<T>,
    tx: &TransmitState<T>,
    sigma2: T,
    bandwidth: T,
) -> Result<T> {
    check_shapes(ch, s, tx)?;
    if !(sigma2 > T::zero()) {
        return Err(Error::Parameter("noise power must be positive".into()));
    }
    let k = composite_channel(ch, s);
    let bits = match tx {
        TransmitState::Covariance(q) => {
            let kqk = k.mul(q).mul(&k.adjoint()).hermitian_part().scale(T::one() / sigma2);
            let x = ComplexMatrix::identity(k.rows()).add(&kqk)?;
            logdet_psd(&x)?
        }
        TransmitState::Beamvector(q) => (T::one() + norm_sqr(&k.mv(q)) / sigma2).log2(),
        TransmitState::ScalarPower(p) => {
            let nn = k.frobenius_norm();
            (T::one() + *p * nn * nn / sigma2).log2()
        }
    };
    Ok(bandwidth * bits.max(T::zero()))
}

/// Input and output powers of the two surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePowers<T> {
    pub p_in_t: T,
    pub p_out_t: T,
    pub p_in_r: T,
    pub p_out_r: T,
}

pub fn surface_powers<T: Real>(
    ch: &ChannelSet<T>,
    s: &SurfaceState<T>,
    tx: &TransmitState<T>,
) -> Result<SurfacePowers<T>> {
    check_shapes(ch, s, tx)?;
    let q = tx.covariance();
    let a = ch.h.mul(&q).mul(&ch.h.adjoint());
    let ct = ch.c.scale_cols(&s.gamma_t);
    let b = ct.mul(&a).mul(&ct.adjoint());
    let weighted = |m: &ComplexMatrix<T>, g: &[Cx<T>]| {
        g.iter().enumerate().map(|(i, z)| z.norm_sqr() * m[(i, i)].re).sum::<T>()
    };
    Ok(SurfacePowers {
        p_in_t: a.trace().re,
        p_out_t: weighted(&a, &s.gamma_t),
        p_in_r: b.trace().re,
        p_out_r: weighted(&b, &s.gamma_r),
    })
}

/// μ·tr(Q) + P_c.
pub fn total_power<T: Real>(
    tx: &TransmitState<T>,
    pm: &PowerModel<T>,
    m_t: usize,
    m_r: usize,
    n_t: usize,
    n_r: usize,
) -> T {
    pm.mu * tx.radiated_power() + pm.static_power(m_t, m_r, n_t, n_r)
}

/// Capacity over total consumed power, in bits/Joule.
pub fn energy_efficiency<T: Real>(
    ch: &ChannelSet<T>,
    s: &SurfaceState<T>,
    tx: &TransmitState<T>,
    sigma2: T,
    bandwidth: T,
    pm: &PowerModel<T>,
) -> Result<T> {
    let d = ch.dims();
    let pt = total_power(tx, pm, d.m_t, d.m_r, d.n_t, d.n_r);
    if !(pt > T::zero()) {
        return Err(Error::Model("total power consumption is zero".into()));
    }
    Ok(capacity(ch, s, tx, sigma2, bandwidth)? / pt)
}

/// Global reflection residuals and verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionReport<T> {
    pub powers: SurfacePowers<T>,
    /// P_out,T − P_in,T.
    pub residual_t: T,
    /// P_out,R − P_in,R.
    pub residual_r: T,
    pub feasible: bool,
}

impl<T: Real> ReflectionReport<T> {
    /// Residuals relative to max(P_in, floor).
    pub fn relative_residuals(&self) -> (T, T) {
        let floor = T::lit(REFLECTION_FLOOR_W);
        (
            self.residual_t / self.powers.p_in_t.max(floor),
            self.residual_r / self.powers.p_in_r.max(floor),
        )
    }
}

pub const REFLECTION_FLOOR_W: f64 = 1e-15;

pub fn check_reflection<T: Real>(
    ch: &ChannelSet<T>,
    s: &SurfaceState<T>,
    tx: &TransmitState<T>,
    tol: T,
) -> Result<ReflectionReport<T>> {
    let p = surface_powers(ch, s, tx)?;
    let floor = T::lit(REFLECTION_FLOOR_W);
    let rt = p.p_out_t - p.p_in_t;
    let rr = p.p_out_r - p.p_in_r;
    let feasible = rt <= tol * p.p_in_t.max(floor) && rr <= tol * p.p_in_r.max(floor);
    Ok(ReflectionReport { powers: p, residual_t: rt, residual_r: rr, feasible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn scalar_chain(c: f64) -> ChannelSet<f64> {
        let one = ComplexMatrix::from_diag(&[cx(1.0, 0.0)]);
        ChannelSet::new(one.clone(), one, ComplexMatrix::from_diag(&[cx(c, 0.0)])).unwrap()
    }

    #[test]
    fn scalar_chain_capacity() {
        let ch = scalar_chain(3f64.sqrt());
        let s = SurfaceState::identity(1, 1);
        let c = capacity(&ch, &s, &TransmitState::ScalarPower(1.0), 1.0, 1.0).unwrap();
        assert!((c - 2.0).abs() < 1e-14);
    }

    #[test]
    fn static_power_matches_dbm_arithmetic() {
        let pm = PowerModel::<f64>::reference();
        let pt = total_power(&TransmitState::ScalarPower(0.0), &pm, 100, 100, 4, 4);
        let want = 200.0 * 1e-3 + 8.0 * 10f64.powf(3.4) / 1e3 + 10f64.powf(3.7) / 1e3;
        assert!((pt - want).abs() < 1e-12);
        assert!((pt - 25.31).abs() < 0.01);
    }

    #[test]
    fn zero_denominator_is_model_error() {
        let pm = PowerModel { mu: 0.0, per_element_static_t: 0.0, per_element_static_r: 0.0, per_chain_static_t: 0.0,
            per_chain_static_r: 0.0, surface_overhead: 0.0, system_overhead: 0.0 };
        let ch = scalar_chain(1.0);
        let r = energy_efficiency(&ch, &SurfaceState::identity(1, 1), &TransmitState::ScalarPower(1.0), 1.0, 1.0, &pm);
        assert!(matches!(r, Err(Error::Model(_))));
    }

    #[test]
    fn doubled_gamma_t_is_infeasible() {
        let ch = scalar_chain(1.0);
        let s = SurfaceState { gamma_t: vec![cx(2.0, 0.0)], gamma_r: vec![cx(1.0, 0.0)] };
        let r = check_reflection(&ch, &s, &TransmitState::ScalarPower(1.0), 1e-8).unwrap();
        assert!(!r.feasible);
        assert!((r.residual_t - 3.0).abs() < 1e-14);
    }
}
