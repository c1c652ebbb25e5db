//! Brute-force and analytic reference values. Nothing here calls into the solvers.

use serde::{Deserialize, Serialize};

use crate::channel::{complex_gaussian, substream, ChannelSet};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, ComplexMatrix};
use crate::power::{PowerModel, SurfaceState};
use crate::scalar::{re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub samples: usize,
    /// Grid spacing; relative to P_max in `random_search_siso`, absolute (W) elsewhere.
    pub grid_step: f64,
    pub seed: u64,
}

impl OracleBudget {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || !(self.grid_step > 0.0) {
            return Err(Error::Parameter("oracle budget needs samples ≥ 1 and grid_step > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBest<T> {
    pub surfaces: SurfaceState<T>,
    pub power: T,
    pub ee: T,
}

fn sqnorm<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Random feasible surface pairs scaled to meet both reflection constraints with
/// equality, with p on the grid {k·step·P_max}. Every p-grid point is evaluated at the
/// largest sampled gain, which is exact because the EE increases with the gain at fixed p.
pub fn random_search_siso<T: Real>(
    channels: &ChannelSet<T>,
    sigma2: T,
    bandwidth: T,
    pm: &PowerModel<T>,
    p_max: T,
    budget: &OracleBudget,
) -> Result<OracleBest<T>> {
    budget.validate()?;
    let d = channels.dims();
    if d.n_t != 1 || d.n_r != 1 {
        return Err(Error::Dimension { op: "random_search_siso", detail: format!("N_T = {}, N_R = {}", d.n_t, d.n_r) });
    }
    let h: Vec<Cx<T>> = (0..d.m_t).map(|i| channels.h[(i, 0)]).collect();
    let g_row: Vec<Cx<T>> = (0..d.m_r).map(|j| channels.g[(0, j)]).collect();
    let h2 = sqnorm(&h);
    let mut rng = substream(budget.seed, "oracle", 0);
    let mut best_gain = T::neg_infinity();
    let mut best = SurfaceState::identity(d.m_t, d.m_r);
    for _ in 0..budget.samples {
        let mut gt: Vec<Cx<T>> = (0..d.m_t).map(|_| complex_gaussian(&mut rng)).collect();
        let z: Vec<Cx<T>> = h.iter().zip(&gt).map(|(a, b)| a * b).collect();
        let zn = sqnorm(&z);
        if !(zn > T::zero()) {
            continue;
        }
        let s = (h2 / zn).sqrt();
        gt.iter_mut().for_each(|v| *v *= s);
        let x: Vec<Cx<T>> = (0..d.m_r)
            .map(|i| (0..d.m_t).fold(re(T::zero()), |acc, j| acc + channels.c[(i, j)] * h[j] * gt[j]))
            .collect();
        let mut gr: Vec<Cx<T>> = (0..d.m_r).map(|_| complex_gaussian(&mut rng)).collect();
        let y: Vec<Cx<T>> = x.iter().zip(&gr).map(|(a, b)| a * b).collect();
        let yn = sqnorm(&y);
        let xn = sqnorm(&x);
        let scale = if yn > T::zero() { (xn / yn).sqrt() } else { T::zero() };
        gr.iter_mut().for_each(|v| *v *= scale);
        let amp = g_row.iter().zip(&y).fold(re(T::zero()), |acc, (a, b)| acc + a * b * scale);
        let gain = amp.norm_sqr() / sigma2;
        if gain > best_gain {
            best_gain = gain;
            best = SurfaceState { gamma_t: gt, gamma_r: gr };
        }
    }
    let p_c = pm.static_power(d.m_t, d.m_r, 1, 1);
    let steps = (1.0 / budget.grid_step).ceil() as usize;
    let mut best_p = T::zero();
    let mut best_ee = T::zero();
    for k in 1..=steps {
        let p = (T::lit(k as f64 * budget.grid_step)).min(T::one()) * p_max;
        let ee = bandwidth * (T::one() + best_gain.max(T::zero()) * p).log2() / (pm.mu * p + p_c);
        if ee > best_ee {
            best_ee = ee;
            best_p = p;
        }
    }
    Ok(OracleBest { surfaces: best, power: best_p, ee: best_ee })
}

/// Capacity-achieving covariance for y = Hx + n with Gram HᴴH: eigenmodes filled to a
/// common water level.
pub fn water_filling<T: Real>(channel_gram: &ComplexMatrix<T>, sigma2: T, p: T) -> Result<ComplexMatrix<T>> {
    if !(p > T::zero()) || !(sigma2 > T::zero()) {
        return Err(Error::Parameter("water_filling needs P > 0 and σ² > 0".into()));
    }
    let eig = hermitian_eig(channel_gram)?;
    let gains: Vec<T> = eig.eigenvalues.iter().map(|&l| l.max(T::zero()) / sigma2).collect();
    let mut powers = vec![T::zero(); gains.len()];
    // largest k with a positive allocation on the k strongest modes
    for k in (1..=gains.len()).rev() {
        if !(gains[k - 1] > T::zero()) {
            continue;
        }
        let level = (p + gains[..k].iter().map(|&g| T::one() / g).sum::<T>()) / T::lit(k as f64);
        if level - T::one() / gains[k - 1] > T::zero() {
            for i in 0..k {
                powers[i] = level - T::one() / gains[i];
            }
            break;
        }
    }
    if powers.iter().all(|&v| v == T::zero()) {
        powers[0] = p;
    }
    let n = gains.len();
    let v = &eig.eigenvectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(re(T::zero()), |acc, k| acc + v[(i, k)] * v[(j, k)].conj() * powers[k])
    }))
}

/// argmax of log₂(1 + a·p)/(μp + P_c) over {0, step, 2·step, …} ∪ {P_max}.
pub fn grid_stationary_power<T: Real>(a: T, mu: T, p_c: T, p_max: T, step: T) -> T {
    let f = |p: T| (T::one() + a * p).log2() / (mu * p + p_c);
    let n = (p_max / step).floor().to_usize().unwrap_or(0);
    let mut best = (p_max, f(p_max));
    for k in 0..=n {
        let p = T::lit(k as f64) * step;
        let v = f(p);
        if v > best.1 {
            best = (p, v);
        }
    }
    best.0
}
