//! Channel synthesis: deterministic near-field H and G from geometry, random
//! Rician far-field C between the two surfaces.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::scalar::{db_to_linear, dbm_to_watts, Cx, Real};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Point3<T> = [T; 3];

/// Planar array or surface: element positions plus the spacings and directivity that set
/// the per-element gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ArrayGeometry<T> {
    pub element_positions: Vec<Point3<T>>,
    pub h_spacing: T,
    pub v_spacing: T,
    #[serde(default = "one")]
    pub directivity: T,
}

fn one<T: Real>() -> T {
    T::one()
}

fn sub3<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm3<T: Real>(a: &Point3<T>) -> T {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn cross3<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Most-square factorization `n = rows·cols` with `rows ≤ cols`.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut rows = 1;
    let mut r = 1;
    while r * r <= n {
        if n.is_multiple_of(r) {
            rows = r;
        }
        r += 1;
    }
    (rows, n / rows)
}

impl<T: Real> ArrayGeometry<T> {
    /// Rectangular grid in the plane orthogonal to `normal`, centred at `center`.
    /// The horizontal axis is `z × normal` (or `x` when `normal ∥ z`), the vertical axis
    /// is `normal × horizontal`.
    pub fn rectangular(
        rows: usize,
        cols: usize,
        h_spacing: T,
        v_spacing: T,
        center: Point3<T>,
        normal: Point3<T>,
        directivity: T,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Geometry("array must have at least one element".into()));
        }
        let nn = norm3(&normal);
        if !(nn > T::zero()) {
            return Err(Error::Geometry("normal must be nonzero".into()));
        }
        let n = [normal[0] / nn, normal[1] / nn, normal[2] / nn];
        let z = [T::zero(), T::zero(), T::one()];
        let mut u = cross3(&z, &n);
        let un = norm3(&u);
        if un <= T::lit(1e-12) {
            u = [T::one(), T::zero(), T::zero()];
        } else {
            u = [u[0] / un, u[1] / un, u[2] / un];
        }
        let v = cross3(&n, &u);
        let half = T::lit(0.5);
        let mut pos = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let a = (T::lit(c as f64) - T::lit(cols as f64 - 1.0) * half) * h_spacing;
                let b = (T::lit(r as f64) - T::lit(rows as f64 - 1.0) * half) * v_spacing;
                pos.push([
                    center[0] + a * u[0] + b * v[0],
                    center[1] + a * u[1] + b * v[1],
                    center[2] + a * u[2] + b * v[2],
                ]);
            }
        }
        let g = Self { element_positions: pos, h_spacing, v_spacing, directivity };
        g.validate()?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.element_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_positions.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_spacing > T::zero() && self.v_spacing > T::zero()) {
            return Err(Error::Geometry("spacings must be positive".into()));
        }
        if !(self.directivity >= T::zero()) {
            return Err(Error::Geometry("directivity must be nonnegative".into()));
        }
        let p = &self.element_positions;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                if norm3(&sub3(&p[i], &p[j])) == T::zero() {
                    return Err(Error::Geometry(format!("elements {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    /// α = (4π/λ²)·Δ_h·Δ_v·ρ.
    pub fn gain(&self, wavelength: T) -> T {
        T::lit(4.0) * T::PI() / (wavelength * wavelength) * self.h_spacing * self.v_spacing * self.directivity
    }
}

/// Physical description of a link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct LinkScenario<T> {
    pub carrier_freq: T,
    pub bandwidth: T,
    pub tx_array: ArrayGeometry<T>,
    pub rx_array: ArrayGeometry<T>,
    pub tx_surface: ArrayGeometry<T>,
    pub rx_surface: ArrayGeometry<T>,
    pub surface_separation: T,
    pub rice_factor_k: T,
    pub pathloss_ref_db: T,
    pub ref_distance_d0: T,
    pub pathloss_exponent: T,
    pub noise_psd_dbm_hz: T,
    pub noise_figure_db: T,
    pub seed: u64,
}

/// Counts used to build a default scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDims {
    pub n_t: usize,
    pub n_r: usize,
    pub m_t: usize,
    pub m_r: usize,
}

impl<T: Real> LinkScenario<T> {
    /// 3.5 GHz, 20 MHz, K = 10, 100 m between the surfaces, −174 dBm/Hz, 5 dB noise
    /// figure, ν = 2, PL₀ = free-space loss at 1 m. Arrays and surfaces are λ/2-spaced
    /// grids; each surface sits broadside at 2λ from its array.
    pub fn default_with(dims: LinkDims, seed: u64) -> Result<Self> {
        let fc = T::lit(3.5e9);
        let lambda = T::lit(SPEED_OF_LIGHT) / fc;
        let half = lambda * T::lit(0.5);
        let gap = lambda * T::two();
        let sep = T::lit(100.0);
        let x = [T::one(), T::zero(), T::zero()];
        let mx = [-T::one(), T::zero(), T::zero()];
        let zero = T::zero();
        let grid = |n: usize, cx: T, normal: Point3<T>| {
            let (r, c) = grid_shape(n);
            ArrayGeometry::rectangular(r, c, half, half, [cx, zero, zero], normal, T::one())
        };
        let d0 = T::one();
        let fspl = lambda / (T::lit(4.0) * T::PI() * d0);
        Ok(Self {
            carrier_freq: fc,
            bandwidth: T::lit(20e6),
            tx_array: grid(dims.n_t, zero, x)?,
            tx_surface: grid(dims.m_t, gap, mx)?,
            rx_surface: grid(dims.m_r, sep + gap, x)?,
            rx_array: grid(dims.n_r, sep + gap + gap, mx)?,
            surface_separation: sep,
            rice_factor_k: T::lit(10.0),
            pathloss_ref_db: T::lit(20.0) * fspl.log10(),
            ref_distance_d0: d0,
            pathloss_exponent: T::two(),
            noise_psd_dbm_hz: T::lit(-174.0),
            noise_figure_db: T::lit(5.0),
            seed,
        })
    }

    pub fn dims(&self) -> LinkDims {
        LinkDims {
            n_t: self.tx_array.len(),
            n_r: self.rx_array.len(),
            m_t: self.tx_surface.len(),
            m_r: self.rx_surface.len(),
        }
    }

    pub fn wavelength(&self) -> T {
        T::lit(SPEED_OF_LIGHT) / self.carrier_freq
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > T::zero()) {
            return Err(Error::Parameter("bandwidth must be positive".into()));
        }
        if !(self.carrier_freq > T::zero()) {
            return Err(Error::Parameter("carrier frequency must be positive".into()));
        }
        if !(self.rice_factor_k >= T::zero()) {
            return Err(Error::Parameter("Rice factor must be nonnegative".into()));
        }
        if !(self.ref_distance_d0 > T::zero()) || self.surface_separation < self.ref_distance_d0 {
            return Err(Error::Parameter("require surface_separation >= d0 > 0".into()));
        }
        for a in [&self.tx_array, &self.rx_array, &self.tx_surface, &self.rx_surface] {
            a.validate()?;
        }
        Ok(())
    }
}

/// (λ/4π)·√(α_tx·α_rx)·e^{−j2π‖Δr‖/λ}/‖Δr‖.
pub fn near_field_entry<T: Real>(
    tx_pos: &Point3<T>,
    rx_pos: &Point3<T>,
    gains: (T, T),
    wavelength: T,
) -> Result<Cx<T>> {
    let d = norm3(&sub3(rx_pos, tx_pos));
    if !(d > T::zero()) {
        return Err(Error::Geometry("coincident transmit and receive positions".into()));
    }
    let amp = wavelength / (T::lit(4.0) * T::PI()) * (gains.0 * gains.1).sqrt() / d;
    let phase = -T::two() * T::PI() * d / wavelength;
    Ok(Complex::from_polar(amp, phase))
}

/// Matrix of near-field entries; rows index the destination elements.
pub fn synthesize_near_field<T: Real>(
    from: &ArrayGeometry<T>,
    to: &ArrayGeometry<T>,
    wavelength: T,
) -> Result<ComplexMatrix<T>> {
    let gains = (from.gain(wavelength), to.gain(wavelength));
    let mut m = ComplexMatrix::zeros(to.len(), from.len());
    for (i, rx) in to.element_positions.iter().enumerate() {
        for (j, tx) in from.element_positions.iter().enumerate() {
            m[(i, j)] = near_field_entry(tx, rx, gains, wavelength)?;
        }
    }
    Ok(m)
}

/// PL₀·(d/d₀)^{−ν}, linear.
pub fn path_loss<T: Real>(d: T, scenario: &LinkScenario<T>) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::Domain(format!("path loss distance must be positive, got {d}")));
    }
    Ok(db_to_linear(scenario.pathloss_ref_db) * (d / scenario.ref_distance_d0).powf(-scenario.pathloss_exponent))
}

/// σ² in watts from the noise PSD, bandwidth and noise figure.
pub fn noise_power<T: Real>(scenario: &LinkScenario<T>) -> T {
    dbm_to_watts(scenario.noise_psd_dbm_hz + T::lit(10.0) * scenario.bandwidth.log10() + scenario.noise_figure_db)
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Independent generator for the named substream `name` of realization `index`.
pub fn substream(seed: u64, name: &str, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(fnv1a(name));
    rng
}

/// Standard circularly-symmetric complex Gaussian sample (unit variance).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Cx<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(a * s), T::lit(b * s))
}

/// Rician matrix with power gain `pl`, factor `k` and common LoS phase `phase`.
pub fn rician_matrix<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    k: T,
    pl: T,
    phase: T,
    rng: &mut R,
) -> Result<ComplexMatrix<T>> {
    if !(k >= T::zero()) {
        return Err(Error::Parameter("Rice factor must be nonnegative".into()));
    }
    let amp = pl.sqrt();
    let los = Complex::from_polar((k / (k + T::one())).sqrt(), phase);
    let nlos = (T::one() / (k + T::one())).sqrt();
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = (los + complex_gaussian::<T, R>(rng) * nlos) * amp;
        }
    }
    Ok(m)
}

/// Far-field M_R×M_T Rician channel between the surfaces.
pub fn synthesize_far_field<T: Real, R: Rng + ?Sized>(
    m_r: usize,
    m_t: usize,
    scenario: &LinkScenario<T>,
    rng: &mut R,
) -> Result<ComplexMatrix<T>> {
    let d = scenario.surface_separation;
    let pl = path_loss(d, scenario)?;
    let phase = -T::two() * T::PI() * d / scenario.wavelength();
    rician_matrix(m_r, m_t, scenario.rice_factor_k, pl, phase, rng)
}

/// One channel realization: H (M_T×N_T), G (N_R×M_R), C (M_R×M_T).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    pub h: ComplexMatrix<T>,
    pub g: ComplexMatrix<T>,
    pub c: ComplexMatrix<T>,
}

impl<T: Real> ChannelSet<T> {
    pub fn new(h: ComplexMatrix<T>, g: ComplexMatrix<T>, c: ComplexMatrix<T>) -> Result<Self> {
        let s = Self { h, g, c };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let (m_t, _) = self.h.shape();
        let (_, m_r) = self.g.shape();
        if self.c.shape() != (m_r, m_t) {
            return Err(Error::Dimension {
                op: "ChannelSet",
                detail: format!(
                    "H {:?}, G {:?} require C {:?}, got {:?}",
                    self.h.shape(),
                    self.g.shape(),
                    (m_r, m_t),
                    self.c.shape()
                ),
            });
        }
        Ok(())
    }

    pub fn dims(&self) -> LinkDims {
        LinkDims { n_t: self.h.cols(), n_r: self.g.rows(), m_t: self.h.rows(), m_r: self.g.cols() }
    }

    /// SISO channel vectors (h, g) when N_T = N_R = 1.
    pub fn siso_vectors(&self) -> Result<(Vec<Cx<T>>, Vec<Cx<T>>)> {
        let d = self.dims();
        if d.n_t != 1 || d.n_r != 1 {
            return Err(Error::Dimension {
                op: "siso_vectors",
                detail: format!("expected N_T = N_R = 1, got {} and {}", d.n_t, d.n_r),
            });
        }
        // g is stored so that the receive row is gᴴ
        Ok((self.h.col(0), self.g.row_vec(0).iter().map(|z| z.conj()).collect()))
    }
}

/// Realization `draw` of the surface-assisted link.
pub fn synthesize_channels<T: Real>(scenario: &LinkScenario<T>, draw: u64) -> Result<ChannelSet<T>> {
    scenario.validate()?;
    let lambda = scenario.wavelength();
    let h = synthesize_near_field(&scenario.tx_array, &scenario.tx_surface, lambda)?;
    let g = synthesize_near_field(&scenario.rx_surface, &scenario.rx_array, lambda)?;
    let mut rng = substream(scenario.seed, "C", draw);
    let c = synthesize_far_field(scenario.rx_surface.len(), scenario.tx_surface.len(), scenario, &mut rng)?;
    ChannelSet::new(h, g, c)
}

/// Direct N_R×N_T Rician channel between the arrays, used when no surfaces are present.
pub fn synthesize_direct<T: Real>(scenario: &LinkScenario<T>, draw: u64) -> Result<ComplexMatrix<T>> {
    scenario.validate()?;
    let mut rng = substream(scenario.seed, "H_direct", draw);
    synthesize_far_field(scenario.rx_array.len(), scenario.tx_array.len(), scenario, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        assert_eq!(grid_shape(32), (4, 8));
        assert_eq!(grid_shape(100), (10, 10));
        assert_eq!(grid_shape(1), (1, 1));
        assert_eq!(grid_shape(7), (1, 7));
    }

    #[test]
    fn coincident_is_error() {
        let p = [0.0, 0.0, 0.0];
        assert!(matches!(near_field_entry(&p, &p, (1.0, 1.0), 0.1), Err(Error::Geometry(_))));
    }

    #[test]
    fn path_loss_domain() {
        let s = LinkScenario::<f64>::default_with(LinkDims { n_t: 1, n_r: 1, m_t: 1, m_r: 1 }, 0).unwrap();
        assert!(matches!(path_loss(0.0, &s), Err(Error::Domain(_))));
    }

    #[test]
    fn default_scenario_dims() {
        let s = LinkScenario::<f64>::default_with(LinkDims { n_t: 2, n_r: 3, m_t: 4, m_r: 8 }, 1).unwrap();
        let ch = synthesize_channels(&s, 0).unwrap();
        assert_eq!(ch.h.shape(), (4, 2));
        assert_eq!(ch.g.shape(), (3, 8));
        assert_eq!(ch.c.shape(), (8, 4));
    }
}
