#![allow(dead_code)]

use holobeam::channel::{noise_power, synthesize_channels, ChannelSet, LinkDims, LinkScenario};
use holobeam::numerics::ComplexMatrix;
use holobeam::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss(r: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller keeps this independent of the library's sampler
    let u1: f64 = r.random_range(1e-300..1.0);
    let u2: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let rad = (-u1.ln()).sqrt();
    Complex64::new(rad * u2.cos(), rad * u2.sin())
}

pub fn cvec(r: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| cgauss(r)).collect()
}

pub fn cmat(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(rows, cols, |_, _| cgauss(r))
}

pub fn hermitian(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix<f64> {
    cmat(r, n, n).hermitian_part()
}

pub fn scenario(n: usize, m: usize, seed: u64) -> (ChannelSet<f64>, f64, f64) {
    let s = LinkScenario::<f64>::default_with(LinkDims { n_t: n, n_r: n, m_t: m, m_r: m }, seed).unwrap();
    (synthesize_channels(&s, 0).unwrap(), noise_power(&s), s.bandwidth)
}

pub fn sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
