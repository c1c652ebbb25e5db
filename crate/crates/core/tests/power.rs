mod common;

use common::*;
use holobeam::numerics::{logdet_psd, ComplexMatrix};
use holobeam::power::*;
use holobeam::Complex64;
use proptest::prelude::*;

fn unit_phases(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<Complex64> {
    cvec(r, n).into_iter().map(|z| z / z.norm()).collect()
}

#[test]
fn capacity_matches_direct_logdet() {
    let (ch, s2, b) = scenario(2, 4, 5);
    let mut r = rng(1);
    let s = SurfaceState { gamma_t: unit_phases(&mut r, 4), gamma_r: unit_phases(&mut r, 4) };
    let x = cmat(&mut r, 2, 2);
    let q = x.mul(&x.adjoint()).scale(1e-2);
    let k = composite_channel(&ch, &s);
    let y = ComplexMatrix::identity(2).add(&k.mul(&q).mul(&k.adjoint()).scale(1.0 / s2)).unwrap();
    let want = b * logdet_psd(&y).unwrap();
    let got = capacity(&ch, &s, &TransmitState::Covariance(q), s2, b).unwrap();
    assert!((got / want - 1.0).abs() < 1e-12);
    assert_eq!(capacity(&ch, &s, &TransmitState::Covariance(ComplexMatrix::zeros(2, 2)), s2, b).unwrap(), 0.0);
}

#[test]
fn beamvector_matches_rank_one_covariance() {
    let (ch, s2, b) = scenario(2, 3, 9);
    let mut r = rng(2);
    let s = SurfaceState::identity(3, 3);
    let q: Vec<Complex64> = cvec(&mut r, 2).into_iter().map(|z| z * 0.1).collect();
    let a = capacity(&ch, &s, &TransmitState::Beamvector(q.clone()), s2, b).unwrap();
    let c = capacity(&ch, &s, &TransmitState::Covariance(ComplexMatrix::outer(&q, &q)), s2, b).unwrap();
    assert!((a / c - 1.0).abs() < 1e-10);
}

#[test]
fn surface_power_examples() {
    let (ch, _, _) = scenario(2, 4, 3);
    let mut r = rng(3);
    let x = cmat(&mut r, 2, 2);
    let tx = TransmitState::Covariance(x.mul(&x.adjoint()));
    let id = surface_powers(&ch, &SurfaceState::identity(4, 4), &tx).unwrap();
    assert!((id.p_out_t / id.p_in_t - 1.0).abs() < 1e-12);
    assert!((id.p_out_r / id.p_in_r - 1.0).abs() < 1e-12);

    let half = SurfaceState { gamma_t: vec![c(1.0, 0.0); 4], gamma_r: vec![c(0.5, 0.0); 4] };
    let h = surface_powers(&ch, &half, &tx).unwrap();
    assert!((h.p_out_r / h.p_in_r - 0.25).abs() < 1e-12);

    let (siso, _, _) = scenario(1, 4, 3);
    let s = SurfaceState { gamma_t: unit_phases(&mut r, 4), gamma_r: unit_phases(&mut r, 4) };
    let p = surface_powers(&siso, &s, &TransmitState::ScalarPower(2.0)).unwrap();
    let hv: Vec<Complex64> = siso.h.as_slice().to_vec();
    assert!((p.p_in_t - 2.0 * sq(&hv)).abs() < 1e-12 * p.p_in_t);
    let cth = siso.c.mv(&hv.iter().zip(&s.gamma_t).map(|(a, g)| a * g).collect::<Vec<_>>());
    assert!((p.p_in_r - 2.0 * sq(&cth)).abs() < 1e-12 * p.p_in_r);
}

#[test]
fn total_power_and_efficiency() {
    let pm = PowerModel::<f64>::reference();
    let pc = pm.static_power(100, 100, 4, 4);
    assert!((pc - 25.31).abs() < 0.01);
    let tx = TransmitState::ScalarPower(1.0);
    assert!((total_power(&tx, &pm, 100, 100, 4, 4) - (pc + 1.0)).abs() < 1e-12);

    let (ch, s2, b) = scenario(1, 2, 7);
    let s = SurfaceState::identity(2, 2);
    assert_eq!(energy_efficiency(&ch, &s, &TransmitState::ScalarPower(0.0), s2, b, &pm).unwrap(), 0.0);

    // log2(1 + 3) = 2 bits over 1 J
    let one = ComplexMatrix::from_diag(&[c(1.0, 0.0)]);
    let chain = holobeam::channel::ChannelSet::new(one.clone(), one, ComplexMatrix::from_diag(&[c(3f64.sqrt(), 0.0)])).unwrap();
    let unit = PowerModel { mu: 0.0, per_element_static_t: 0.0, per_element_static_r: 0.0, per_chain_static_t: 0.0,
        per_chain_static_r: 0.0, surface_overhead: 0.0, system_overhead: 1.0 };
    let ee = energy_efficiency(&chain, &SurfaceState::identity(1, 1), &TransmitState::ScalarPower(1.0), 1.0, 1.0, &unit).unwrap();
    assert!((ee - 2.0).abs() < 1e-14);
    let ee3 = energy_efficiency(&chain, &SurfaceState::identity(1, 1), &TransmitState::ScalarPower(1.0), 1.0, 3.0, &unit).unwrap();
    assert!((ee3 - 6.0).abs() < 1e-13);
}

#[test]
fn efficiency_vanishes_at_huge_power() {
    let (ch, s2, b) = scenario(1, 4, 11);
    let pm = PowerModel::<f64>::reference();
    let s = SurfaceState::identity(4, 4);
    let small = energy_efficiency(&ch, &s, &TransmitState::ScalarPower(1.0), s2, b, &pm).unwrap();
    let huge = energy_efficiency(&ch, &s, &TransmitState::ScalarPower(1e6), s2, b, &pm).unwrap();
    assert!(huge < 1e-2 * small);
}

#[test]
fn reflection_examples() {
    let (ch, _, _) = scenario(1, 3, 4);
    let tx = TransmitState::ScalarPower(0.5);
    let ok = check_reflection(&ch, &SurfaceState::identity(3, 3), &tx, 1e-8).unwrap();
    assert!(ok.feasible);
    let loud = SurfaceState { gamma_t: vec![c(2.0, 0.0); 3], gamma_r: vec![c(1.0, 0.0); 3] };
    let bad = check_reflection(&ch, &loud, &tx, 1e-8).unwrap();
    assert!(!bad.feasible);
    assert!((bad.residual_t - 3.0 * bad.powers.p_in_t).abs() < 1e-12 * bad.powers.p_in_t);
}

proptest! {
    #[test]
    fn unit_modulus_surfaces_meet_reflection_with_equality(seed in any::<u64>(), m in 1usize..6) {
        let (ch, _, _) = scenario(2, m, seed % 1000);
        let mut r = rng(seed);
        let s = SurfaceState { gamma_t: unit_phases(&mut r, m), gamma_r: unit_phases(&mut r, m) };
        let x = cmat(&mut r, 2, 2);
        let rep = check_reflection(&ch, &s, &TransmitState::Covariance(x.mul(&x.adjoint())), 1e-8).unwrap();
        let (rt, rr) = rep.relative_residuals();
        prop_assert!(rt.abs() < 1e-10 && rr.abs() < 1e-10);
    }
}
