mod common;

use common::*;
use holobeam::convex::SolverOptions;
use holobeam::numerics::{norm_sqr, principal_eigpair};
use holobeam::power::*;
use holobeam::siso::{optimize_power_siso, siso_surface_design, solve_siso};
use holobeam::single_stream::*;
use holobeam::Complex64;

fn beam_gain(ch: &holobeam::channel::ChannelSet<f64>, s: &SurfaceState<f64>, q: &[Complex64]) -> f64 {
    norm_sqr(&composite_channel(ch, s).mv(q))
}

#[test]
fn single_antenna_design_matches_siso_up_to_phase() {
    let (ch, _, _) = scenario(1, 4, 2);
    let (h, g) = ch.siso_vectors().unwrap();
    let a = siso_surface_design(&h, &g, &ch.c).unwrap().surfaces;
    let b = optimize_surfaces_given_q(&[c(1.0, 0.0)], &ch).unwrap();
    for (x, y) in a.gamma_t.iter().chain(&a.gamma_r).zip(b.gamma_t.iter().chain(&b.gamma_r)) {
        assert!((x.norm() - y.norm()).abs() < 1e-10 * x.norm().max(1.0));
    }
    let one = [c(1.0, 0.0)];
    assert!((beam_gain(&ch, &a, &one) / beam_gain(&ch, &b, &one) - 1.0).abs() < 1e-10);
}

#[test]
fn surfaces_given_q_reach_the_gain_bound_with_equality() {
    for seed in 0..10 {
        let (ch, _, _) = scenario(3, 4, 40 + seed);
        let mut r = rng(seed);
        let q = cvec(&mut r, 3);
        let s = optimize_surfaces_given_q(&q, &ch).unwrap();
        let hq = ch.h.mv(&q);
        let (lc, _) = principal_eigpair(&ch.c.gram_left()).unwrap();
        let (lg, _) = principal_eigpair(&ch.g.gram_right()).unwrap();
        let bound = norm_sqr(&hq) * lc * lg;
        assert!((beam_gain(&ch, &s, &q) / bound - 1.0).abs() < 1e-8);
        let rep = check_reflection(&ch, &s, &TransmitState::Beamvector(q), 1e-8).unwrap();
        let (rt, rr) = rep.relative_residuals();
        assert!(rt.abs() < 1e-8 && rr.abs() < 1e-8);
    }
}

#[test]
fn sfp_matches_closed_form_power_for_one_antenna() {
    let (ch, s2, b) = scenario(1, 4, 9);
    let pm = PowerModel::reference();
    let (h, g) = ch.siso_vectors().unwrap();
    let s = siso_surface_design(&h, &g, &ch.c).unwrap().surfaces;
    let a = beam_gain(&ch, &s, &[c(1.0, 0.0)]) / s2;
    let p_bar = optimize_power_siso(a, pm.mu, pm.static_power(4, 4, 1, 1), 1.0, Mode::EnergyEfficiency).unwrap();
    let (q, rep) = sfp_beamforming(&ch, &s, &pm, 1.0, s2, b, &[c(1e-3, 0.0)], &SolverOptions::default()).unwrap();
    assert!((norm_sqr(&q) / p_bar - 1.0).abs() < 1e-6, "{} vs {p_bar}", norm_sqr(&q));
    assert!(rep.is_nondecreasing(1e-12));
}

#[test]
fn sfp_trace_is_monotone_and_output_is_a_fixed_point() {
    let opts = SolverOptions::default();
    let pm = PowerModel::reference();
    for seed in 0..5 {
        let (ch, s2, b) = scenario(2, 4, 60 + seed);
        let mut r = rng(seed);
        let s = SurfaceState {
            gamma_t: cvec(&mut r, 4).into_iter().map(|z| z / z.norm()).collect(),
            gamma_r: cvec(&mut r, 4).into_iter().map(|z| z / z.norm()).collect(),
        };
        let q0: Vec<Complex64> = cvec(&mut r, 2).into_iter().map(|z| z * 0.01).collect();
        let (q, rep) = sfp_beamforming(&ch, &s, &pm, 1.0, s2, b, &q0, &opts).unwrap();
        assert!(rep.is_nondecreasing(1e-12));
        assert!(norm_sqr(&q) <= 1.0 + 1e-8);
        let (q2, rep2) = sfp_beamforming(&ch, &s, &pm, 1.0, s2, b, &q, &opts).unwrap();
        let (e1, e2) = (rep.final_objective().unwrap(), rep2.final_objective().unwrap());
        assert!((e2 - e1).abs() <= 1e-5 * e1, "{e1} {e2}");
        assert!(norm_sqr(&q2.iter().zip(&q).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-4 * norm_sqr(&q));
    }
}

#[test]
fn capacity_mode_spends_the_budget() {
    for seed in 0..5 {
        let (ch, s2, b) = scenario(2, 4, 80 + seed);
        let sol = alternate_single_stream(&ch, &PowerModel::reference(), 1.0, s2, b, &SolverOptions::default(), Mode::Capacity).unwrap();
        assert!((norm_sqr(&sol.q) - 1.0).abs() < 1e-6, "{}", norm_sqr(&sol.q));
    }
}

#[test]
fn alternation_with_one_antenna_matches_siso() {
    for seed in 0..5 {
        let (ch, s2, b) = scenario(1, 4, 90 + seed);
        let pm = PowerModel::reference();
        let alt = alternate_single_stream(&ch, &pm, 1.0, s2, b, &SolverOptions::default(), Mode::EnergyEfficiency).unwrap();
        let siso = solve_siso(&ch, s2, b, &pm, 1.0, Mode::EnergyEfficiency).unwrap();
        assert!((alt.ee / siso.ee - 1.0).abs() < 1e-6, "{} vs {}", alt.ee, siso.ee);
        assert!(alt.report.is_nondecreasing(1e-12));
    }
}

#[test]
fn snr_matrix_scales_with_noise() {
    let (ch, _, _) = scenario(2, 3, 1);
    let s = SurfaceState::identity(3, 3);
    let m = snr_matrix(&ch, &s, 4.0);
    let k = composite_channel(&ch, &s);
    assert!((m.frobenius_norm() * 2.0 - k.frobenius_norm()).abs() < 1e-12 * k.frobenius_norm());
}
