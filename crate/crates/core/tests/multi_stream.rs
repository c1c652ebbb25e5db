mod common;

use common::*;
use holobeam::convex::SolverOptions;
use holobeam::multi_stream::*;
use holobeam::numerics::ComplexMatrix;
use holobeam::power::*;
use holobeam::Complex64;

fn phases(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<Complex64> {
    cvec(r, n).into_iter().map(|z| z / z.norm()).collect()
}

fn random_q(r: &mut rand_chacha::ChaCha8Rng, n: usize, p: f64) -> ComplexMatrix<f64> {
    let x = cmat(r, n, n);
    let q = x.mul(&x.adjoint());
    let t = q.trace().re;
    q.scale(p / t)
}

#[test]
fn zero_covariance_has_no_terms() {
    let (ch, s2, _) = scenario(2, 3, 1);
    let sub = build_gamma_r_subproblem(&ch, &[c(1.0, 0.0); 3], &ComplexMatrix::zeros(2, 2), s2).unwrap();
    assert!(sub.weights.is_empty());
    assert_eq!(sub.objective(&[c(1.0, 0.0); 3]).unwrap(), 0.0);
}

#[test]
fn rank_one_input_gives_one_term() {
    let (ch, s2, _) = scenario(2, 4, 2);
    let mut r = rng(2);
    let q = cvec(&mut r, 2);
    let gt = phases(&mut r, 4);
    let sub = build_gamma_r_subproblem(&ch, &gt, &ComplexMatrix::outer(&q, &q), s2).unwrap();
    assert_eq!(sub.weights.len(), 1);
    let x = ch.c.mv(&ch.h.mv(&q).iter().zip(&gt).map(|(a, b)| a * b).collect::<Vec<_>>());
    assert!((sub.weights[0] / sq(&x) - 1.0).abs() < 1e-10);
    for i in 0..4 {
        assert!((sub.trace_matrix[(i, i)].re - x[i].norm_sqr()).abs() < 1e-10 * sq(&x));
    }
}

#[test]
fn subproblems_reproduce_capacity_and_powers() {
    for seed in 0..10 {
        let (ch, s2, _) = scenario(3, 4, 20 + seed);
        let mut r = rng(seed);
        let q = random_q(&mut r, 3, 1.0);
        let s = SurfaceState { gamma_t: cvec(&mut r, 4), gamma_r: cvec(&mut r, 4) };
        let tx = TransmitState::Covariance(q.clone());
        let cap = capacity(&ch, &s, &tx, s2, 1.0).unwrap();
        let pw = surface_powers(&ch, &s, &tx).unwrap();

        let sub_r = build_gamma_r_subproblem(&ch, &s.gamma_t, &q, s2).unwrap();
        assert!((sub_r.objective(&s.gamma_r).unwrap() / cap - 1.0).abs() < 1e-9);
        let (dr, _) = sub_r.constraint_residuals(&s.gamma_r);
        assert!((dr - (pw.p_out_r - pw.p_in_r)).abs() < 1e-9 * pw.p_in_r);

        let sub_t = build_gamma_t_subproblem(&ch, &s.gamma_r, &q, s2).unwrap();
        assert!((sub_t.objective(&s.gamma_t).unwrap() / cap - 1.0).abs() < 1e-9);
        let (dt, e) = sub_t.constraint_residuals(&s.gamma_t);
        assert!((dt - (pw.p_out_t - pw.p_in_t)).abs() < 1e-9 * pw.p_in_t);
        assert!((e.unwrap() - (pw.p_out_r - pw.p_in_r)).abs() < 1e-9 * pw.p_in_r);
    }
}

#[test]
fn identity_receive_surface_makes_extra_pair_equal() {
    let (ch, s2, _) = scenario(2, 3, 3);
    let q = random_q(&mut rng(3), 2, 1.0);
    let sub = build_gamma_t_subproblem(&ch, &[c(1.0, 0.0); 3], &q, s2).unwrap();
    let (e1, e2) = sub.extra_trace_pair.unwrap();
    assert!(e1.sub(&e2).unwrap().frobenius_norm() < 1e-12 * e2.frobenius_norm());
}

#[test]
fn single_element_surfaces_end_at_unit_modulus() {
    let (ch, s2, _) = scenario(2, 1, 4);
    let q = random_q(&mut rng(4), 2, 1.0);
    let sub = build_gamma_r_subproblem(&ch, &[c(1.0, 0.0)], &q, s2).unwrap();
    let (g, _) = optimize_gamma_r(&sub, &[c(0.3, 0.1)], &SolverOptions::default()).unwrap();
    assert!((g[0].norm() - 1.0).abs() < 1e-6, "{}", g[0].norm());
    let (g, _) = optimize_gamma_t(&ch, &[c(1.0, 0.0)], &q, &[c(0.2, -0.3)], s2, &SolverOptions::default()).unwrap();
    assert!((g[0].norm() - 1.0).abs() < 1e-6, "{}", g[0].norm());
}

#[test]
fn surface_step_never_lowers_the_objective() {
    for seed in 0..5 {
        let (ch, s2, _) = scenario(2, 4, 30 + seed);
        let mut r = rng(seed);
        let q = random_q(&mut r, 2, 1.0);
        let g0 = phases(&mut r, 4);
        let sub = build_gamma_r_subproblem(&ch, &phases(&mut r, 4), &q, s2).unwrap();
        let (g, rep) = optimize_gamma_r(&sub, &g0, &SolverOptions::default()).unwrap();
        assert!(sub.objective(&g).unwrap() >= sub.objective(&g0).unwrap());
        assert!(rep.is_nondecreasing(1e-12));
        assert!(sub.constraint_residuals(&g).0 <= 1e-8 * sub.trace_bound);
        assert!(rank_ratio(&g).unwrap() < 1e-12);
    }
}

#[test]
fn two_element_receive_step_matches_grid() {
    let (ch, s2, _) = scenario(2, 2, 5);
    let q = random_q(&mut rng(5), 2, 1.0);
    let sub = build_gamma_r_subproblem(&ch, &[c(1.0, 0.0); 2], &q, s2).unwrap();
    let (g, _) = optimize_gamma_r(&sub, &[c(1.0, 0.0); 2], &SolverOptions::default()).unwrap();
    let got = sub.objective(&g).unwrap();

    // the optimum is on the boundary and invariant to a common phase
    let (d1, d2, b) = (sub.trace_matrix[(0, 0)].re, sub.trace_matrix[(1, 1)].re, sub.trace_bound);
    let step = 1e-3;
    let mut best = f64::MIN;
    let mut th = 0.0f64;
    while th <= std::f64::consts::FRAC_PI_2 {
        let mut ph = 0.0f64;
        while ph < std::f64::consts::TAU {
            let z = [c((b / d1).sqrt() * th.cos(), 0.0), Complex64::from_polar((b / d2).sqrt() * th.sin(), ph)];
            best = best.max(sub.objective(&z).unwrap());
            ph += step;
        }
        th += step;
    }
    assert!(got >= best - 1e-6 * best.abs(), "{got} vs {best}");
}

#[test]
fn zero_composite_channel_gives_zero_covariance() {
    let (ch, s2, b) = scenario(2, 3, 6);
    let s = SurfaceState { gamma_t: vec![c(0.0, 0.0); 3], gamma_r: vec![c(1.0, 0.0); 3] };
    let (q, _) = optimize_q(&ch, &s, &PowerModel::reference(), 1.0, s2, b, None, &SolverOptions::default(), Mode::EnergyEfficiency).unwrap();
    assert_eq!(q.frobenius_norm(), 0.0);
}

#[test]
fn static_power_controls_transmit_power() {
    let (ch, s2, b) = scenario(2, 4, 7);
    let s = SurfaceState::identity(4, 4);
    let opts = SolverOptions::default();
    let mut pm = PowerModel::reference();
    pm.system_overhead = 1e9;
    let (q, _) = optimize_q(&ch, &s, &pm, 1.0, s2, b, None, &opts, Mode::EnergyEfficiency).unwrap();
    assert!((q.trace().re - 1.0).abs() < 1e-6);

    let tiny = PowerModel { mu: 1.0, per_element_static_t: 0.0, per_element_static_r: 0.0, per_chain_static_t: 0.0,
        per_chain_static_r: 0.0, surface_overhead: 0.0, system_overhead: 1e-9 };
    let (q, _) = optimize_q(&ch, &s, &tiny, 1.0, s2, b, None, &opts, Mode::EnergyEfficiency).unwrap();
    assert!(q.trace().re < 0.1);
}

#[test]
fn capacity_alternation_is_monotone_and_feasible() {
    let (ch, s2, b) = scenario(2, 4, 8);
    let sol = alternate_multi_stream(&ch, &PowerModel::reference(), 1.0, s2, b, &SolverOptions::default(), Mode::Capacity).unwrap();
    assert!(sol.report.is_nondecreasing(1e-12));
    assert!(sol.q.trace().re <= 1.0 + 1e-8);
    let rep = check_reflection(&ch, &sol.surfaces, &TransmitState::Covariance(sol.q.clone()), 1e-8).unwrap();
    assert!(rep.feasible);
    assert!(sol.rank_trace.iter().all(|r| *r < 1e-12));
}
