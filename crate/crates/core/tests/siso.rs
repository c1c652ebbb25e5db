mod common;

use common::*;
use holobeam::channel::ChannelSet;
use holobeam::numerics::ComplexMatrix;
use holobeam::oracle::{grid_stationary_power, random_search_siso, OracleBudget};
use holobeam::power::*;
use holobeam::siso::*;

fn gain(ch: &ChannelSet<f64>, s: &SurfaceState<f64>) -> f64 {
    composite_channel(ch, s)[(0, 0)].norm_sqr()
}

fn chain(h: &[f64], g: &[f64], c: &[f64]) -> ChannelSet<f64> {
    let col = |v: &[f64]| ComplexMatrix::from_fn(v.len(), 1, |i, _| c_(v[i]));
    let row = |v: &[f64]| ComplexMatrix::from_fn(1, v.len(), |_, j| c_(v[j]));
    ChannelSet::new(col(h), row(g), ComplexMatrix::from_diag(&c.iter().map(|&x| c_(x)).collect::<Vec<_>>())).unwrap()
}

fn c_(x: f64) -> holobeam::Complex64 {
    c(x, 0.0)
}

#[test]
fn near_dark_diagonal_example() {
    let eps = 1e-14;
    let ch = chain(&[1.0, eps], &[1.0, eps], &[2.0, 1.0]);
    let (h, g) = ch.siso_vectors().unwrap();
    let design = siso_surface_design(&h, &g, &ch.c).unwrap();
    assert!((design.lambda_c - 4.0).abs() < 1e-12);
    assert!(!design.notes().is_empty());
    let target = 4.0 * sq(&h) * sq(&g);
    assert!((gain(&ch, &design.surfaces) / target - 1.0).abs() < 1e-10);

    let pm = PowerModel::<f64>::reference();
    let best = random_search_siso(&ch, 1.0, 1.0, &pm, 1.0, &OracleBudget { samples: 100_000, grid_step: 1e-3, seed: 3 }).unwrap();
    assert!(gain(&ch, &best.surfaces) <= gain(&ch, &design.surfaces) * (1.0 + 1e-9));
}

#[test]
fn scalar_collapse() {
    let ch = chain(&[0.3], &[-2.0], &[1.5]);
    let pm = PowerModel::<f64>::reference();
    let sol = solve_siso(&ch, 0.1, 1.0, &pm, 1.0, Mode::Capacity).unwrap();
    let want = (0.3f64 * 2.0 * 1.5).powi(2) / 0.1;
    assert!((sol.effective_gain / want - 1.0).abs() < 1e-12);
    assert!((sol.capacity - (1.0 + want).log2()).abs() < 1e-12);
}

#[test]
fn reflection_holds_with_equality() {
    for seed in 0..20 {
        let (ch, s2, b) = scenario(1, 2 + (seed as usize % 5), seed);
        let sol = solve_siso(&ch, s2, b, &PowerModel::reference(), 1.0, Mode::EnergyEfficiency).unwrap();
        let rep = check_reflection(&ch, &sol.surfaces, &TransmitState::ScalarPower(sol.power), 1e-8).unwrap();
        let (rt, rr) = rep.relative_residuals();
        assert!(rt.abs() < 1e-8 && rr.abs() < 1e-8, "seed {seed}: {rt} {rr}");
    }
}

#[test]
fn closed_form_beats_random_search() {
    for seed in 0..5 {
        let (ch, s2, b) = scenario(1, 4, 100 + seed);
        let pm = PowerModel::reference();
        let sol = solve_siso(&ch, s2, b, &pm, 1.0, Mode::EnergyEfficiency).unwrap();
        let best = random_search_siso(&ch, s2, b, &pm, 1.0, &OracleBudget { samples: 20_000, grid_step: 1e-3, seed }).unwrap();
        assert!(sol.ee >= best.ee * (1.0 - 1e-9));
    }
}

#[test]
fn stationary_point_examples() {
    let p = optimize_power_siso(1.0f64, 1.0, 1.0, 10.0, Mode::EnergyEfficiency).unwrap();
    let grid = grid_stationary_power(1.0f64, 1.0, 1.0, 10.0, 1e-6);
    assert!((p - grid).abs() < 1e-5);
    assert!((p - (std::f64::consts::E - 1.0)).abs() < 1e-6);
}

#[test]
fn stationary_point_is_the_maximizer() {
    let mut r = rng(5);
    for _ in 0..30 {
        let a: f64 = 10f64.powf(rand::Rng::random_range(&mut r, -2.0..4.0));
        let p_c: f64 = rand::Rng::random_range(&mut r, 0.1..10.0);
        let mu: f64 = rand::Rng::random_range(&mut r, 0.5..3.0);
        let p_max = 20.0;
        let p = optimize_power_siso(a, mu, p_c, p_max, Mode::EnergyEfficiency).unwrap();
        let f = |x: f64| (1.0 + a * x).log2() / (mu * x + p_c);
        let g = grid_stationary_power(a, mu, p_c, p_max, 1e-3);
        assert!(f(p) >= f(g) - 1e-12);
        // unimodal: increasing before, decreasing after
        assert!(f(p * 0.9) <= f(p) && (p >= p_max || f(p * 1.1) <= f(p)));
    }
}

#[test]
fn more_static_power_raises_transmit_power() {
    let p1 = optimize_power_siso(2.0f64, 1.0, 1.0, 1e3, Mode::EnergyEfficiency).unwrap();
    let p2 = optimize_power_siso(2.0f64, 1.0, 2.0, 1e3, Mode::EnergyEfficiency).unwrap();
    assert!(p2 > p1);
}

#[test]
fn bandwidth_only_scales_efficiency() {
    let (ch, s2, b) = scenario(1, 4, 21);
    let pm = PowerModel::reference();
    let one = solve_siso(&ch, s2, b, &pm, 1.0, Mode::EnergyEfficiency).unwrap();
    let two = solve_siso(&ch, s2, 2.0 * b, &pm, 1.0, Mode::EnergyEfficiency).unwrap();
    assert_eq!(one.power, two.power);
    assert!((two.ee / one.ee - 2.0).abs() < 1e-12);
}

#[test]
fn wrong_shapes_are_rejected() {
    let (ch, s2, b) = scenario(2, 4, 1);
    assert!(solve_siso(&ch, s2, b, &PowerModel::reference(), 1.0, Mode::EnergyEfficiency).is_err());
}
