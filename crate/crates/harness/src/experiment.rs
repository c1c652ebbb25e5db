use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use holobeam::channel::{noise_power, synthesize_channels, synthesize_direct};
use holobeam::dbm_to_watts;
use holobeam::multi_stream::alternate_multi_stream;
use holobeam::siso::solve_siso;
use holobeam::single_stream::alternate_single_stream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Architecture, ExperimentConfig, SweepVariable};
use crate::digital::solve_digital;

/// Aggregate over the draws of one sweep point. Spreads are standard errors of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub sweep_value: f64,
    pub mean_ee: f64,
    pub std_ee: f64,
    pub mean_capacity: f64,
    pub std_capacity: f64,
    pub mean_outer_iters: f64,
    pub failed_draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
}

#[derive(Debug, Clone, Copy)]
struct DrawOutcome {
    ee: f64,
    capacity: f64,
    iterations: usize,
}

fn solve_draw(cfg: &ExperimentConfig, value: f64, draw: u64) -> holobeam::Result<DrawOutcome> {
    let s = &cfg.scenario;
    let mut pm = cfg.power;
    let mut p_max = dbm_to_watts(cfg.p_max_dbm);
    match cfg.sweep.variable {
        SweepVariable::PMaxDbm => p_max = dbm_to_watts(value),
        SweepVariable::PerChainStaticDbm => {
            pm.per_chain_static_t = dbm_to_watts(value);
            pm.per_chain_static_r = dbm_to_watts(value);
        }
    }
    let mut opts = cfg.solver_opts;
    opts.deadline = Some(Instant::now() + Duration::from_secs_f64(cfg.draw_time_cap_s));
    let sigma2 = noise_power(s);
    let b = s.bandwidth;
    let out = match cfg.architecture {
        Architecture::WsRhsSiso => {
            let ch = synthesize_channels(s, draw)?;
            let r = solve_siso(&ch, sigma2, b, &pm, p_max, cfg.mode)?;
            DrawOutcome { ee: r.ee, capacity: r.capacity, iterations: r.report.iterations }
        }
        Architecture::WsRhsSingleStream => {
            let ch = synthesize_channels(s, draw)?;
            let r = alternate_single_stream(&ch, &pm, p_max, sigma2, b, &opts, cfg.mode)?;
            DrawOutcome { ee: r.ee, capacity: r.capacity, iterations: r.report.iterations }
        }
        Architecture::WsRhsMultiStream => {
            let ch = synthesize_channels(s, draw)?;
            let r = alternate_multi_stream(&ch, &pm, p_max, sigma2, b, &opts, cfg.mode)?;
            DrawOutcome { ee: r.ee, capacity: r.capacity, iterations: r.report.iterations }
        }
        Architecture::DigitalOnly => {
            let h_d = synthesize_direct(s, draw)?;
            let r = solve_digital(&h_d, sigma2, b, &pm, p_max, &opts, cfg.mode)?;
            DrawOutcome { ee: r.ee, capacity: r.capacity, iterations: r.report.iterations }
        }
    };
    if opts.expired() {
        return Err(holobeam::Error::NotConverged(format!("draw {draw} exceeded {} s", cfg.draw_time_cap_s)));
    }
    Ok(out)
}

fn mean_and_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs every (sweep point, draw) pair on a worker pool. Results do not depend on the
/// number of workers: each draw has its own random substream and aggregation is keyed.
pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<SweepResult> {
    cfg.validate()?;
    let draws = cfg.monte_carlo_draws as u64;
    let jobs: Vec<(usize, u64)> = (0..cfg.sweep.values.len()).flat_map(|i| (0..draws).map(move |d| (i, d))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build().context("building worker pool")?;
    let outcomes: Vec<holobeam::Result<DrawOutcome>> =
        pool.install(|| jobs.par_iter().map(|&(i, d)| solve_draw(cfg, cfg.sweep.values[i], d)).collect());

    let mut records = Vec::with_capacity(cfg.sweep.values.len());
    for (i, &value) in cfg.sweep.values.iter().enumerate() {
        let chunk = &outcomes[i * cfg.monte_carlo_draws..(i + 1) * cfg.monte_carlo_draws];
        let ok: Vec<DrawOutcome> = chunk.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
        let failed = chunk.len() - ok.len();
        if failed * 5 > chunk.len() {
            let first = chunk.iter().find_map(|r| r.as_ref().err()).map(|e| e.to_string()).unwrap_or_default();
            bail!("{failed} of {} draws failed at sweep value {value} (first error: {first})", chunk.len());
        }
        let (mean_ee, std_ee) = mean_and_sem(&ok.iter().map(|o| o.ee).collect::<Vec<_>>());
        let (mean_capacity, std_capacity) = mean_and_sem(&ok.iter().map(|o| o.capacity).collect::<Vec<_>>());
        let mean_outer_iters = ok.iter().map(|o| o.iterations as f64).sum::<f64>() / ok.len().max(1) as f64;
        records.push(SweepRecord { sweep_value: value, mean_ee, std_ee, mean_capacity, std_capacity, mean_outer_iters, failed_draws: failed });
    }
    Ok(SweepResult { records })
}
