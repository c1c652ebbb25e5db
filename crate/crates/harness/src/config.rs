use std::path::Path;

use anyhow::{bail, Context};
use holobeam::channel::LinkScenario;
use holobeam::convex::SolverOptions;
use holobeam::power::{Mode, PowerModel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "WsRHS_SISO")]
    WsRhsSiso,
    #[serde(rename = "WsRHS_SingleStream")]
    WsRhsSingleStream,
    #[serde(rename = "WsRHS_MultiStream")]
    WsRhsMultiStream,
    DigitalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "P_max_dbm")]
    PMaxDbm,
    #[serde(rename = "per_chain_static_dbm")]
    PerChainStaticDbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

fn default_power() -> PowerModel<f64> {
    PowerModel::reference()
}

fn default_p_max_dbm() -> f64 {
    30.0
}

fn default_draws() -> usize {
    100
}

fn default_threads() -> usize {
    0
}

fn default_time_cap() -> f64 {
    300.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: LinkScenario<f64>,
    pub architecture: Architecture,
    pub mode: Mode,
    pub sweep: Sweep,
    #[serde(default = "default_draws")]
    pub monte_carlo_draws: usize,
    #[serde(default)]
    pub solver_opts: SolverOptions,
    pub output_path: String,
    /// Power model; the swept quantity overrides its per-chain terms.
    #[serde(default = "default_power")]
    pub power: PowerModel<f64>,
    /// Transmit budget when P_max is not the swept variable.
    #[serde(default = "default_p_max_dbm")]
    pub p_max_dbm: f64,
    /// Worker threads, 0 for all cores.
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Per-draw wall-clock cap in seconds.
    #[serde(default = "default_time_cap")]
    pub draw_time_cap_s: f64,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.scenario.validate()?;
        self.power.validate()?;
        self.solver_opts.validate()?;
        if self.monte_carlo_draws == 0 {
            bail!("monte_carlo_draws must be at least 1");
        }
        if self.sweep.values.iter().any(|v| !v.is_finite()) {
            bail!("sweep values must be finite");
        }
        if self.sweep.values.windows(2).any(|w| w[0] > w[1]) {
            bail!("sweep values must be sorted");
        }
        if !self.p_max_dbm.is_finite() || !(self.draw_time_cap_s > 0.0) {
            bail!("p_max_dbm must be finite and draw_time_cap_s positive");
        }
        let d = self.scenario.dims();
        if self.architecture == Architecture::WsRhsSiso && (d.n_t != 1 || d.n_r != 1) {
            bail!("WsRHS_SISO needs single-antenna arrays, got N_T = {}, N_R = {}", d.n_t, d.n_r);
        }
        Ok(())
    }
}
