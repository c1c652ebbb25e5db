use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::experiment::SweepResult;

pub const CSV_HEADER: [&str; 7] = [
    "sweep_value",
    "mean_ee_bits_per_joule",
    "std_ee",
    "mean_capacity_bps",
    "std_capacity",
    "mean_outer_iters",
    "failed_draws",
];

fn sci(v: f64) -> String {
    format!("{v:.11e}")
}

/// One header row plus one row per sweep point; reals at 12 significant digits.
pub fn emit_csv(result: &SweepResult, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(CSV_HEADER).with_context(|| format!("writing {}", path.display()))?;
    for r in &result.records {
        w.write_record([
            sci(r.sweep_value),
            sci(r.mean_ee),
            sci(r.std_ee),
            sci(r.mean_capacity),
            sci(r.std_capacity),
            sci(r.mean_outer_iters),
            r.failed_draws.to_string(),
        ])
        .with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Sidecar with the resolved config, units and the modelling choices that affect
/// cross-architecture comparisons.
pub fn emit_metadata(cfg: &ExperimentConfig, csv: &Path) -> anyhow::Result<PathBuf> {
    let path = metadata_path(csv);
    let meta = json!({
        "code_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "units": {
            "sweep_value": "dBm",
            "mean_ee_bits_per_joule": "bit/J",
            "std_ee": "bit/J, standard error of the mean",
            "mean_capacity_bps": "bit/s",
            "std_capacity": "bit/s, standard error of the mean",
            "mean_outer_iters": "count",
            "failed_draws": "count",
        },
        "direct_channel": "DigitalOnly uses a Rician channel between the two arrays with the scenario's K factor and path loss at the surface separation",
    });
    let mut f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, &meta).with_context(|| format!("writing {}", path.display()))?;
    writeln!(f).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
