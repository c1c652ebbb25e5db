//! Digital-only baseline: the arrays talk over the direct channel with no surfaces.

use holobeam::convex::{dinkelbach, FractionalProgram, SolveReport, SolverOptions};
use holobeam::numerics::{hermitian_eig, ComplexMatrix};
use holobeam::power::{Mode, PowerModel};

#[derive(Debug, Clone, PartialEq)]
pub struct DigitalSolution {
    /// Power per eigenmode, strongest first.
    pub powers: Vec<f64>,
    pub ee: f64,
    pub capacity: f64,
    pub report: SolveReport,
}

/// Water level L with Σ (L − 1/g)⁺ = budget.
fn budget_level(gains: &[f64], budget: f64) -> f64 {
    let mut level = 0.0;
    for k in 1..=gains.len() {
        if gains[k - 1] <= 0.0 {
            break;
        }
        let l = (budget + gains[..k].iter().map(|g| 1.0 / g).sum::<f64>()) / k as f64;
        if l > 1.0 / gains[k - 1] {
            level = l;
        }
    }
    level
}

fn fill(gains: &[f64], level: f64) -> Vec<f64> {
    gains.iter().map(|&g| if g > 0.0 { (level - 1.0 / g).max(0.0) } else { 0.0 }).collect()
}

struct Eigenmodes<'a> {
    gains: &'a [f64],
    mu: f64,
    p_c: f64,
    p_max: f64,
}

impl FractionalProgram<f64> for Eigenmodes<'_> {
    type Point = Vec<f64>;
    fn numerator(&self, p: &Vec<f64>) -> f64 {
        self.gains.iter().zip(p).map(|(g, p)| (1.0 + g * p).log2()).sum()
    }
    fn denominator(&self, p: &Vec<f64>) -> f64 {
        self.mu * p.iter().sum::<f64>() + self.p_c
    }
    fn maximize_parametric(&self, eta: f64, _warm: &Vec<f64>, _opts: &SolverOptions) -> holobeam::Result<Vec<f64>> {
        // per-mode stationarity 1/((1/g + p)·ln2) = η·μ + ν, ν ≥ 0 prices the budget
        let capped = budget_level(self.gains, self.p_max);
        let level = if eta * self.mu > 0.0 { capped.min(1.0 / (eta * self.mu * std::f64::consts::LN_2)) } else { capped };
        Ok(fill(self.gains, level))
    }
}

/// EE- or rate-optimal power allocation over the eigenmodes of the direct channel
/// `h_d` (N_R × N_T). Static power counts the RF chains and the system overhead only.
pub fn solve_digital(
    h_d: &ComplexMatrix<f64>,
    sigma2: f64,
    bandwidth: f64,
    pm: &PowerModel<f64>,
    p_max: f64,
    opts: &SolverOptions,
    mode: Mode,
) -> holobeam::Result<DigitalSolution> {
    let eig = hermitian_eig(&h_d.gram_right())?;
    let gains: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0) / sigma2).collect();
    let (n_r, n_t) = h_d.shape();
    let p_c = pm.static_power(0, 0, n_t, n_r) - pm.surface_overhead;
    let prog = Eigenmodes { gains: &gains, mu: pm.mu, p_c, p_max };
    let (powers, report) = match mode {
        Mode::Capacity => (fill(&gains, budget_level(&gains, p_max)), SolveReport::new()),
        Mode::EnergyEfficiency => dinkelbach(&prog, vec![0.0; gains.len()], opts)?,
    };
    let rate = prog.numerator(&powers);
    let ee = bandwidth * rate / (pm.mu * powers.iter().sum::<f64>() + p_c);
    Ok(DigitalSolution { powers, ee, capacity: bandwidth * rate, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_meets_budget() {
        let g = [4.0, 1.0, 0.25];
        for b in [0.1, 1.0, 10.0] {
            let p = fill(&g, budget_level(&g, b));
            assert!((p.iter().sum::<f64>() - b).abs() < 1e-12);
        }
    }
}
