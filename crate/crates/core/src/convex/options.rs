use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Tolerances and limits shared by every iterative solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Outer iteration cap of SFP, alternating and Dinkelbach loops.
    pub max_iters: usize,
    /// Absolute stopping tolerance of Dinkelbach's auxiliary function.
    pub obj_tol: f64,
    /// Relative objective change ε that ends SFP and alternating loops.
    pub rel_tol: f64,
    /// Relative constraint tolerance.
    pub feas_tol: f64,
    /// Barrier parameter growth factor.
    pub barrier_mu: f64,
    /// Duality-gap target of the interior-point solves.
    pub inner_tol: f64,
    /// Newton step cap per barrier stage.
    pub max_newton: usize,
    /// Wall-clock limit; iterative loops stop with `MaxIters` once passed.
    #[serde(skip)]
    pub deadline: Option<Instant>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            obj_tol: 1e-8,
            rel_tol: 1e-6,
            feas_tol: 1e-8,
            barrier_mu: 10.0,
            inner_tol: 1e-10,
            max_newton: 100,
            deadline: None,
        }
    }
}

impl SolverOptions {
    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn validate(&self) -> crate::Result<()> {
        let pos = [self.obj_tol, self.rel_tol, self.feas_tol, self.inner_tol];
        if self.max_iters == 0 || self.max_newton == 0 || pos.iter().any(|v| !(*v > 0.0)) || !(self.barrier_mu > 1.0) {
            return Err(crate::Error::Parameter(
                "solver options must be positive and barrier_mu > 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    MaxIters,
    Infeasible,
}

/// Trajectory and diagnostics of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    pub kkt_residual: f64,
    pub constraint_residuals: Vec<f64>,
    /// Final |F(η)| of every Dinkelbach solve performed, including nested ones.
    pub dinkelbach_certificates: Vec<f64>,
    /// Free-form notices (dark elements, dropped constraints, ...).
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn new() -> Self {
        Self {
            objective_trace: Vec::new(),
            iterations: 0,
            termination: Termination::Converged,
            kkt_residual: 0.0,
            constraint_residuals: Vec::new(),
            dinkelbach_certificates: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Folds the certificates and notes of a nested solve into this report.
    pub fn absorb(&mut self, inner: &SolveReport) {
        self.dinkelbach_certificates.extend_from_slice(&inner.dinkelbach_certificates);
        for n in &inner.notes {
            if !self.notes.contains(n) {
                self.notes.push(n.clone());
            }
        }
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }

    /// True when every consecutive pair satisfies `next ≥ prev − slack·max(1, |prev|)`.
    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.objective_trace
            .windows(2)
            .all(|w| w[1] >= w[0] - slack * w[0].abs().max(1.0))
    }
}

impl Default for SolveReport {
    fn default() -> Self {
        Self::new()
    }
}
