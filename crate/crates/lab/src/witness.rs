//! Negative-energy witness: along any focusing trajectory with E[u₀] < 0,
//! conservation forces
//!
//! ```text
//!   ‖u(t)‖_{p+1}^{p+1} = (p+1)(½‖∇u‖₂² - E[u₀]) ≥ -(p+1) E[u₀] > 0,
//! ```
//!
//! so the L^γ norm is bounded below and the space-time norm accumulates at
//! least linearly — the solution cannot scatter. The witness verifies the
//! floor at every recorded sample (1% tolerance), reports the margin
//! series, and demands a NonScatter verdict.

use serde::Serialize;

use nls_core::diagnostics::Verdict;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::runner::{run_simulation, RunOutcome};

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub initial_energy: f64,
    /// -(p+1)·E[u₀], the guaranteed lower bound for ‖u‖_{p+1}^{p+1}.
    pub floor: f64,
    pub samples: usize,
    pub floor_violations: usize,
    /// min over samples of ‖u(t)‖_{p+1}^{p+1} / floor - 1.
    pub min_relative_margin: f64,
    pub verdict: String,
    pub passed: bool,
    /// (t, ‖u(t)‖_{p+1}^{p+1} - floor) per recorded sample.
    pub margin_series: Vec<(f64, f64)>,
}

pub fn negative_energy_witness(
    cfg: &ExperimentConfig,
    out_root: Option<&std::path::Path>,
) -> LabResult<(WitnessReport, RunOutcome)> {
    let params = cfg.phys_params()?;
    let gamma = params.power + 1.0;

    let run = run_simulation(cfg, out_root)?;
    let e0 = run.record.initial_energy;
    if e0 >= 0.0 {
        return Err(LabError::InvalidConfig(format!(
            "negative-energy witness rejected: E[u₀] = {e0} ≥ 0"
        )));
    }
    let floor = -gamma * e0;

    let traj = &run.trajectory;
    let mut violations = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut series = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let value = traj.lgamma_norm[i].powf(gamma);
        let rel = value / floor - 1.0;
        min_margin = min_margin.min(rel);
        if value < floor * (1.0 - 0.01) {
            violations += 1;
        }
        series.push((traj.times[i], value - floor));
    }

    let verdict = run.verdict();
    let passed = violations == 0 && verdict == Verdict::NonScatter;
    let report = WitnessReport {
        initial_energy: e0,
        floor,
        samples: traj.len(),
        floor_violations: violations,
        min_relative_margin: min_margin,
        verdict: verdict.to_string(),
        passed,
        margin_series: series,
    };
    Ok((report, run))
}
