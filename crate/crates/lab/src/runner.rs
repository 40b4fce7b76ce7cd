//! Single classified runs and their persistence.
//!
//! A run directory contains `config.json` (the resolved configuration),
//! `record.json` (summary + classification), `trajectory.csv` (fixed
//! schema, full precision) and `fields/` snapshots. The trajectory bytes
//! are a pure function of the config hash.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use nls_core::diagnostics::{self, classify, Classification, TrajectoryRecord, Verdict};
use nls_core::propagator::evolve;
use nls_core::{snapshot, Field, Grid, SpectralEngine};

use crate::config::{to_sorted_json, ExperimentConfig};
use crate::error::LabResult;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub label: String,
    pub initial_mass: f64,
    pub initial_energy: f64,
    pub initial_ell: f64,
    pub verdict: String,
    pub tail_slope: f64,
    pub fit_window: (f64, f64),
    pub reason: String,
    pub blowup: bool,
    pub domain_compromised: bool,
    pub domain_compromised_at: Option<f64>,
    pub degenerate: bool,
    pub retried_on_larger_box: bool,
    pub samples: usize,
    pub final_time: f64,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub struct RunOutcome {
    pub record: RunRecord,
    pub trajectory: TrajectoryRecord,
    pub classification: Classification,
    pub final_state: Option<Field>,
    pub out_dir: Option<PathBuf>,
}

impl RunOutcome {
    pub fn verdict(&self) -> Verdict {
        self.classification.verdict
    }
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Evolve and classify the member produced by `make_data`, optionally
/// persisting under `out_dir/<label>-<hash>/`.
///
/// Zero data short-circuits to a degenerate Scatter-by-convention record.
/// When the domain guard trips and `retry_on_domain_guard` is set, the run
/// is repeated once on a doubled box (same spacing) with data regenerated
/// there.
pub fn run_simulation_with(
    cfg: &ExperimentConfig,
    make_data: &dyn Fn(Arc<Grid>, &SpectralEngine) -> LabResult<Field>,
    label: &str,
    out_root: Option<&Path>,
) -> LabResult<RunOutcome> {
    let started = now_unix();
    let params = cfg.phys_params()?;
    let exps = nls_core::exponents::exponent_set(&params)?;
    let policy = cfg.classifier_policy();
    let stepper = cfg.stepper_config();

    let execute = |grid: Arc<Grid>| -> LabResult<(TrajectoryRecord, Vec<(usize, Field)>, Option<Field>)> {
        let eng = SpectralEngine::new(grid.clone());
        let u0 = make_data(grid, &eng)?;
        let mut snaps: Vec<(usize, Field)> = Vec::new();
        let mut last: Option<Field> = None;
        let save_every = cfg.save_fields_every;
        let traj = evolve(&u0, &stepper, &params, &eng, |idx, _t, f| {
            if let Some(k) = save_every {
                if k > 0 && idx % k == 0 {
                    snaps.push((idx, f.clone()));
                }
            }
            last = Some(f.clone());
        })?;
        Ok((traj, snaps, last))
    };

    let grid = cfg.make_grid()?;
    let eng_probe = SpectralEngine::new(grid.clone());
    let u0_probe = make_data(grid.clone(), &eng_probe)?;
    let initial_mass = diagnostics::mass(&u0_probe);
    let initial_energy = diagnostics::energy(&u0_probe, &params, &eng_probe)?;
    let initial_ell = diagnostics::ell(&u0_probe, &params);

    let degenerate = u0_probe.is_zero();
    let (trajectory, snaps, final_state, classification, retried) = if degenerate {
        let mut traj = TrajectoryRecord::new(0.0);
        traj.box_volume = grid.extent().powi(grid.dim() as i32);
        traj.push_sample(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, exps.rho);
        let classification = Classification {
            verdict: Verdict::Scatter,
            tail_slope: f64::NAN,
            slope_ci: (f64::NAN, f64::NAN),
            window: (0.0, 0.0),
            reason: "zero data: Scatter by convention (degenerate)".into(),
        };
        (traj, Vec::new(), Some(u0_probe.clone()), classification, false)
    } else {
        let (traj, snaps, last) = execute(grid.clone())?;
        let mut classification = classify(&traj, &exps, &policy);
        if traj.flags.domain_compromised && cfg.retry_on_domain_guard {
            let big = Grid::new(grid.dim(), grid.points_per_axis() * 2, grid.extent() * 2.0)
                .map_err(nls_core::Error::from)?;
            let (traj2, snaps2, last2) = execute(big)?;
            classification = classify(&traj2, &exps, &policy);
            (traj2, snaps2, last2, classification, true)
        } else {
            (traj, snaps, last, classification, false)
        }
    };

    let record = RunRecord {
        config_hash: cfg.hash(),
        label: label.to_string(),
        initial_mass,
        initial_energy,
        initial_ell,
        verdict: classification.verdict.to_string(),
        tail_slope: classification.tail_slope,
        fit_window: classification.window,
        reason: classification.reason.clone(),
        blowup: trajectory.flags.blowup,
        domain_compromised: trajectory.flags.domain_compromised,
        domain_compromised_at: trajectory.domain_compromised_at,
        degenerate,
        retried_on_larger_box: retried,
        samples: trajectory.len(),
        final_time: trajectory.final_time(),
        started_unix: started,
        finished_unix: now_unix(),
    };

    let out_dir = match out_root {
        Some(root) => Some(persist(root, cfg, label, &record, &trajectory, &snaps, &final_state)?),
        None => None,
    };

    Ok(RunOutcome { record, trajectory, classification, final_state, out_dir })
}

/// Run the configured family member (the `simulate` subcommand).
pub fn run_simulation(cfg: &ExperimentConfig, out_root: Option<&Path>) -> LabResult<RunOutcome> {
    run_simulation_with(
        cfg,
        &|grid, eng| crate::family::initial_data(cfg, grid, eng),
        "simulate",
        out_root,
    )
}

fn persist(
    root: &Path,
    cfg: &ExperimentConfig,
    label: &str,
    record: &RunRecord,
    traj: &TrajectoryRecord,
    snaps: &[(usize, Field)],
    final_state: &Option<Field>,
) -> LabResult<PathBuf> {
    let dir = root.join(format!("{label}-{}", cfg.hash()));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.json"), to_sorted_json(cfg)?)?;
    std::fs::write(dir.join("record.json"), to_sorted_json(record)?)?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    std::fs::write(dir.join("trajectory.csv"), csv)?;
    let fields = dir.join("fields");
    std::fs::create_dir_all(&fields)?;
    for (idx, f) in snaps {
        snapshot::write_field(&fields.join(format!("snap_{idx:06}.bin")), f)?;
    }
    if let Some(f) = final_state {
        snapshot::write_field(&fields.join("final.bin"), f)?;
        if f.grid().dim() == 1 {
            snapshot::write_field_csv_1d(&fields.join("final.csv"), f)?;
        }
    }
    Ok(dir)
}
