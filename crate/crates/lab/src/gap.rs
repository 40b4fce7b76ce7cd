//! The standing-wave gap demonstration.
//!
//! E[Q] < 0 and E is continuous along the ray c ↦ cQ, so some c₀ < 1
//! keeps E[c₀Q] < 0. Negative energy forbids scattering, and homogeneity
//! gives ℓ(c₀Q) = c₀·ℓ(Q) < ℓ(Q): a non-scattering datum strictly below the
//! standing wave's level. The minimal non-scattering level therefore sits
//! strictly below every standing wave — the ground state is not the
//! threshold object here, unlike in the mass-critical problem.

use serde::Serialize;

use nls_core::diagnostics::{ell, energy, Verdict};
use nls_core::SpectralEngine;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::family::{ground_state_profile, resolve_family};
use crate::runner::run_simulation_with;

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub ell_ground_state: f64,
    pub energy_ground_state: f64,
    pub c0: f64,
    pub energy_c0: f64,
    pub ell_c0: f64,
    /// ℓ(c₀Q)/ℓ(Q), equals c₀ by homogeneity.
    pub gap_ratio: f64,
    pub verdict_c0: String,
    pub scanned: Vec<(f64, f64)>,
    pub passed: bool,
}

const C0_SCAN: [f64; 11] = [0.99, 0.95, 0.9, 0.85, 0.8, 0.75, 0.7, 0.65, 0.6, 0.55, 0.5];

pub fn standing_wave_gap(cfg: &ExperimentConfig) -> LabResult<GapReport> {
    let params = cfg.phys_params()?;
    let grid = cfg.make_grid()?;
    let eng = SpectralEngine::new(grid.clone());
    let q = ground_state_profile(&params, grid, &eng)?;
    let ell_q = ell(&q, &params);
    let e_q = energy(&q, &params, &eng)?;

    // descending scan for a sub-unit amplitude with negative energy
    let mut scanned = Vec::new();
    let mut c0 = None;
    for &c in &C0_SCAN {
        let e = energy(&q.scaled(nls_core::Complex64::new(c, 0.0)), &params, &eng)?;
        scanned.push((c, e));
        if e < 0.0 {
            c0 = Some(c);
            break;
        }
    }
    let c0 = c0.ok_or_else(|| {
        LabError::InvariantFailure(
            "no c₀ in the scan has E[c₀Q] < 0; E[Q] < 0 guarantees a neighborhood, \
             so the solver or the energy is wrong"
                .into(),
        )
    })?;
    let energy_c0 = scanned.last().unwrap().1;

    let run = run_simulation_with(
        cfg,
        &|grid, eng| {
            let params = cfg.phys_params()?;
            let fam = resolve_family(&cfg.family, &params, grid, eng)?;
            Ok(fam.member(c0))
        },
        &format!("gap-c{c0}"),
        None,
    )?;
    let ell_c0 = run.record.initial_ell;
    let verdict = run.verdict();
    let passed = verdict == Verdict::NonScatter && ell_c0 < ell_q && energy_c0 < 0.0;
    Ok(GapReport {
        ell_ground_state: ell_q,
        energy_ground_state: e_q,
        c0,
        energy_c0,
        ell_c0,
        gap_ratio: ell_c0 / ell_q,
        verdict_c0: verdict.to_string(),
        scanned,
        passed,
    })
}
