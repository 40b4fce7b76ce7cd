//! Amplitude bisection for the minimal non-scattering level along a data
//! family.
//!
//! The scale-invariant level is homogeneous along the ray, ℓ(c·ψ) = c·ℓ(ψ),
//! so bisection in c is bisection in ℓ. The bracket [c_lo, c_hi] keeps the
//! invariant verdict(c_lo) = Scatter, verdict(c_hi) = NonScatter at every
//! stage; Undetermined probes consume budget without moving the bracket.
//! The final [ℓ(c_lo·ψ), ℓ(c_hi·ψ)] is a per-family bracket of the
//! family's crossing level and an upper-bound estimate of the global
//! infimum.

use serde::Serialize;

use nls_core::diagnostics::{ell, Verdict};
use nls_core::exec;
use nls_core::SpectralEngine;

use crate::config::{ExperimentConfig, FamilyKind};
use crate::error::{LabError, LabResult};
use crate::family::resolve_family;
use crate::runner::{run_simulation_with, RunOutcome};

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub amplitude: f64,
    pub ell: f64,
    pub verdict: String,
    pub tail_slope: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub family: String,
    pub c_lo: f64,
    pub c_hi: f64,
    pub ell_lo: f64,
    pub ell_hi: f64,
    pub probes: Vec<ProbeResult>,
    pub budget: usize,
    pub budget_spent: usize,
    pub undetermined_count: usize,
    /// ℓ of the unit-amplitude profile (= ℓ(Q) for the ground-state family).
    pub ell_unit: f64,
    /// ℓ(Q) - ell_hi for the scaled-ground-state family: positive once any
    /// probe below c = 1 lands NonScatter.
    pub standing_wave_gap: Option<f64>,
    pub inconclusive: bool,
}

fn classify_amplitude(cfg: &ExperimentConfig, c: f64) -> LabResult<RunOutcome> {
    run_simulation_with(
        cfg,
        &|grid, eng| {
            let params = cfg.phys_params()?;
            let fam = resolve_family(&cfg.family, &params, grid, eng)?;
            Ok(fam.member(c))
        },
        &format!("probe-c{c:.6}"),
        None,
    )
}

pub fn threshold_bisect(cfg: &ExperimentConfig) -> LabResult<ThresholdResult> {
    let params = cfg.phys_params()?;
    let grid = cfg.make_grid()?;
    let eng = SpectralEngine::new(grid.clone());
    let family = resolve_family(&cfg.family, &params, grid, &eng)?;
    let ell_unit = ell(family.base(), &params);

    let (mut c_lo, mut c_hi) = (cfg.bisection.c_lo, cfg.bisection.c_hi);
    let budget = cfg.bisection.budget;
    let mut probes = Vec::new();

    // endpoint pre-classification: two independent runs, merged in order
    let endpoints = [c_lo, c_hi];
    let endpoint_runs = exec::map_ordered(&endpoints, |&c| classify_amplitude(cfg, c));
    let mut endpoint_verdicts = Vec::new();
    for (c, run) in endpoints.iter().zip(endpoint_runs) {
        let run = run?;
        probes.push(ProbeResult {
            amplitude: *c,
            ell: run.record.initial_ell,
            verdict: run.record.verdict.clone(),
            tail_slope: run.record.tail_slope,
            reason: run.record.reason.clone(),
        });
        endpoint_verdicts.push(run.verdict());
    }
    if endpoint_verdicts[0] != Verdict::Scatter {
        return Err(LabError::InvariantFailure(format!(
            "bracket-invalid: c_lo = {c_lo} classified {} (need Scatter)",
            endpoint_verdicts[0]
        )));
    }
    if endpoint_verdicts[1] != Verdict::NonScatter {
        return Err(LabError::InvariantFailure(format!(
            "bracket-invalid: c_hi = {c_hi} classified {} (need NonScatter)",
            endpoint_verdicts[1]
        )));
    }

    let mut undetermined = 0usize;
    let mut spent = 0usize;
    while spent < budget {
        let mid = 0.5 * (c_lo + c_hi);
        let run = classify_amplitude(cfg, mid)?;
        spent += 1;
        probes.push(ProbeResult {
            amplitude: mid,
            ell: run.record.initial_ell,
            verdict: run.record.verdict.clone(),
            tail_slope: run.record.tail_slope,
            reason: run.record.reason.clone(),
        });
        match run.verdict() {
            Verdict::Scatter => c_lo = mid,
            Verdict::NonScatter => c_hi = mid,
            Verdict::Undetermined => undetermined += 1,
        }
    }

    let ell_lo = c_lo * ell_unit;
    let ell_hi = c_hi * ell_unit;
    let standing_wave_gap = match cfg.family.kind {
        FamilyKind::ScaledGroundState => Some(ell_unit - ell_hi),
        _ => None,
    };
    let inconclusive = spent == budget && undetermined * 2 > budget;
    Ok(ThresholdResult {
        family: family.label.clone(),
        c_lo,
        c_hi,
        ell_lo,
        ell_hi,
        probes,
        budget,
        budget_spent: spent,
        undetermined_count: undetermined,
        ell_unit,
        standing_wave_gap,
        inconclusive,
    })
}
