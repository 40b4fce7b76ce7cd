//! Quadratic-chirp sweep: classify e^{ib|x|²}ψ across a grid of chirps.
//!
//! Strongly chirped data scatters in both time directions no matter how
//! large ψ is; the sweep locates the smallest |b| on the grid that flips a
//! non-scattering base to Scatter, separately per sign of b. Alongside the
//! nonlinear verdicts it reports the free-flow space-time norm per b,
//! computed from the lens identity (the scalar route that stays valid
//! across the focal time).

use serde::Serialize;

use nls_core::diagnostics::{chirped_free_spacetime_norm, FreeDecayProfile, Verdict};
use nls_core::exec;
use nls_core::exponents::exponent_set;
use nls_core::SpectralEngine;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::family::resolve_family;
use crate::runner::run_simulation_with;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub b: f64,
    pub verdict: String,
    pub tail_slope: f64,
    pub reason: String,
    pub free_spacetime_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    pub base_label: String,
    pub base_amplitude: f64,
    pub base_verdict: String,
    pub base_free_norm: f64,
    pub rows: Vec<SweepRow>,
    /// Smallest b > 0 with a Scatter verdict.
    pub scatter_onset_positive: Option<f64>,
    /// Smallest |b| among b < 0 with a Scatter verdict.
    pub scatter_onset_negative: Option<f64>,
    /// Free-flow norms nonincreasing in |b| within 2%, per sign.
    pub free_norms_nonincreasing: bool,
    /// Verdicts for the negative time direction (conjugated data), present
    /// when `negative_time` is set.
    pub negative_time_rows: Option<Vec<SweepRow>>,
}

fn classify_chirp(cfg: &ExperimentConfig, b: f64, conjugate: bool) -> LabResult<SweepRow> {
    let run = run_simulation_with(
        cfg,
        &|grid, eng| {
            let params = cfg.phys_params()?;
            let fam = resolve_family(&cfg.family, &params, grid, eng)?;
            let data = fam.member(cfg.family.amplitude).chirp(b);
            Ok(if conjugate { data.conjugate() } else { data })
        },
        &format!("chirp-b{b:+.3}{}", if conjugate { "-neg" } else { "" }),
        None,
    )?;
    Ok(SweepRow {
        b,
        verdict: run.record.verdict,
        tail_slope: run.record.tail_slope,
        reason: run.record.reason,
        free_spacetime_norm: f64::NAN,
    })
}

pub fn oscillation_sweep(cfg: &ExperimentConfig) -> LabResult<OscillationReport> {
    let params = cfg.phys_params()?;
    let exps = exponent_set(&params)?;
    let grid = cfg.make_grid()?;
    let eng = SpectralEngine::new(grid.clone());
    let family = resolve_family(&cfg.family, &params, grid, &eng)?;
    let base = family.member(cfg.family.amplitude);

    // precondition: the unchirped base must hold (NonScatter)
    let base_run = run_simulation_with(
        cfg,
        &|grid, eng| {
            let params = cfg.phys_params()?;
            let fam = resolve_family(&cfg.family, &params, grid, eng)?;
            Ok(fam.member(cfg.family.amplitude))
        },
        "chirp-base",
        None,
    )?;
    if base_run.verdict() != Verdict::NonScatter {
        return Err(LabError::InvariantFailure(format!(
            "oscillation sweep needs a NonScatter base, got {} ({})",
            base_run.record.verdict, base_run.record.reason
        )));
    }

    // free-flow norms from the measured decay profile of the base
    let t_free = cfg.stepper.t_final;
    let profile = FreeDecayProfile::measure(&base, &exps, &eng, 1e-3, 80.0, 0.05)?;
    let free_norm =
        |b: f64| chirped_free_spacetime_norm(|s| profile.eval(s), b, t_free, &exps, 200_000);
    let base_free_norm = free_norm(0.0);

    let mut bs: Vec<f64> = Vec::new();
    for &m in &cfg.sweep.chirps {
        bs.push(m);
        if cfg.sweep.both_signs {
            bs.push(-m);
        }
    }
    bs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // probes are independent; results merge in probe order
    let rows_res = exec::map_ordered(&bs, |&b| classify_chirp(cfg, b, false));
    let mut rows = Vec::with_capacity(bs.len());
    for r in rows_res {
        let mut row = r?;
        row.free_spacetime_norm = free_norm(row.b);
        rows.push(row);
    }

    let onset = |sign: f64| {
        rows.iter()
            .filter(|r| r.b * sign > 0.0 && r.verdict == "Scatter")
            .map(|r| r.b.abs())
            .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.min(b))))
    };
    let scatter_onset_positive = onset(1.0);
    let scatter_onset_negative = onset(-1.0);

    // per sign: norms nonincreasing in |b| within 2%, anchored at b = 0
    let mut nonincreasing = true;
    for sign in [1.0f64, -1.0] {
        let mut prev = base_free_norm;
        let mut seq: Vec<&SweepRow> = rows.iter().filter(|r| r.b * sign > 0.0).collect();
        seq.sort_by(|a, b| a.b.abs().partial_cmp(&b.b.abs()).unwrap());
        for row in seq {
            if row.free_spacetime_norm > prev * 1.02 {
                nonincreasing = false;
            }
            prev = row.free_spacetime_norm;
        }
    }

    let negative_time_rows = if cfg.negative_time {
        let rows_res = exec::map_ordered(&bs, |&b| classify_chirp(cfg, b, true));
        let mut neg = Vec::with_capacity(bs.len());
        for r in rows_res {
            let mut row = r?;
            row.free_spacetime_norm = free_norm(-row.b); // conj flips the chirp sign
            neg.push(row);
        }
        Some(neg)
    } else {
        None
    };

    Ok(OscillationReport {
        base_label: family.label.clone(),
        base_amplitude: cfg.family.amplitude,
        base_verdict: base_run.record.verdict,
        base_free_norm,
        rows,
        scatter_onset_positive,
        scatter_onset_negative,
        free_norms_nonincreasing: nonincreasing,
        negative_time_rows,
    })
}
