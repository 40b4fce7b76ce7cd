//! Pinned verification suites, runnable as `nlslab verify <name>`.
//!
//! Each suite re-checks one cluster of identities at fixed desk-scale
//! settings and reports one line per check. Suites: `exponents`, `decay`,
//! `jt`, `pythagoras`, `conservation`.

use serde::Serialize;

use nls_core::diagnostics::{decay_ratio_curve, energy, orthogonal_splitting_defect};
use nls_core::exponents::{
    exponent_set, strauss_exponent, validate_window, PhysParams, IDENTITY_TOL,
};
use nls_core::groundstate::soliton_closed_form_1d;
use nls_core::propagator::{
    apply_j, evolve, free_propagate, j_weighted_norm, multiply_by_coordinate, StepperConfig,
};
use nls_core::{Complex64, Field, Grid, SpectralEngine};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(lines: &mut Vec<CheckLine>, name: impl Into<String>, passed: bool, detail: String) {
    lines.push(CheckLine { name: name.into(), passed, detail });
}

pub const SUITES: [&str; 5] = ["exponents", "decay", "jt", "pythagoras", "conservation"];

pub fn run_suite(name: &str) -> LabResult<Vec<CheckLine>> {
    match name {
        "exponents" => Ok(exponents_suite()),
        "decay" => decay_suite(),
        "jt" => jt_suite(),
        "pythagoras" => pythagoras_suite(),
        "conservation" => conservation_suite(),
        other => Err(LabError::InvalidConfig(format!(
            "unknown verify suite '{other}'; available: {SUITES:?}"
        ))),
    }
}

/// Strauss root, duality and band checks on a (N, p) grid.
pub fn exponents_suite() -> Vec<CheckLine> {
    let mut lines = Vec::new();
    for dim in [1u32, 2, 3] {
        let n = dim as f64;
        let p_st = strauss_exponent(dim).unwrap();
        let root = n * p_st * p_st - (n + 2.0) * p_st - 2.0;
        check(
            &mut lines,
            format!("strauss_root_n{dim}"),
            root.abs() <= 1e-10,
            format!("N p² - (N+2)p - 2 = {root:e} at p_St = {p_st}"),
        );
        let p_mc = 1.0 + 4.0 / n;
        for i in 1..=5 {
            let p = p_st + (p_mc - p_st) * i as f64 / 6.0;
            let params = PhysParams::focusing(dim, p).unwrap();
            let set = exponent_set(&params).unwrap();
            let rho_dual = p * set.rho_tilde / (set.rho_tilde - 1.0);
            let gamma_dual = p * set.gamma_tilde / (set.gamma_tilde - 1.0);
            let rdg = set.rho_delta_gamma();
            let ok = (set.rho - rho_dual).abs() <= IDENTITY_TOL * set.rho
                && (set.gamma - gamma_dual).abs() <= IDENTITY_TOL * set.gamma
                && rdg > 1.0
                && rdg < 2.0
                && validate_window(&params).all_passed();
            check(
                &mut lines,
                format!("window_n{dim}_p{i}"),
                ok,
                format!("p = {p:.6}: ρ = {:.6}, pρ̃' = {rho_dual:.6}, ρδ(γ) = {rdg:.6}", set.rho),
            );
        }
    }
    for dim in 1..=10u32 {
        let n = dim as f64;
        let p_st = strauss_exponent(dim).unwrap();
        let lower = (1.0 + 2.0 / n).max(1.0 + 4.0 / (n + 2.0));
        check(
            &mut lines,
            format!("strauss_above_short_range_n{dim}"),
            p_st > lower,
            format!("p_St = {p_st} vs max(1+2/N, 1+4/(N+2)) = {lower}"),
        );
    }
    lines
}

/// Decay-estimate ratio for Gaussian data on a box wide enough to hold the
/// free evolution out to t = 50.
pub fn decay_suite() -> LabResult<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let exps = exponent_set(&params)?;
    let grid = Grid::new_1d(16384, 640.0)?;
    let eng = SpectralEngine::new(grid.clone());
    let f = Field::gaussian(grid, 1.0, 1.0)?;
    let ts: Vec<f64> = (0..100).map(|i| 0.5 * (50.0f64 / 0.5).powf(i as f64 / 99.0)).collect();
    let curve = decay_ratio_curve(&f, &exps, &ts, &eng)?;
    let sup = curve.iter().cloned().fold(0.0f64, f64::max);
    let min = curve.iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        &mut lines,
        "ratio_bounded",
        sup <= 5.0 && min > 0.0,
        format!("sup = {sup:.4}, min = {min:.4} over t ∈ [0.5, 50]"),
    );
    // the curve settles to a positive limit: last quarter varies < 2%
    let tail: Vec<f64> = curve[75..].to_vec();
    let t_min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = tail.iter().cloned().fold(0.0f64, f64::max);
    check(
        &mut lines,
        "ratio_settles",
        (t_max - t_min) / t_min <= 0.02 && t_min > 0.0,
        format!("tail range [{t_min:.4}, {t_max:.4}]"),
    );
    Ok(lines)
}

/// J(t) identities on Gaussian data.
pub fn jt_suite() -> LabResult<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let grid = Grid::new_1d(2048, 80.0)?;
    let eng = SpectralEngine::new(grid.clone());
    let f = Field::gaussian(grid.clone(), 1.0, 1.0)?;

    let jf = apply_j(&f, 0.0, &eng)?;
    let xf = multiply_by_coordinate(&f, 0);
    let rel = jf.rel_l2_distance(&xf)?;
    check(&mut lines, "t0_coordinate", rel <= 1e-12, format!("‖J(0)f - xf‖/‖xf‖ = {rel:e}"));

    let xnorm = f.weighted_norm();
    let mut worst: f64 = 0.0;
    for t in [0.5, 2.0, 10.0] {
        let evolved = free_propagate(&f, t, &eng)?;
        let jn = j_weighted_norm(&evolved, t, &eng)?;
        worst = worst.max((jn - xnorm).abs() / xnorm);
    }
    check(
        &mut lines,
        "free_flow_invariance",
        worst <= 1e-10,
        format!("max |‖J(t)e^{{itΔ}}f‖ - ‖xf‖|/‖xf‖ = {worst:e}"),
    );

    // first identity with the self-consistent |x|²/4t phases
    let mut worst: f64 = 0.0;
    for t in [0.5, 2.0] {
        let lhs = apply_j(&f, t, &eng)?;
        let dechirped = f.chirp(-1.0 / (4.0 * t));
        let grad = eng.gradient_component(&dechirped, 0)?;
        let rhs = grad.chirp(1.0 / (4.0 * t)).scaled(Complex64::new(0.0, 2.0 * t));
        let cut = 0.7 * grid.extent() / 2.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, (a, b)) in lhs.values().iter().zip(rhs.values()).enumerate() {
            if grid.coord(i).abs() <= cut {
                num += (a - b).norm_sqr();
                den += a.norm_sqr();
            }
        }
        worst = worst.max((num / den).sqrt());
    }
    check(
        &mut lines,
        "chirped_gradient_form",
        worst <= 1e-7,
        format!("interior relative deviation = {worst:e}"),
    );

    let one = free_propagate(&f, 1.0, &eng)?;
    let two = free_propagate(&free_propagate(&f, 0.3, &eng)?, 0.7, &eng)?;
    let rel = two.rel_l2_distance(&one)?;
    check(&mut lines, "group_property", rel <= 1e-12, format!("relative gap {rel:e}"));
    Ok(lines)
}

/// Pythagorean splitting defect for modulated Gaussian pairs.
pub fn pythagoras_suite() -> LabResult<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let grid = Grid::new_1d(512, 5.0)?;
    let dk = 2.0 * std::f64::consts::PI / 5.0;
    let psi = Field::gaussian(grid, 1.0, 0.7)?;
    for s in [0.0, 0.5, 1.0] {
        let mut defects = Vec::new();
        for sep in [4.0, 16.0, 64.0] {
            let d = orthogonal_splitting_defect(
                &[psi.clone(), psi.clone()],
                &[vec![0.0], vec![sep * dk]],
                s,
            )?;
            defects.push(d);
        }
        let mono = defects[0] >= defects[1] - 1e-12 && defects[1] >= defects[2] - 1e-12;
        check(
            &mut lines,
            format!("defect_s{s}"),
            mono && defects[2] <= 1e-3,
            format!(
                "defects at sep {{4,16,64}} = [{:e}, {:e}, {:e}]",
                defects[0], defects[1], defects[2]
            ),
        );
    }
    Ok(lines)
}

/// Mass/energy conservation along the soliton run.
pub fn conservation_suite() -> LabResult<Vec<CheckLine>> {
    let mut lines = Vec::new();
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let grid = Grid::new_1d(1024, 40.0)?;
    let eng = SpectralEngine::new(grid.clone());
    let q = soliton_closed_form_1d(4.0, 1.0, grid)?;
    let e0 = energy(&q, &params, &eng)?;
    let cfg = StepperConfig { dt: 1e-3, t_final: 5.0, ..Default::default() };
    let traj = evolve(&q, &cfg, &params, &eng, |_, _, _| {})?;
    let m0 = traj.mass[0];
    let mass_drift = traj.mass.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max);
    check(
        &mut lines,
        "mass_drift",
        mass_drift <= 1e-10 && !traj.flags.blowup,
        format!("max relative mass drift {mass_drift:e} over T = 5"),
    );
    let energy_drift = traj.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    check(
        &mut lines,
        "energy_drift",
        energy_drift <= 1e-6,
        format!("max energy drift {energy_drift:e} over T = 5 (E₀ = {e0:.6})"),
    );
    Ok(lines)
}
