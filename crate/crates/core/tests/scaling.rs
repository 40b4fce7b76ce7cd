//! Dynamic scaling tests: the exact scaling family maps trajectories onto
//! each other, so classification verdicts are scale-invariant, and evolved
//! standing waves rotate at the rate ω².

use nls_core::diagnostics::{classify, ClassifierPolicy, Verdict};
use nls_core::exponents::{exponent_set, PhysParams};
use nls_core::groundstate::{scale_family, soliton_closed_form_1d};
use nls_core::propagator::{evolve, StepperConfig};
use nls_core::{Field, Grid, SpectralEngine};

fn classify_scaled(u0_base: &Field, omega: f64, params: &PhysParams) -> Verdict {
    // u_ω on the commensurate grid, evolved over the reparametrized horizon
    // T/ω² at step dt/ω², judged by the policy with time thresholds scaled
    // the same way.
    let scaled = u0_base
        .rescale_commensurate(omega, params.scaling_exponent())
        .unwrap();
    let eng = SpectralEngine::new(scaled.grid().clone());
    let s = omega * omega;
    let cfg = StepperConfig {
        dt: 1e-3 / s,
        t_final: 50.0 / s,
        snapshot_stride: 100,
        ..Default::default()
    };
    let exps = exponent_set(params).unwrap();
    let policy = ClassifierPolicy::default().rescaled(omega);
    let traj = evolve(&scaled, &cfg, params, &eng, |_, _, _| {}).unwrap();
    classify(&traj, &exps, &policy).verdict
}

#[test]
fn verdicts_are_invariant_under_exact_rescaling() {
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let grid = Grid::new_1d(1024, 40.0).unwrap();
    let q = soliton_closed_form_1d(4.0, 1.0, grid).unwrap();
    for (amp, expect) in [(0.3, Verdict::Scatter), (1.0, Verdict::NonScatter)] {
        let u0 = q.scaled(nls_core::Complex64::new(amp, 0.0));
        let base = classify_scaled(&u0, 1.0, &params);
        assert_eq!(base, expect, "amplitude {amp}");
        for omega in [0.5, 2.0] {
            let v = classify_scaled(&u0, omega, &params);
            assert_eq!(v, base, "amplitude {amp}, omega {omega}");
        }
    }
}

#[test]
fn standing_wave_rotates_at_omega_squared() {
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let grid = Grid::new_1d(1024, 40.0).unwrap();
    let eng = SpectralEngine::new(grid.clone());
    let q = soliton_closed_form_1d(4.0, 1.0, grid.clone()).unwrap();
    let t_final = 1.0;
    for omega in [1.0f64, 2.0] {
        let profile = scale_family(&q, omega, &params, &eng).unwrap().field;
        let cfg = StepperConfig { dt: 1e-4, t_final, snapshot_stride: 100, ..Default::default() };
        let mut final_state = None;
        let traj = evolve(&profile, &cfg, &params, &eng, |_, t, f| {
            if t >= t_final {
                final_state = Some(f.clone());
            }
        })
        .unwrap();
        assert!(traj.is_clean());
        let uf = final_state.unwrap();
        let m = grid.points_per_axis();
        // phase advance of the peak over [0, T] is ω²T and the modulus holds
        let peak0 = profile.values()[m / 2];
        let peak_t = uf.values()[m / 2];
        let expected = omega * omega * t_final;
        let measured = (peak_t / peak0).arg();
        let wrapped = (measured - expected + std::f64::consts::PI)
            .rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI;
        assert!(
            wrapped.abs() <= 2e-3,
            "omega = {omega}: phase advance {measured} vs {expected}"
        );
        assert!(
            (peak_t.norm() - peak0.norm()).abs() <= 1e-3 * peak0.norm(),
            "omega = {omega}: peak modulus drifted"
        );
    }
}

#[test]
fn evolved_profile_holds_shape_over_long_horizon() {
    // |u(t)| stays within 1e-3 of the profile over T = 5 for the ω-family
    let params = PhysParams::focusing(1, 4.0).unwrap();
    let grid = Grid::new_1d(1024, 40.0).unwrap();
    let eng = SpectralEngine::new(grid.clone());
    let q = soliton_closed_form_1d(4.0, 1.0, grid.clone()).unwrap();
    let fam = scale_family(&q, 2.0, &params, &eng).unwrap().field;
    let cfg = StepperConfig { dt: 1e-3, t_final: 5.0, ..Default::default() };
    let mut final_state = None;
    evolve(&fam, &cfg, &params, &eng, |_, t, f| {
        if t >= 5.0 {
            final_state = Some(f.clone());
        }
    })
    .unwrap();
    let uf = final_state.unwrap();
    let moduli = Field::new(
        grid,
        uf.values().iter().map(|v| nls_core::Complex64::new(v.norm(), 0.0)).collect(),
    )
    .unwrap();
    let rel = moduli.sub(&fam).unwrap().l2_norm() / fam.l2_norm();
    assert!(rel <= 1e-3, "modulus deviation {rel}");
}
