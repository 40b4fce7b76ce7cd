//! Data families: one-parameter amplitude rays c ↦ c·ψ (optionally
//! chirped). Since ℓ(cf) = c·ℓ(f), bisection in the amplitude is bisection
//! in ℓ along the ray.

use std::sync::Arc;

use nls_core::exponents::PhysParams;
use nls_core::groundstate::{petviashvili_solve, soliton_closed_form_1d, PetviashviliOptions};
use nls_core::{Field, Grid, SpectralEngine};

use crate::config::{BaseKind, ExperimentConfig, FamilyKind, FamilySpec};
use crate::error::{LabError, LabResult};

/// A family resolved on a concrete grid: the unit-amplitude base profile
/// plus the chirp applied to every member.
pub struct ResolvedFamily {
    pub label: String,
    base: Field,
    chirp: f64,
}

impl ResolvedFamily {
    /// Member c·e^{i·chirp·|x|²}·base.
    pub fn member(&self, amplitude: f64) -> Field {
        let scaled = self.base.scaled(nls_core::Complex64::new(amplitude, 0.0));
        if self.chirp == 0.0 {
            scaled
        } else {
            scaled.chirp(self.chirp)
        }
    }

    /// The unchirped unit-amplitude profile.
    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn chirp(&self) -> f64 {
        self.chirp
    }

    /// Family with the chirp replaced (for sweeps over b).
    pub fn with_chirp(&self, b: f64) -> ResolvedFamily {
        ResolvedFamily { label: self.label.clone(), base: self.base.clone(), chirp: b }
    }
}

/// Unit-amplitude ground state for the configured problem: closed form in
/// 1D, Petviashvili elsewhere.
pub fn ground_state_profile(
    params: &PhysParams,
    grid: Arc<Grid>,
    eng: &SpectralEngine,
) -> LabResult<Field> {
    if grid.dim() == 1 {
        Ok(soliton_closed_form_1d(params.power, 1.0, grid)?)
    } else {
        let sol = petviashvili_solve(params, grid, eng, &PetviashviliOptions::default())?;
        if !sol.converged {
            return Err(LabError::InvariantFailure(format!(
                "ground-state solve did not converge (residual {})",
                sol.residual_norm
            )));
        }
        Ok(sol.profile)
    }
}

pub fn resolve_family(
    spec: &FamilySpec,
    params: &PhysParams,
    grid: Arc<Grid>,
    eng: &SpectralEngine,
) -> LabResult<ResolvedFamily> {
    let (label, base, chirp) = match spec.kind {
        FamilyKind::ScaledGroundState => (
            "scaled_ground_state".to_string(),
            ground_state_profile(params, grid, eng)?,
            0.0,
        ),
        FamilyKind::Gaussian => (
            format!("gaussian(width={})", spec.width),
            Field::gaussian(grid, 1.0, spec.width)?,
            0.0,
        ),
        FamilyKind::Chirped => {
            let base = match spec.base {
                BaseKind::GroundState => ground_state_profile(params, grid, eng)?,
                BaseKind::Gaussian => Field::gaussian(grid, 1.0, spec.width)?,
            };
            (format!("chirped(b={}, base={:?})", spec.chirp, spec.base), base, spec.chirp)
        }
    };
    Ok(ResolvedFamily { label, base, chirp })
}

/// The configured family's member at the configured amplitude, on a given
/// grid (used both for the main run and for doubled-box retries).
pub fn initial_data(
    cfg: &ExperimentConfig,
    grid: Arc<Grid>,
    eng: &SpectralEngine,
) -> LabResult<Field> {
    let params = cfg.phys_params()?;
    let family = resolve_family(&cfg.family, &params, grid, eng)?;
    Ok(family.member(cfg.family.amplitude))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn scaled_ground_state_member_scales_ell_linearly() {
        let cfg = ExperimentConfig::default();
        let params = cfg.phys_params().unwrap();
        let grid = cfg.make_grid().unwrap();
        let eng = SpectralEngine::new(grid.clone());
        let fam = resolve_family(&cfg.family, &params, grid, &eng).unwrap();
        let e1 = nls_core::diagnostics::ell(&fam.member(1.0), &params);
        let e2 = nls_core::diagnostics::ell(&fam.member(0.25), &params);
        assert!((e2 - 0.25 * e1).abs() <= 1e-12 * e1);
    }

    #[test]
    fn chirp_preserves_every_ell_ingredient() {
        let mut cfg = ExperimentConfig::default();
        cfg.family.kind = crate::config::FamilyKind::Chirped;
        cfg.family.chirp = 2.0;
        let params = cfg.phys_params().unwrap();
        let grid = cfg.make_grid().unwrap();
        let eng = SpectralEngine::new(grid.clone());
        let fam = resolve_family(&cfg.family, &params, grid, &eng).unwrap();
        let chirped = fam.member(1.2);
        let plain = fam.base().scaled(nls_core::Complex64::new(1.2, 0.0));
        assert!((chirped.l2_norm() - plain.l2_norm()).abs() < 1e-12);
        assert!((chirped.weighted_norm() - plain.weighted_norm()).abs() < 1e-10);
    }
}
