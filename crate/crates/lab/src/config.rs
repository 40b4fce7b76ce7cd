//! JSON experiment configuration.
//!
//! Every field has a desk-scale default (N = 1, p = 4, L = 40, M = 1024,
//! dt = 1e-3, T = 50), so `{}` is a valid config. The config hash is the
//! SHA-256 of the canonical JSON encoding (sorted keys), truncated to 16 hex
//! digits; identical hashes mean bit-identical reruns.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::sync::Arc;

use nls_core::diagnostics::ClassifierPolicy;
use nls_core::exponents::{validate_window, FocusingSign, PhysParams};
use nls_core::propagator::StepperConfig;
use nls_core::Grid;

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSpec {
    pub dim: u32,
    pub power: f64,
    /// -1 focusing, +1 defocusing.
    pub focusing_sign: i8,
}

impl Default for ParamsSpec {
    fn default() -> Self {
        ParamsSpec { dim: 1, power: 4.0, focusing_sign: -1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub extent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points_per_axis: 1024, extent: 40.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSpec {
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_stride: usize,
    pub domain_guard: f64,
    pub blowup_factor: f64,
    pub halt_on_domain_guard: bool,
}

impl Default for StepperSpec {
    fn default() -> Self {
        StepperSpec {
            dt: 1e-3,
            t_final: 50.0,
            snapshot_stride: 100,
            domain_guard: 1e-6,
            blowup_factor: 1e6,
            halt_on_domain_guard: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSpec {
    pub margin: f64,
    pub min_horizon: f64,
    pub transient_fraction: f64,
    pub floor_fraction: f64,
    pub min_fit_samples: usize,
    pub min_scatter_time: f64,
    pub wrap_fraction: f64,
    pub concentration_factor: f64,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        let p = ClassifierPolicy::default();
        ClassifierSpec {
            margin: p.margin,
            min_horizon: p.min_horizon,
            transient_fraction: p.transient_fraction,
            floor_fraction: p.floor_fraction,
            min_fit_samples: p.min_fit_samples,
            min_scatter_time: p.min_scatter_time,
            wrap_fraction: p.wrap_fraction,
            concentration_factor: p.concentration_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// c·Q with Q the ground state of the configured (N, p).
    ScaledGroundState,
    /// c·e^{-|x|²/(2 width²)}.
    Gaussian,
    /// c·e^{i·chirp·|x|²}·base.
    Chirped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    GroundState,
    Gaussian,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub amplitude: f64,
    /// Gaussian width (gaussian family or gaussian base).
    pub width: f64,
    /// Chirp strength b (chirped family only).
    pub chirp: f64,
    /// Base profile of the chirped family.
    pub base: BaseKind,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            kind: FamilyKind::ScaledGroundState,
            amplitude: 1.0,
            width: 1.0,
            chirp: 0.0,
            base: BaseKind::GroundState,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BisectionSpec {
    pub c_lo: f64,
    pub c_hi: f64,
    pub budget: usize,
}

impl Default for BisectionSpec {
    fn default() -> Self {
        BisectionSpec { c_lo: 0.05, c_hi: 1.0, budget: 12 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Chirp magnitudes |b| probed by the oscillation sweep.
    pub chirps: Vec<f64>,
    pub both_signs: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { chirps: vec![0.5, 1.0, 2.0, 4.0, 8.0], both_signs: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ParamsSpec,
    pub grid: GridSpec,
    pub stepper: StepperSpec,
    pub classifier: ClassifierSpec,
    pub family: FamilySpec,
    pub bisection: BisectionSpec,
    pub sweep: SweepSpec,
    /// Reserved for randomized perturbations; part of the hash.
    pub seed: u64,
    /// Re-run once on a doubled box when the domain guard trips.
    pub retry_on_domain_guard: bool,
    /// Sweep the negative time direction as well (via conjugated data).
    pub negative_time: bool,
    /// Persist a field snapshot every this many recorded samples.
    pub save_fields_every: Option<usize>,
    /// Accept (N, p) outside the strict window.
    pub allow_window_violation: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: Default::default(),
            grid: Default::default(),
            stepper: Default::default(),
            classifier: Default::default(),
            family: Default::default(),
            bisection: Default::default(),
            sweep: Default::default(),
            seed: 0,
            retry_on_domain_guard: false,
            negative_time: false,
            save_fields_every: None,
            allow_window_violation: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<ExperimentConfig> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| LabError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> LabResult<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn phys_params(&self) -> LabResult<PhysParams> {
        let sign = FocusingSign::from_i8(self.params.focusing_sign)
            .map_err(|e| LabError::InvalidConfig(e.to_string()))?;
        PhysParams::new(self.params.dim, self.params.power, sign)
            .map_err(|e| LabError::InvalidConfig(e.to_string()))
    }

    pub fn make_grid(&self) -> LabResult<Arc<Grid>> {
        Grid::new(self.params.dim, self.grid.points_per_axis, self.grid.extent)
            .map_err(|e| LabError::InvalidConfig(e.to_string()))
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig {
            dt: self.stepper.dt,
            t_final: self.stepper.t_final,
            snapshot_stride: self.stepper.snapshot_stride,
            domain_guard: self.stepper.domain_guard,
            blowup_factor: self.stepper.blowup_factor,
            halt_on_domain_guard: self.stepper.halt_on_domain_guard,
        }
    }

    pub fn classifier_policy(&self) -> ClassifierPolicy {
        ClassifierPolicy {
            margin: self.classifier.margin,
            min_horizon: self.classifier.min_horizon,
            transient_fraction: self.classifier.transient_fraction,
            floor_fraction: self.classifier.floor_fraction,
            min_fit_samples: self.classifier.min_fit_samples,
            min_scatter_time: self.classifier.min_scatter_time,
            wrap_fraction: self.classifier.wrap_fraction,
            concentration_factor: self.classifier.concentration_factor,
        }
    }

    pub fn validate(&self) -> LabResult<()> {
        let params = self.phys_params()?;
        self.make_grid()?;
        self.stepper_config()
            .validate()
            .map_err(|e| LabError::InvalidConfig(e.to_string()))?;
        if !(self.family.amplitude > 0.0) {
            return Err(LabError::InvalidConfig("family amplitude must be positive".into()));
        }
        if !(self.family.width > 0.0) {
            return Err(LabError::InvalidConfig("gaussian width must be positive".into()));
        }
        if !(self.bisection.c_lo > 0.0 && self.bisection.c_lo < self.bisection.c_hi) {
            return Err(LabError::InvalidConfig(
                "bisection bracket needs 0 < c_lo < c_hi".into(),
            ));
        }
        if self.sweep.chirps.iter().any(|&b| !(b > 0.0)) {
            return Err(LabError::InvalidConfig("sweep chirps must be positive".into()));
        }
        if !self.allow_window_violation {
            let report = validate_window(&params);
            if !report.all_passed() {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name)
                    .collect();
                return Err(LabError::InvalidConfig(format!(
                    "(N, p) fails the window checks {:?}; set allow_window_violation to override",
                    failed
                )));
            }
        }
        Ok(())
    }

    /// 16-hex-digit hash of the canonical (sorted-key) JSON encoding.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Serialize any report with sorted keys (stable output files).
pub fn to_sorted_json<T: Serialize>(value: &T) -> LabResult<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)?)
}
