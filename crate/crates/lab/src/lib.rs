//! Experiment harness for scattering-threshold studies of the focusing
//! mass-subcritical nonlinear Schrödinger equation.
//!
//! The lab wires the numerical core into reproducible experiments: single
//! classified runs, negative-energy witnesses, the standing-wave gap
//! demonstration, amplitude bisection for the minimal non-scattering level,
//! quadratic-chirp sweeps, and the pinned verification suites. Everything is
//! driven by a JSON [`config::ExperimentConfig`]; a run directory holds the
//! resolved config, a `record.json`, the fixed-schema `trajectory.csv` and
//! field snapshots. Identical configs produce byte-identical trajectory
//! files.

pub mod config;
pub mod error;
pub mod family;
pub mod gap;
pub mod oscillate;
pub mod runner;
pub mod threshold;
pub mod verify;
pub mod witness;

pub use error::{LabError, LabResult};
