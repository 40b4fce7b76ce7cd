//! Numerical core for scattering studies of the focusing mass-subcritical
//! nonlinear Schrödinger equation
//!
//! ```text
//!     i ∂_t u + Δu = λ |u|^{p-1} u,   u(0) ∈ 𝓕H¹,   λ = ±1,
//! ```
//!
//! on a periodic spectral grid. The crate provides
//!
//! * [`exponents`] — the (ρ, γ, ρ̃, γ̃) exponent system attached to (N, p),
//!   the Strauss exponent, admissibility, and window validation;
//! * [`grid`] / [`field`] — periodic grids, complex fields, quadrature and
//!   weighted norms, the scale-invariant level `ell`;
//! * [`spectral`] — FFT plans and spectral multipliers;
//! * [`propagator`] — the exact free propagator, Strang split-step evolution,
//!   and the J(t) = e^{itΔ} x e^{-itΔ} operator;
//! * [`groundstate`] — closed-form 1D solitons and Petviashvili iteration;
//! * [`diagnostics`] — trajectory records, space-time norms, the
//!   scattering classifier, pseudo-conformal identities, and the
//!   Pythagorean splitting defect.
//!
//! Data-parallel kernels use rayon when the `parallel` feature (default) is
//! enabled and fall back to sequential loops otherwise. All reductions keep a
//! fixed summation order in both modes, so results are reproducible
//! bit-for-bit run to run.

pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod exponents;
pub mod field;
pub mod grid;
pub mod groundstate;
pub mod propagator;
pub mod snapshot;
pub mod spectral;

pub use error::{Error, Result};
pub use exponents::{ExponentSet, FocusingSign, PhysParams};
pub use field::Field;
pub use grid::Grid;
pub use spectral::SpectralEngine;

/// Complex scalar used throughout.
pub type Complex64 = num_complex::Complex<f64>;
