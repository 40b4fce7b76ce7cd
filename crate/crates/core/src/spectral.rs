//! FFT plans and spectral operations.
//!
//! Normalization: the forward transform is the plain DFT
//! û_k = Σ_j u_j e^{-ik·x_j-ish} (rustfft convention, index phases), the
//! inverse carries the 1/M^dim factor, so forward ∘ inverse = identity.
//! Under this convention Parseval reads
//!
//! ```text
//!   h^N Σ_j |u_j|²  =  (h/M)^N Σ_k |û_k|²,
//! ```
//!
//! which is what `spectral_l2_sq` returns. 2D transforms run the rows,
//! transpose, run the rows again and transpose back; row batches are
//! data-parallel under the `parallel` feature.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::exec;
use crate::field::Field;
use crate::grid::Grid;
use crate::Complex64;

pub struct SpectralEngine {
    grid: Arc<Grid>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralEngine {
    pub fn new(grid: Arc<Grid>) -> SpectralEngine {
        let mut planner = FftPlanner::new();
        let m = grid.points_per_axis();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        SpectralEngine { grid, forward, inverse }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn check(&self, field: &Field) -> Result<()> {
        if !field.grid().same_layout(&self.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn run_axis(&self, plan: &Arc<dyn Fft<f64>>, values: &mut [Complex64]) {
        let m = self.grid.points_per_axis();
        let scratch_len = plan.get_inplace_scratch_len();
        match self.grid.dim() {
            1 => {
                let mut scratch = vec![Complex64::default(); scratch_len];
                plan.process_with_scratch(values, &mut scratch);
            }
            _ => {
                let plan = plan.clone();
                exec::for_each_chunk(values, m, move |row| {
                    let mut scratch = vec![Complex64::default(); scratch_len];
                    plan.process_with_scratch(row, &mut scratch);
                });
            }
        }
    }

    fn transpose(values: &mut [Complex64], m: usize) {
        // square in-place transpose
        for iy in 0..m {
            for ix in (iy + 1)..m {
                values.swap(iy * m + ix, ix * m + iy);
            }
        }
    }

    /// In-place forward DFT of a raw value array (no normalization).
    pub fn forward_values(&self, values: &mut [Complex64]) {
        let m = self.grid.points_per_axis();
        self.run_axis(&self.forward, values);
        if self.grid.dim() == 2 {
            Self::transpose(values, m);
            self.run_axis(&self.forward, values);
            Self::transpose(values, m);
        }
    }

    /// In-place inverse DFT of a raw value array, including the 1/M^dim
    /// factor.
    pub fn inverse_values(&self, values: &mut [Complex64]) {
        let m = self.grid.points_per_axis();
        self.run_axis(&self.inverse, values);
        if self.grid.dim() == 2 {
            Self::transpose(values, m);
            self.run_axis(&self.inverse, values);
            Self::transpose(values, m);
        }
        let scale = 1.0 / self.grid.cell_count() as f64;
        exec::for_each_cell(values, |_, v| *v *= scale);
    }

    /// Frequency representation of `f`.
    pub fn forward(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        let mut values = f.values().to_vec();
        self.forward_values(&mut values);
        Ok(Field::from_parts(f.grid().clone(), values))
    }

    /// Inverse of [`SpectralEngine::forward`].
    pub fn inverse(&self, spec: &Field) -> Result<Field> {
        self.check(spec)?;
        let mut values = spec.values().to_vec();
        self.inverse_values(&mut values);
        Ok(Field::from_parts(spec.grid().clone(), values))
    }

    /// Frequency-side L² sum matching the physical-side quadrature:
    /// (h/M)^N Σ|û|².
    pub fn spectral_l2_sq(&self, spec: &Field) -> f64 {
        let w = (self.grid.spacing() / self.grid.points_per_axis() as f64)
            .powi(self.grid.dim() as i32);
        w * spec.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// Apply a multiplier `m(|k|²)` in frequency space.
    pub fn apply_symbol(&self, f: &Field, symbol: impl Fn(f64) -> Complex64 + Sync) -> Result<Field> {
        self.check(f)?;
        let mut values = f.values().to_vec();
        self.forward_values(&mut values);
        let grid = self.grid.clone();
        exec::for_each_cell(&mut values, |i, v| *v *= symbol(grid.wavenumber_sq(i)));
        self.inverse_values(&mut values);
        Ok(Field::from_parts(f.grid().clone(), values))
    }

    /// ‖∇f‖₂ via the spectral multiplier |k|².
    pub fn gradient_norm(&self, f: &Field) -> Result<f64> {
        self.check(f)?;
        let mut values = f.values().to_vec();
        self.forward_values(&mut values);
        let w = (self.grid.spacing() / self.grid.points_per_axis() as f64)
            .powi(self.grid.dim() as i32);
        let sum: f64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.wavenumber_sq(i) * v.norm_sqr())
            .sum();
        Ok((w * sum).sqrt())
    }

    /// Spectral gradient along one axis (i k_axis multiplier, Nyquist mode
    /// zeroed). Used by the J(t) cross-check.
    pub fn gradient_component(&self, f: &Field, axis: usize) -> Result<Field> {
        self.check(f)?;
        if axis as u32 >= self.grid.dim() {
            return Err(Error::Domain(format!("axis {axis} out of range")));
        }
        let mut values = f.values().to_vec();
        self.forward_values(&mut values);
        let m = self.grid.points_per_axis();
        let grid = self.grid.clone();
        let nyquist = grid.wavenumber(m / 2);
        exec::for_each_cell(&mut values, |i, v| {
            let j = if axis == 0 { i % m } else { i / m };
            let k = grid.wavenumber(j);
            // the Nyquist bin has no signed partner; drop it from odd symbols
            let k = if k == nyquist { 0.0 } else { k };
            *v *= Complex64::new(0.0, k);
        });
        self.inverse_values(&mut values);
        Ok(Field::from_parts(f.grid().clone(), values))
    }

    /// Evaluate the trigonometric interpolant of `f` at off-grid points
    /// x = `tau`·h - L/2 (fractional index coordinates, 1D only). Exact for
    /// band-limited data; O(M²).
    pub fn interpolate_1d(&self, f: &Field, taus: &[f64]) -> Result<Vec<Complex64>> {
        self.check(f)?;
        if self.grid.dim() != 1 {
            return Err(Error::UnsupportedDim(self.grid.dim()));
        }
        let m = self.grid.points_per_axis();
        let mut spec = f.values().to_vec();
        self.forward_values(&mut spec);
        let two_pi = 2.0 * std::f64::consts::PI;
        let out = exec::map_ordered(taus, |&tau| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in spec.iter().enumerate() {
                let freq = if j < m / 2 { j as isize } else { j as isize - m as isize };
                let phase = two_pi * freq as f64 * tau / m as f64;
                acc += c * Complex64::from_polar(1.0, phase);
            }
            acc / m as f64
        });
        Ok(out)
    }
}

/// Sample w(βx) on the grid of `w` (1D). Exact index maps for β ∈ {1, 2},
/// band-limited refinement for β = 1/2, trigonometric interpolation for
/// anything else.
///
/// A compression (β > 1) asks for values outside the box; those are taken
/// as zero — the decayed-profile semantics — rather than wrapped, which
/// would fold a spurious copy of the profile into the box.
pub(crate) fn dilate_sample_1d(w: &Field, beta: f64, eng: &SpectralEngine) -> Result<Field> {
    if w.grid().dim() != 1 {
        return Err(Error::UnsupportedDim(w.grid().dim()));
    }
    let grid = w.grid().clone();
    let m = grid.points_per_axis();
    let half = grid.extent() / 2.0;
    if (beta - 1.0).abs() < 1e-15 {
        return Ok(w.clone());
    }
    if (beta - 2.0).abs() < 1e-15 {
        // w(2x_i): source index 2i - M/2, in range only for the inner half
        let zero = Complex64::new(0.0, 0.0);
        let vals = (0..m)
            .map(|i| {
                if (m / 4..3 * m / 4).contains(&i) {
                    w.values()[2 * i - m / 2]
                } else {
                    zero
                }
            })
            .collect();
        return Field::new(grid, vals);
    }
    if (beta - 0.5).abs() < 1e-15 {
        // w(x_i/2) lands on the twice-refined interpolant at fine index M/2 + i
        let fine = upsample2_1d(w);
        let vals = (0..m).map(|i| fine[m / 2 + i]).collect();
        return Field::new(grid, vals);
    }
    let mut taus = Vec::with_capacity(m);
    let mut in_box = Vec::with_capacity(m);
    for i in 0..m {
        let x = beta * grid.coord(i);
        in_box.push(x >= -half && x < half);
        let mut tau = (x + half) / grid.spacing();
        let mf = m as f64;
        tau -= (tau / mf).floor() * mf;
        taus.push(tau);
    }
    let mut vals = eng.interpolate_1d(w, &taus)?;
    for (v, ok) in vals.iter_mut().zip(&in_box) {
        if !ok {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    Field::new(grid, vals)
}

/// Band-limited interpolant of `w` on the twice-refined grid (2M points,
/// same box), by spectral zero-padding with a symmetrically split Nyquist
/// bin.
pub(crate) fn upsample2_1d(w: &Field) -> Vec<Complex64> {
    let m = w.grid().points_per_axis();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(2 * m);
    let mut spec = w.values().to_vec();
    fwd.process(&mut spec);
    let mut fine = vec![Complex64::new(0.0, 0.0); 2 * m];
    fine[..m / 2].copy_from_slice(&spec[..m / 2]);
    fine[2 * m - m / 2 + 1..].copy_from_slice(&spec[m / 2 + 1..]);
    let nyq = spec[m / 2] * 0.5;
    fine[m / 2] = nyq;
    fine[2 * m - m / 2] = nyq;
    inv.process(&mut fine);
    let scale = 1.0 / m as f64;
    for v in fine.iter_mut() {
        *v *= scale;
    }
    fine
}
