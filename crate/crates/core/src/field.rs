//! Complex field on a periodic grid, with the quadrature norms and weighted
//! norms used by every diagnostic.
//!
//! All integrals are rectangle-rule sums h^N Σ(...), which is spectrally
//! accurate for smooth periodic integrands. Sums run in a fixed sequential
//! order regardless of the `parallel` feature: quadrature order is part of
//! the reproducibility contract. Pointwise maps (modulation, chirp, scalar
//! multiples) go through [`crate::exec`] and may run data-parallel.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::exec;
use crate::grid::Grid;
use crate::Complex64;

#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl Field {
    /// Wrap a value array, rejecting length mismatches and non-finite
    /// entries.
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != grid.cell_count() {
            return Err(Error::GridMismatch);
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Field { grid, values })
    }

    /// Like [`Field::new`] but without the finiteness scan. For internal
    /// construction from maps that cannot produce non-finite values.
    pub(crate) fn from_parts(grid: Arc<Grid>, values: Vec<Complex64>) -> Field {
        debug_assert_eq!(values.len(), grid.cell_count());
        Field { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Field {
        let n = grid.cell_count();
        Field { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Sample `f(x)` (1D) or `f([x, y])` (2D) on the grid.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> Complex64) -> Result<Field> {
        let m = grid.points_per_axis();
        let mut values = Vec::with_capacity(grid.cell_count());
        match grid.dim() {
            1 => {
                for i in 0..m {
                    values.push(f(&[grid.coord(i)]));
                }
            }
            _ => {
                for iy in 0..m {
                    let y = grid.coord(iy);
                    for ix in 0..m {
                        values.push(f(&[grid.coord(ix), y]));
                    }
                }
            }
        }
        Field::new(grid, values)
    }

    /// Centered Gaussian `amplitude · e^{-|x|²/(2 width²)}`.
    pub fn gaussian(grid: Arc<Grid>, amplitude: f64, width: f64) -> Result<Field> {
        let w2 = 2.0 * width * width;
        Field::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            Complex::new(amplitude * (-r2 / w2).exp(), 0.0)
        })
    }

    pub fn constant(grid: Arc<Grid>, value: Complex64) -> Field {
        let n = grid.cell_count();
        Field { grid, values: vec![value; n] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0f64, f64::max).sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// L^r quadrature norm, (h^N Σ|u|^r)^{1/r}; r = ∞ returns max |u|.
    pub fn lp_norm(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 1.0 {
            return Err(Error::Domain(format!("lp_norm requires r ≥ 1, got {r}")));
        }
        if r.is_infinite() {
            return Ok(self.max_abs());
        }
        let vol = self.grid.cell_volume();
        if r == 2.0 {
            let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
            return Ok((vol * s).sqrt());
        }
        let half_r = r / 2.0;
        let s: f64 = self.values.iter().map(|v| v.norm_sqr().powf(half_r)).sum();
        Ok((vol * s).powf(1.0 / r))
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0).expect("r = 2 is in range")
    }

    /// ‖xu‖₂ with centered coordinates, the weighted part of the 𝓕H¹ norm.
    pub fn weighted_norm(&self) -> f64 {
        let vol = self.grid.cell_volume();
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.radius_sq(i) * v.norm_sqr())
            .sum();
        (vol * s).sqrt()
    }

    /// ‖|x|^s u‖₂ for s ∈ [0, 1]: s = 0 is the L² norm, s = 1 the weighted
    /// norm.
    pub fn fh_sobolev_norm(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("fractional weight s must lie in [0,1], got {s}")));
        }
        if s == 0.0 {
            return Ok(self.l2_norm());
        }
        if s == 1.0 {
            return Ok(self.weighted_norm());
        }
        let vol = self.grid.cell_volume();
        let sum: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| self.grid.radius_sq(i).powf(s) * v.norm_sqr())
            .sum();
        Ok((vol * sum).sqrt())
    }

    /// Fraction of the mass sitting in the outer 10% shell of the box.
    /// Returns 0 for the zero field.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let mut total = 0.0;
        let mut shell = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total += m;
            if self.grid.in_boundary_shell(i) {
                shell += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            shell / total
        }
    }

    /// Plane-wave modulation e^{iξ·x} u. `xi` has one entry per axis.
    pub fn modulate(&self, xi: &[f64]) -> Result<Field> {
        if xi.len() != self.grid.dim() as usize {
            return Err(Error::Domain(format!(
                "modulation frequency has {} components for a {}-d grid",
                xi.len(),
                self.grid.dim()
            )));
        }
        let mut out = self.clone();
        let grid = self.grid.clone();
        let m = grid.points_per_axis();
        match grid.dim() {
            1 => {
                let k = xi[0];
                exec::for_each_cell(&mut out.values, |i, v| {
                    *v *= Complex::from_polar(1.0, k * grid.coord(i));
                });
            }
            _ => {
                let (kx, ky) = (xi[0], xi[1]);
                exec::for_each_cell(&mut out.values, |i, v| {
                    let phase = kx * grid.coord(i % m) + ky * grid.coord(i / m);
                    *v *= Complex::from_polar(1.0, phase);
                });
            }
        }
        Ok(out)
    }

    /// Quadratic chirp e^{ib|x|²} u.
    pub fn chirp(&self, b: f64) -> Field {
        let mut out = self.clone();
        let grid = self.grid.clone();
        exec::for_each_cell(&mut out.values, |i, v| {
            *v *= Complex::from_polar(1.0, b * grid.radius_sq(i));
        });
        out
    }

    /// Scalar multiple c·u.
    pub fn scaled(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        exec::for_each_cell(&mut out.values, |_, v| *v *= c);
        out
    }

    pub fn conjugate(&self) -> Field {
        let mut out = self.clone();
        exec::for_each_cell(&mut out.values, |_, v| *v = v.conj());
        out
    }

    /// Pointwise difference. Fails on grid mismatch.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        exec::zip_apply(&mut out.values, &other.values, |a, b| *a -= b);
        Ok(out)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        if !self.grid.same_layout(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let mut out = self.clone();
        exec::zip_apply(&mut out.values, &other.values, |a, b| *a += b);
        Ok(out)
    }

    /// Exact realization of the dilation f_ω(x) = ω^a f(ωx) on commensurate
    /// grids: the value array is reused verbatim (scaled by ω^a) on the grid
    /// with extent L/ω, so no interpolation enters. `a` is the amplitude
    /// exponent (2/(p-1) for the NLS scaling family, 0 for a bare dilation).
    pub fn rescale_commensurate(&self, omega: f64, amplitude_exponent: f64) -> Result<Field> {
        let grid = self.grid.rescaled(omega)?;
        let c = omega.powf(amplitude_exponent);
        let mut values = self.values.clone();
        exec::for_each_cell(&mut values, |_, v| *v *= c);
        Ok(Field { grid, values })
    }

    /// Relative L² distance ‖self - other‖₂ / ‖other‖₂.
    pub fn rel_l2_distance(&self, other: &Field) -> Result<f64> {
        let d = self.sub(other)?.l2_norm();
        let n = other.l2_norm();
        Ok(if n == 0.0 { d } else { d / n })
    }
}
