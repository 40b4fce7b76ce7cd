//! Periodic spectral grid.
//!
//! The box is [-L/2, L/2)^dim with M points per axis (M a power of two),
//! spacing h = L/M, centered coordinates x_i = -L/2 + i·h, and wavenumbers
//! k_j = 2πj/L for j ∈ {-M/2, …, M/2-1} stored in FFT layout. Since M is a
//! power of two, h·M = L holds exactly in floating point.

use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: u32,
    points_per_axis: usize,
    extent: f64,
    spacing: f64,
    coords: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl Grid {
    pub fn new(dim: u32, points_per_axis: usize, extent: f64) -> Result<Arc<Grid>> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDim(dim));
        }
        if !points_per_axis.is_power_of_two() || points_per_axis < 2 {
            return Err(Error::NotPowerOfTwo(points_per_axis));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::Domain(format!("box extent must be positive, got {extent}")));
        }
        let m = points_per_axis;
        let spacing = extent / m as f64;
        let coords = (0..m).map(|i| -extent / 2.0 + i as f64 * spacing).collect();
        let dk = 2.0 * std::f64::consts::PI / extent;
        let wavenumbers = (0..m)
            .map(|j| {
                let f = if j < m / 2 { j as isize } else { j as isize - m as isize };
                f as f64 * dk
            })
            .collect();
        Ok(Arc::new(Grid { dim, points_per_axis: m, extent, spacing, coords, wavenumbers }))
    }

    pub fn new_1d(points: usize, extent: f64) -> Result<Arc<Grid>> {
        Self::new(1, points, extent)
    }

    pub fn new_2d(points_per_axis: usize, extent: f64) -> Result<Arc<Grid>> {
        Self::new(2, points_per_axis, extent)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of cells, M^dim.
    pub fn cell_count(&self) -> usize {
        match self.dim {
            1 => self.points_per_axis,
            _ => self.points_per_axis * self.points_per_axis,
        }
    }

    /// Quadrature weight h^dim of the rectangle rule.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Centered coordinate along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Wavenumber of FFT bin j along one axis.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.wavenumbers[j]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// |x|² at flat index `idx` (row-major, x fastest).
    pub fn radius_sq(&self, idx: usize) -> f64 {
        match self.dim {
            1 => {
                let x = self.coords[idx];
                x * x
            }
            _ => {
                let m = self.points_per_axis;
                let x = self.coords[idx % m];
                let y = self.coords[idx / m];
                x * x + y * y
            }
        }
    }

    /// |k|² at flat spectral index `idx` (same layout as `radius_sq`).
    pub fn wavenumber_sq(&self, idx: usize) -> f64 {
        match self.dim {
            1 => {
                let k = self.wavenumbers[idx];
                k * k
            }
            _ => {
                let m = self.points_per_axis;
                let kx = self.wavenumbers[idx % m];
                let ky = self.wavenumbers[idx / m];
                kx * kx + ky * ky
            }
        }
    }

    /// True when the cell at `idx` lies in the outer 10% shell of the box
    /// along any axis. Weighted diagnostics stop being meaningful once
    /// mass accumulates here.
    pub fn in_boundary_shell(&self, idx: usize) -> bool {
        let cut = 0.9 * self.extent / 2.0;
        match self.dim {
            1 => self.coords[idx].abs() >= cut,
            _ => {
                let m = self.points_per_axis;
                self.coords[idx % m].abs() >= cut || self.coords[idx / m].abs() >= cut
            }
        }
    }

    /// Grid carrying the exact ω-rescaling: same point count, extent L/ω.
    /// A field resampled under x ↦ ωx keeps its value array and moves to
    /// this grid, so the dilation is an exact index identity.
    pub fn rescaled(&self, omega: f64) -> Result<Arc<Grid>> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("rescale factor must be positive, got {omega}")));
        }
        Grid::new(self.dim, self.points_per_axis, self.extent / omega)
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points_per_axis == other.points_per_axis
            && self.extent == other.extent
    }
}
