//! Field snapshot persistence.
//!
//! Binary layout, little-endian: header `{dim: u32, points_per_axis: u32,
//! extent: f64}` followed by the values as interleaved (re, im) f64 pairs in
//! row-major order. 1D fields can also be exported as `(x, re, im)` CSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::Complex64;

pub fn write_field(path: &Path, field: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let grid = field.grid();
    w.write_all(&grid.dim().to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&grid.extent().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut u32buf = [0u8; 4];
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut u32buf)?;
    let dim = u32::from_le_bytes(u32buf);
    r.read_exact(&mut u32buf)?;
    let m = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut f64buf)?;
    let extent = f64::from_le_bytes(f64buf);
    let grid = Grid::new(dim, m, extent)?;
    let n = grid.cell_count();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut f64buf)?;
        let re = f64::from_le_bytes(f64buf);
        r.read_exact(&mut f64buf)?;
        let im = f64::from_le_bytes(f64buf);
        values.push(Complex64::new(re, im));
    }
    // trailing bytes mean a corrupt file
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after field data".into()));
    }
    Field::new(grid, values)
}

/// `(x, re, im)` CSV export, 1D only.
pub fn write_field_csv_1d(path: &Path, field: &Field) -> Result<()> {
    if field.grid().dim() != 1 {
        return Err(Error::UnsupportedDim(field.grid().dim()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,re,im")?;
    for (i, v) in field.values().iter().enumerate() {
        writeln!(w, "{},{},{}", field.grid().coord(i), v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}
