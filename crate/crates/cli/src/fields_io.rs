//! Field file formats: CSV dumps with 17 significant digits (so f64 values
//! round-trip bit-exactly) and legacy-ASCII VTK structured points for
//! external visualization.
//!
//! Node order in both formats is the storage order: x fastest.

use std::fmt::Write as _;
use std::path::Path;

use spinframe_core::domain::{Grid, Lattice, VectorField};

use crate::errors::{CliError, CliResult};

fn fmt_val(v: f64) -> String {
    // 16 digits after the point in scientific notation = 17 significant.
    format!("{v:.16e}")
}

/// Writes named vector fields plus node coordinates as CSV.
pub fn write_fields_csv(
    path: &Path,
    lattice: &Lattice,
    grid: &Grid,
    fields: &[(&str, &VectorField)],
) -> CliResult<()> {
    let mut out = String::new();
    out.push_str("x,y,z");
    for (name, _) in fields {
        for c in 1..=3 {
            let _ = write!(out, ",{name}_{c}");
        }
    }
    out.push('\n');
    for idx in 0..grid.len() {
        let pos = lattice.position(grid.fractional(idx));
        let _ = write!(
            out,
            "{},{},{}",
            fmt_val(pos[0]),
            fmt_val(pos[1]),
            fmt_val(pos[2])
        );
        for (_, f) in fields {
            let v = f.data()[idx];
            let _ = write!(
                out,
                ",{},{},{}",
                fmt_val(v[0]),
                fmt_val(v[1]),
                fmt_val(v[2])
            );
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a CSV produced by `write_fields_csv` back into named fields.
/// The grid must be supplied (the CSV stores node data, not dimensions).
pub fn read_fields_csv(path: &Path, grid: &Grid) -> CliResult<Vec<(String, VectorField)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read field file {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty field file", path.display())))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "x" || cols[1] != "y" || cols[2] != "z" {
        return Err(CliError::Config(format!(
            "{}: malformed header {header:?}",
            path.display()
        )));
    }
    if !(cols.len() - 3).is_multiple_of(3) {
        return Err(CliError::Config(format!(
            "{}: field columns must come in triplets",
            path.display()
        )));
    }
    let nfields = (cols.len() - 3) / 3;
    let mut names = Vec::with_capacity(nfields);
    for f in 0..nfields {
        let base = cols[3 + 3 * f];
        let name = base.strip_suffix("_1").ok_or_else(|| {
            CliError::Config(format!(
                "{}: unexpected column name {base:?}",
                path.display()
            ))
        })?;
        names.push(name.to_string());
    }
    let mut data: Vec<Vec<[f64; 3]>> = vec![Vec::with_capacity(grid.len()); nfields];
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != cols.len() {
            return Err(CliError::Config(format!(
                "{}: row {} has {} columns, expected {}",
                path.display(),
                lineno + 2,
                vals.len(),
                cols.len()
            )));
        }
        for f in 0..nfields {
            let mut v = [0.0; 3];
            for c in 0..3 {
                v[c] = vals[3 + 3 * f + c].parse().map_err(|e| {
                    CliError::Config(format!(
                        "{}: row {}: bad number: {e}",
                        path.display(),
                        lineno + 2
                    ))
                })?;
            }
            data[f].push(v);
        }
    }
    let mut out = Vec::with_capacity(nfields);
    for (name, d) in names.into_iter().zip(data) {
        if d.len() != grid.len() {
            return Err(CliError::Config(format!(
                "{}: {} rows of data, expected {} for grid {:?}",
                path.display(),
                d.len(),
                grid.len(),
                grid.dims()
            )));
        }
        let field =
            VectorField::from_data(*grid, d).map_err(|e| CliError::Config(e.to_string()))?;
        out.push((name, field));
    }
    Ok(out)
}

/// Writes legacy-ASCII VTK structured points with one VECTORS attribute per
/// field. Spacing uses the generator lengths; skew lattices are rendered on
/// their rectified bounding axes (visualization-only approximation).
pub fn write_fields_vtk(
    path: &Path,
    lattice: &Lattice,
    grid: &Grid,
    fields: &[(&str, &VectorField)],
) -> CliResult<()> {
    let n = grid.dims();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("spinframe vector fields\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET STRUCTURED_POINTS\n");
    let _ = writeln!(out, "DIMENSIONS {} {} {}", n[0], n[1], n[2]);
    out.push_str("ORIGIN 0 0 0\n");
    let b = lattice.basis();
    let spacing: Vec<f64> = (0..3).map(|a| b.column(a).norm() / n[a] as f64).collect();
    let _ = writeln!(
        out,
        "SPACING {} {} {}",
        fmt_val(spacing[0]),
        fmt_val(spacing[1]),
        fmt_val(spacing[2])
    );
    let _ = writeln!(out, "POINT_DATA {}", grid.len());
    for (name, f) in fields {
        let _ = writeln!(out, "VECTORS {name} double");
        for v in f.data() {
            let _ = writeln!(out, "{} {} {}", fmt_val(v[0]), fmt_val(v[1]), fmt_val(v[2]));
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}
