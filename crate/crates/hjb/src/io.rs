//! GridFn serialization: CSV (one node per line) and a JSON mirror.
//!
//! CSV layout: a header row naming the axes, then one row per node with the
//! index coordinates, the point coordinates, and the value, `+inf` spelled
//! `inf`. Both readers accept untrusted input and fail with a parse error
//! rather than panicking; they are the fuzzing entry points.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::grid::{Axis, Grid, GridFn};

/// Hard caps so corrupt headers cannot trigger huge allocations.
const MAX_DIM: usize = 8;
const MAX_NODES_PER_AXIS: usize = 1 << 20;
const MAX_TOTAL_NODES: usize = 1 << 24;

/// JSON mirror of the CSV: axis descriptors plus the value array in
/// row-major node order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFnJson {
    pub axes: Vec<AxisJson>,
    pub values: Vec<ExtReal>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxisJson {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

pub fn default_axis_names(dim: usize) -> Vec<String> {
    (0..dim).map(|k| format!("axis{k}")).collect()
}

/// Writes the CSV form. `names` must have one entry per axis.
pub fn write_csv(f: &GridFn, names: &[String]) -> Result<String, Error> {
    let d = f.grid.dim();
    if names.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: names.len(),
        });
    }
    let mut out = String::new();
    for n in names {
        let _ = write!(out, "idx_{n},");
    }
    for n in names {
        let _ = write!(out, "{n},");
    }
    out.push_str("value\n");
    for flat in 0..f.grid.num_nodes() {
        let multi = f.grid.multi_index(flat);
        for &i in &multi {
            let _ = write!(out, "{i},");
        }
        for (k, &i) in multi.iter().enumerate() {
            let _ = write!(out, "{},", f.grid.axes[k].coord(i));
        }
        let _ = writeln!(out, "{}", f.values[flat]);
    }
    Ok(out)
}

/// Parses the CSV form back into a GridFn, validating the lattice.
pub fn read_csv(text: &str) -> Result<(GridFn, Vec<String>), Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols.len() % 2 == 0 {
        return Err(Error::Parse(format!(
            "header must have 2*dim+1 columns, got {}",
            cols.len()
        )));
    }
    let d = (cols.len() - 1) / 2;
    if d > MAX_DIM {
        return Err(Error::Parse(format!("dimension {d} exceeds cap {MAX_DIM}")));
    }
    if cols[cols.len() - 1] != "value" {
        return Err(Error::Parse("last header column must be 'value'".into()));
    }
    let names: Vec<String> = cols[d..2 * d].iter().map(|s| s.to_string()).collect();

    struct Row {
        idx: Vec<usize>,
        point: Vec<f64>,
        value: ExtReal,
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 2 * d + 1 {
            return Err(Error::Parse(format!(
                "row {}: expected {} fields, got {}",
                lineno + 2,
                2 * d + 1,
                parts.len()
            )));
        }
        let mut idx = Vec::with_capacity(d);
        for p in &parts[..d] {
            let i: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad index {p:?}", lineno + 2)))?;
            if i >= MAX_NODES_PER_AXIS {
                return Err(Error::Parse(format!("index {i} exceeds cap")));
            }
            idx.push(i);
        }
        let mut point = Vec::with_capacity(d);
        for p in &parts[d..2 * d] {
            let x: f64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad coordinate {p:?}", lineno + 2)))?;
            if x.is_nan() {
                return Err(Error::Parse("NaN coordinate".into()));
            }
            point.push(x);
        }
        let value: ExtReal = parts[2 * d].parse()?;
        rows.push(Row { idx, point, value });
        if rows.len() > MAX_TOTAL_NODES {
            return Err(Error::Parse("too many rows".into()));
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }

    let mut nodes = vec![0usize; d];
    for r in &rows {
        for k in 0..d {
            nodes[k] = nodes[k].max(r.idx[k] + 1);
        }
    }
    let mut total: usize = 1;
    for &n in &nodes {
        if n < 2 {
            return Err(Error::Parse("each axis needs at least 2 nodes".into()));
        }
        total = total
            .checked_mul(n)
            .filter(|&t| t <= MAX_TOTAL_NODES)
            .ok_or_else(|| Error::Parse("grid too large".into()))?;
    }
    if rows.len() != total {
        return Err(Error::Parse(format!(
            "expected {total} rows for the full lattice, got {}",
            rows.len()
        )));
    }

    // Axis bounds from the extreme indices.
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for r in &rows {
        for k in 0..d {
            if r.idx[k] == 0 {
                lo[k] = r.point[k];
            }
            if r.idx[k] + 1 == nodes[k] {
                hi[k] = r.point[k];
            }
        }
    }
    let mut axes = Vec::with_capacity(d);
    for k in 0..d {
        axes.push(Axis::new(lo[k], hi[k], nodes[k]).map_err(|_| {
            Error::Parse(format!("axis {k}: bad bounds [{}, {}]", lo[k], hi[k]))
        })?);
    }
    let grid = Grid::new(axes)?;

    let mut values = vec![None; total];
    for r in &rows {
        for k in 0..d {
            let expect = grid.axes[k].coord(r.idx[k]);
            let tol = 1e-9 * grid.axes[k].spacing().max(1.0);
            if (r.point[k] - expect).abs() > tol {
                return Err(Error::Parse(format!(
                    "coordinate {} does not sit on the uniform lattice (expected {expect})",
                    r.point[k]
                )));
            }
        }
        let flat = grid.flat_index(&r.idx);
        if values[flat].is_some() {
            return Err(Error::Parse(format!("duplicate node {:?}", r.idx)));
        }
        values[flat] = Some(r.value);
    }
    let values: Vec<ExtReal> = values
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Parse("missing lattice nodes".into()))?;

    Ok((GridFn::new(grid, values)?, names))
}

pub fn write_json(f: &GridFn, names: &[String]) -> Result<String, Error> {
    let d = f.grid.dim();
    if names.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: names.len(),
        });
    }
    let mirror = GridFnJson {
        axes: f
            .grid
            .axes
            .iter()
            .zip(names)
            .map(|(a, n)| AxisJson {
                name: n.clone(),
                lo: a.lo,
                hi: a.hi,
                nodes: a.nodes,
            })
            .collect(),
        values: f.values.clone(),
    };
    Ok(serde_json::to_string_pretty(&mirror)?)
}

pub fn read_json(text: &str) -> Result<(GridFn, Vec<String>), Error> {
    let mirror: GridFnJson = serde_json::from_str(text)?;
    if mirror.axes.is_empty() || mirror.axes.len() > MAX_DIM {
        return Err(Error::Parse("bad axis count".into()));
    }
    let mut axes = Vec::with_capacity(mirror.axes.len());
    let mut names = Vec::with_capacity(mirror.axes.len());
    let mut total: usize = 1;
    for a in &mirror.axes {
        if a.nodes > MAX_NODES_PER_AXIS {
            return Err(Error::Parse("axis too large".into()));
        }
        total = total
            .checked_mul(a.nodes.max(1))
            .filter(|&t| t <= MAX_TOTAL_NODES)
            .ok_or_else(|| Error::Parse("grid too large".into()))?;
        axes.push(
            Axis::new(a.lo, a.hi, a.nodes)
                .map_err(|_| Error::Parse(format!("bad axis {:?}", a.name)))?,
        );
        names.push(a.name.clone());
    }
    let grid = Grid::new(axes)?;
    Ok((GridFn::new(grid, mirror.values)?, names))
}
