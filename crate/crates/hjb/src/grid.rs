//! Uniform rectangular grids and extended-real-valued grid functions.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extreal::ExtReal;

/// One uniform axis: `nodes` equally spaced points on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self, Error> {
        if !(lo.is_finite() && hi.is_finite()) || nodes < 2 || hi <= lo {
            return Err(Error::BadAxis { lo, hi, nodes });
        }
        Ok(Axis { lo, hi, nodes })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        debug_assert!(i < self.nodes);
        if i + 1 == self.nodes {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nodes).map(|i| self.coord(i))
    }

    /// Cell index and fractional offset for an in-range coordinate.
    /// Points within `1e-9` spacings of the box are snapped inside.
    pub fn locate(&self, x: f64) -> Result<(usize, f64), Error> {
        let h = self.spacing();
        let slack = 1e-9 * h.max(1.0);
        if x < self.lo - slack || x > self.hi + slack {
            return Err(Error::OutOfDomain { point: vec![x] });
        }
        let x = x.clamp(self.lo, self.hi);
        let raw = (x - self.lo) / h;
        let mut cell = raw.floor() as usize;
        if cell + 2 > self.nodes {
            cell = self.nodes - 2;
        }
        let w = ((x - self.coord(cell)) / h).clamp(0.0, 1.0);
        Ok((cell, w))
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-9 * self.spacing().max(1.0);
        x >= self.lo - slack && x <= self.hi + slack
    }

    /// Index of the node nearest to `x` (clamped to the box).
    pub fn nearest(&self, x: f64) -> usize {
        let raw = ((x - self.lo) / self.spacing()).round();
        (raw.max(0.0) as usize).min(self.nodes - 1)
    }
}

/// Rectangular product grid, row-major node order (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self, Error> {
        if axes.is_empty() {
            return Err(Error::InvalidConfig("grid needs at least one axis".into()));
        }
        Ok(Grid { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dim());
        let mut idx = 0;
        for (a, &i) in self.axes.iter().zip(multi) {
            debug_assert!(i < a.nodes);
            idx = idx * a.nodes + i;
        }
        idx
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            out[k] = flat % self.axes[k].nodes;
            flat /= self.axes[k].nodes;
        }
        out
    }

    pub fn node_coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.coord(i))
            .collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dim() && point.iter().zip(&self.axes).all(|(&x, a)| a.contains(x))
    }
}

/// An extended-real function sampled on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    pub grid: Grid,
    pub values: Vec<ExtReal>,
    /// No `-inf` entries and at least one finite value.
    pub proper: bool,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<ExtReal>) -> Result<Self, Error> {
        if values.len() != grid.num_nodes() {
            return Err(Error::LengthMismatch {
                expected: grid.num_nodes(),
                got: values.len(),
            });
        }
        let proper = values.iter().any(|v| v.is_finite())
            && values.iter().all(|v| !v.is_minus_inf());
        Ok(GridFn {
            grid,
            values,
            proper,
        })
    }

    /// Samples a pointwise closed form on every node.
    pub fn sample<F: FnMut(&[f64]) -> ExtReal>(grid: Grid, mut f: F) -> Result<Self, Error> {
        let values = (0..grid.num_nodes())
            .map(|i| f(&grid.node_coords(i)))
            .collect();
        GridFn::new(grid, values)
    }

    pub fn constant(grid: Grid, v: ExtReal) -> Result<Self, Error> {
        let n = grid.num_nodes();
        GridFn::new(grid, vec![v; n])
    }

    pub fn value_at(&self, multi: &[usize]) -> ExtReal {
        self.values[self.grid.flat_index(multi)]
    }

    /// Multilinear interpolation among the 2^d surrounding nodes.
    ///
    /// If any surrounding node is `+inf` the result is `+inf`: the
    /// interpolant never dips below the lsc envelope of the samples.
    pub fn eval_interp(&self, point: &[f64]) -> Result<ExtReal, Error> {
        if point.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                got: point.len(),
            });
        }
        let mut cells = Vec::with_capacity(point.len());
        for (a, &x) in self.grid.axes.iter().zip(point) {
            match a.locate(x) {
                Ok(cw) => cells.push(cw),
                Err(_) => {
                    return Err(Error::OutOfDomain {
                        point: point.to_vec(),
                    })
                }
            }
        }
        let d = cells.len();
        let mut acc = 0.0;
        let mut corner = vec![0usize; d];
        for mask in 0..(1usize << d) {
            let mut weight = 1.0;
            for (k, &(cell, w)) in cells.iter().enumerate() {
                let hi = (mask >> k) & 1 == 1;
                corner[k] = cell + hi as usize;
                weight *= if hi { w } else { 1.0 - w };
            }
            match self.value_at(&corner) {
                ExtReal::PlusInf => {
                    if weight > 0.0 {
                        return Ok(ExtReal::PlusInf);
                    }
                }
                ExtReal::MinusInf => {
                    if weight > 0.0 {
                        return Ok(ExtReal::MinusInf);
                    }
                }
                ExtReal::Finite(v) => acc += weight * v,
            }
        }
        ExtReal::finite(acc)
    }

    /// Rejects `-inf` entries and certifies the proper flag.
    pub fn lsc_regularize(self) -> Result<Self, Error> {
        if self.values.iter().any(|v| v.is_minus_inf()) {
            return Err(Error::ImproperFunction);
        }
        if !self.values.iter().any(|v| v.is_finite()) {
            return Err(Error::ImproperFunction);
        }
        Ok(GridFn {
            proper: true,
            ..self
        })
    }

    /// Raw IEEE view of the values (tokens become IEEE infinities).
    pub fn to_raw(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    pub fn from_raw(grid: Grid, raw: Vec<f64>) -> Result<Self, Error> {
        let values = raw
            .into_iter()
            .map(ExtReal::finite)
            .collect::<Result<Vec<_>, _>>()?;
        GridFn::new(grid, values)
    }
}
