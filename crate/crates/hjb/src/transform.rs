//! Discrete Legendre-Fenchel conjugation on uniform grids.
//!
//! `conjugate_slice` computes g(v) = max_p { v*p - f(p) } over the dual grid,
//! with a linear-time monotone-argmax scan when f is convex on its grid and a
//! direct scan otherwise. Nodes whose sup is attained at the dual truncation
//! boundary are flagged truncation-suspect rather than trusted: the true sup
//! over all of R may keep growing past the box, unless a +inf barrier inside
//! the grid already caps it.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::grid::{Axis, Grid, GridFn};

/// Grids for one conjugation: `dual` is the axis the sup runs over,
/// `primal` the axis of the output variable.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConjugatePlan {
    pub dual: Axis,
    pub primal: Axis,
}

/// Default half-width of the dual box when a caller has no better bound.
pub const DEFAULT_TRUNCATION_RADIUS: f64 = 64.0;

/// Slope-monotonicity tolerance for the convexity fast path.
const CONVEXITY_TOL: f64 = 1e-9;

impl ConjugatePlan {
    pub fn new(dual: Axis, primal: Axis) -> Result<Self, Error> {
        if (dual.lo + dual.hi).abs() > 1e-9 * dual.spacing().max(1.0) {
            return Err(Error::AsymmetricDualGrid {
                lo: dual.lo,
                hi: dual.hi,
            });
        }
        Ok(ConjugatePlan { dual, primal })
    }

    pub fn truncation_radius(&self) -> f64 {
        self.dual.hi
    }

    /// The plan for the second leg of a biconjugation.
    pub fn swapped(&self) -> Result<Self, Error> {
        ConjugatePlan::new(self.primal, self.dual)
    }
}

/// A conjugate slice: the values plus the per-node truncation-suspect mask.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugateFn {
    pub fun: GridFn,
    pub suspect: Vec<bool>,
    /// Half-width of the dual box the sup ran over.
    pub truncation_radius: f64,
}

impl ConjugateFn {
    /// Nodes that are finite and not truncation-suspect.
    pub fn trusted(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.fun.values.len())
            .filter(move |&i| self.fun.values[i].is_finite() && !self.suspect[i])
    }
}

/// True when the finite nodes are contiguous and the slopes between
/// consecutive finite nodes are nondecreasing within tolerance.
pub fn is_convex_on_grid(f: &GridFn) -> bool {
    let vals = &f.values;
    let first = vals.iter().position(|v| v.is_finite());
    let last = vals.iter().rposition(|v| v.is_finite());
    let (Some(first), Some(last)) = (first, last) else {
        return false;
    };
    if vals[first..=last].iter().any(|v| !v.is_finite()) {
        return false; // +inf hole inside the domain
    }
    let axis = f.grid.axes[0];
    let h = axis.spacing();
    let scale = vals[first..=last]
        .iter()
        .map(|v| v.to_f64().abs())
        .fold(1.0, f64::max);
    let mut prev_slope = f64::NEG_INFINITY;
    for j in first..last {
        let a = vals[j].to_f64();
        let b = vals[j + 1].to_f64();
        let slope = (b - a) / h;
        if slope < prev_slope - CONVEXITY_TOL * scale.max(1.0) / h {
            return false;
        }
        prev_slope = prev_slope.max(slope);
    }
    true
}

struct FiniteNodes {
    /// (grid index, coordinate, value)
    items: Vec<(usize, f64, f64)>,
    grid_len: usize,
}

fn finite_nodes(f: &GridFn) -> Result<FiniteNodes, Error> {
    if f.grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.grid.dim(),
        });
    }
    if f.values.iter().any(|v| v.is_minus_inf()) {
        return Err(Error::ImproperFunction);
    }
    let axis = f.grid.axes[0];
    let items: Vec<(usize, f64, f64)> = f
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(j, v)| (j, axis.coord(j), v.to_f64()))
        .collect();
    if items.is_empty() {
        return Err(Error::ImproperConjugate);
    }
    Ok(FiniteNodes {
        items,
        grid_len: axis.nodes,
    })
}

/// (max value, suspect flag) for one output node by direct scan.
fn sup_direct(nodes: &FiniteNodes, v: f64) -> (f64, bool) {
    let mut best = f64::NEG_INFINITY;
    let mut best_inner = f64::NEG_INFINITY;
    for &(j, p, fp) in &nodes.items {
        let val = v * p - fp;
        if val > best {
            best = val;
        }
        let boundary = j == 0 || j + 1 == nodes.grid_len;
        if !boundary && val > best_inner {
            best_inner = val;
        }
    }
    (best, best > best_inner)
}

/// Monotone two-pointer scan: valid when f is convex on its grid, because
/// the argmax of the concave profile p -> v*p - f(p) is nondecreasing in v.
fn sup_monotone(nodes: &FiniteNodes, out: &[f64]) -> Vec<(f64, bool)> {
    let items = &nodes.items;
    let mut j = 0usize;
    out.iter()
        .map(|&v| {
            let phi = |j: usize| v * items[j].1 - items[j].2;
            // rightmost maximizer of the concave profile
            while j + 1 < items.len() && phi(j + 1) >= phi(j) {
                j += 1;
            }
            let best = phi(j);
            let gj = items[j].0;
            let suspect = if gj + 1 == nodes.grid_len {
                // right grid edge: trusted only when the plateau extends to
                // an interior node of equal value
                !(j > 0 && phi(j - 1) >= best && items[j - 1].0 != 0)
            } else {
                // the walk leaves the left edge whenever an equal or better
                // node exists to the right, so landing on it means the max
                // is uniquely there
                gj == 0
            };
            (best, suspect)
        })
        .collect()
}

/// Conjugate of a 1-D slice sampled on the plan's dual grid.
pub fn conjugate_slice(f: &GridFn, plan: &ConjugatePlan) -> Result<ConjugateFn, Error> {
    if f.grid.axes[0] != plan.dual {
        return Err(Error::InvalidConfig(
            "slice is not sampled on the plan's dual grid".into(),
        ));
    }
    let nodes = finite_nodes(f)?;
    let out_coords: Vec<f64> = plan.primal.coords().collect();
    let results: Vec<(f64, bool)> = if is_convex_on_grid(f) {
        sup_monotone(&nodes, &out_coords)
    } else {
        out_coords.iter().map(|&v| sup_direct(&nodes, v)).collect()
    };
    let values = results
        .iter()
        .map(|&(g, _)| ExtReal::finite(g))
        .collect::<Result<Vec<_>, _>>()?;
    let suspect = results.iter().map(|&(_, s)| s).collect();
    Ok(ConjugateFn {
        fun: GridFn::new(Grid::new(vec![plan.primal])?, values)?,
        suspect,
        truncation_radius: plan.truncation_radius(),
    })
}

/// d-dimensional conjugate by axis-by-axis factorization:
/// sup over a box splits coordinate-wise for the bilinear pairing.
pub fn conjugate_nd(f: &GridFn, plans: &[ConjugatePlan]) -> Result<ConjugateFn, Error> {
    let d = f.grid.dim();
    if plans.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: plans.len(),
        });
    }
    if d == 1 {
        return conjugate_slice(f, &plans[0]);
    }
    for (k, plan) in plans.iter().enumerate() {
        if f.grid.axes[k] != plan.dual {
            return Err(Error::InvalidConfig(format!(
                "axis {k} is not the plan's dual grid"
            )));
        }
    }
    if f.values.iter().any(|v| v.is_minus_inf()) {
        return Err(Error::ImproperFunction);
    }
    if !f.values.iter().any(|v| v.is_finite()) {
        return Err(Error::ImproperConjugate);
    }

    // Work in raw IEEE: +inf marks "skip in sup"; a line that is identically
    // +inf conjugates to -inf, which negation turns back into a skip marker.
    let mut axes: Vec<Axis> = f.grid.axes.clone();
    let mut data = f.to_raw();
    let mut suspect = vec![false; data.len()];

    for k in (0..d).rev() {
        let out_axis = plans[k].primal;
        let line_len = axes[k].nodes;
        let stride: usize = axes[k + 1..].iter().map(|a| a.nodes).product();
        let outer: usize = axes[..k].iter().map(|a| a.nodes).product();
        let out_len = out_axis.nodes;
        let mut new_axes = axes.clone();
        new_axes[k] = out_axis;
        let new_total: usize = new_axes.iter().map(|a| a.nodes).product();
        let mut new_data = vec![f64::NEG_INFINITY; new_total];
        let mut new_suspect = vec![false; new_total];
        let in_coords: Vec<f64> = axes[k].coords().collect();
        let out_coords: Vec<f64> = out_axis.coords().collect();

        for o in 0..outer {
            for s in 0..stride {
                let base = o * line_len * stride + s;
                let new_base = o * out_len * stride + s;
                for (vi, &v) in out_coords.iter().enumerate() {
                    let mut best = f64::NEG_INFINITY;
                    let mut best_inner = f64::NEG_INFINITY;
                    let mut best_j = usize::MAX;
                    for (j, &p) in in_coords.iter().enumerate() {
                        let fp = data[base + j * stride];
                        if fp == f64::INFINITY {
                            continue;
                        }
                        let val = v * p - fp;
                        if val > best {
                            best = val;
                            best_j = j;
                        }
                        if j != 0 && j + 1 != line_len && val > best_inner {
                            best_inner = val;
                        }
                    }
                    let idx = new_base + vi * stride;
                    if best == f64::NEG_INFINITY {
                        // line identically +inf: empty effective domain
                        new_data[idx] = f64::NEG_INFINITY;
                        continue;
                    }
                    let carried = suspect[base + best_j * stride];
                    new_data[idx] = best;
                    new_suspect[idx] = carried || best > best_inner;
                }
            }
        }
        // negate so the next stage sees a plain conjugand again
        if k > 0 {
            for x in &mut new_data {
                *x = -*x;
            }
        }
        axes = new_axes;
        data = new_data;
        suspect = new_suspect;
    }

    let values = data
        .into_iter()
        .map(|x| {
            if x == f64::NEG_INFINITY {
                // empty line: conjugate over an empty set stays +inf-free;
                // surface it as +inf (no finite witness exists)
                Ok(ExtReal::PlusInf)
            } else {
                ExtReal::finite(x)
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(ConjugateFn {
        fun: GridFn::new(Grid::new(axes)?, values)?,
        suspect,
        truncation_radius: plans
            .iter()
            .map(|p| p.truncation_radius())
            .fold(0.0, f64::max),
    })
}

/// Conjugate applied twice on matched grids: the convex lsc envelope of f
/// on the grid interior.
pub fn biconjugate(f: &GridFn, plan: &ConjugatePlan) -> Result<ConjugateFn, Error> {
    let first = conjugate_slice(f, plan)?;
    conjugate_slice(&first.fun, &plan.swapped()?)
}

/// Maximal index intervals of finite nodes of a 1-D slice.
pub fn effective_domain(f: &GridFn) -> Result<Vec<(usize, usize)>, Error> {
    if f.grid.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.grid.dim(),
        });
    }
    if !f.proper {
        return Err(Error::ImproperFunction);
    }
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (j, v) in f.values.iter().enumerate() {
        if v.is_finite() {
            start.get_or_insert(j);
        } else if let Some(s) = start.take() {
            out.push((s, j - 1));
        }
    }
    if let Some(s) = start {
        out.push((s, f.values.len() - 1));
    }
    Ok(out)
}

/// sup |v| over the finite nodes of a 1-D slice: the discrete ||dom||.
pub fn domain_norm(f: &GridFn) -> Result<f64, Error> {
    let axis = f.grid.axes[0];
    Ok(effective_domain(f)?
        .iter()
        .flat_map(|&(a, b)| [axis.coord(a).abs(), axis.coord(b).abs()])
        .fold(0.0, f64::max))
}
