//! Backward dynamic programming for the value function
//!
//!   V(t0,x0) = inf { g(x(T)) + integral of L(t, x(t), x'(t)) dt },
//!
//! optimal-trajectory extraction, and verification of the
//! lower-semicontinuous-solution inequalities.
//!
//! The recursion is
//!
//!   V(t_j, x) = min over v of [ V(t_{j+1}, x + dt v) + cost(t_j, x, v) ]
//!
//! with cost the adaptive quadrature of s -> L(s, x + (s-t_j)v, v) over the
//! step (single-sample rules lose O(sqrt(dt)) on integrable 1/sqrt
//! singularities). The candidate set joins the velocity grid with the
//! node-aligned displacements k*dx/dt, whose lookups are interpolation-free,
//! and in-recursion lookups are "lsc-safe" (chord or neighbor-cell
//! extrapolation, whichever is higher), so the min never harvests an
//! interpolation undershoot at kinks or discontinuities of the propagated
//! value.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::geometry::{subderivative, subdifferential_probe};
use crate::grid::{Axis, Grid, GridFn};
use crate::models::{HamiltonianModel, LagrangianModel, ValueModel};
use crate::sampler::Sampler;

pub const DEFAULT_VELOCITY_NODES: usize = 129;
/// Inflation of the (Q4)/(Q5) box when deriving the velocity grid.
pub const DOMAIN_BOX_INFLATION: f64 = 1.05;

/// Relative tolerance of the per-step Lagrangian quadrature.
const QUAD_REL_TOL: f64 = 1e-7;
const QUAD_MAX_DEPTH: u32 = 30;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VelocityGrid {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl VelocityGrid {
    pub fn vmax(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Terminal data: a sampled slice, or an evaluable closed form (which lets
/// the solver pad the space domain by the reachable cone).
#[derive(Clone)]
pub enum TerminalData {
    Field(GridFn),
    Model(Arc<ValueModel>),
}

#[derive(Clone)]
pub struct DpConfig {
    pub time: Axis,
    pub space: Axis,
    pub velocity: VelocityGrid,
    pub terminal: TerminalData,
    pub lagrangian: Arc<LagrangianModel>,
}

impl DpConfig {
    /// Velocity grid covering the sampled dom L box, inflated 5%.
    pub fn velocity_from_domain(
        lagrangian: &LagrangianModel,
        time: &Axis,
        space: &Axis,
        nodes: usize,
    ) -> Result<VelocityGrid, Error> {
        let mut bound: f64 = 0.0;
        for i in 0..17 {
            for j in 0..17 {
                let t = time.lo + (time.hi - time.lo) * i as f64 / 16.0;
                let x = space.lo + (space.hi - space.lo) * j as f64 / 16.0;
                if let Some(b) = lagrangian.domain_bound(t, x) {
                    bound = bound.max(b);
                }
            }
        }
        if bound == 0.0 {
            bound = 1.0;
        }
        let b = bound * DOMAIN_BOX_INFLATION;
        Ok(VelocityGrid {
            lo: -b,
            hi: b,
            nodes,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveManifest {
    pub requested_space: Axis,
    pub solved_space: Axis,
    pub pad_cells: usize,
    pub velocity: VelocityGrid,
    pub aligned_span: usize,
    pub quad_rel_tol: f64,
}

/// The computed value function with its argmin policy.
pub struct ValueField {
    /// V on (time x requested space).
    pub fun: GridFn,
    /// argmin velocity per (layer, requested node); None at the terminal
    /// layer and wherever the value is +inf.
    pub policy: Vec<Option<f64>>,
    pub manifest: SolveManifest,
    time: Axis,
    solved_axis: Axis,
    solved: Vec<f64>,
    solved_policy: Vec<f64>,
    lagrangian: Arc<LagrangianModel>,
    terminal: TerminalData,
    velocity: VelocityGrid,
}

impl ValueField {
    /// V at a (possibly off-node) point of the solved (padded) domain,
    /// plain multilinear interpolation.
    pub fn eval(&self, t: f64, x: f64) -> Result<ExtReal, Error> {
        let (jt, wt) = self.time.locate(t)?;
        let (jx, wx) = self.solved_axis.locate(x)?;
        let n = self.solved_axis.nodes;
        let mut acc = 0.0;
        for (dj, wj) in [(0, 1.0 - wt), (1, wt)] {
            for (dx, wxx) in [(0, 1.0 - wx), (1, wx)] {
                let w = wj * wxx;
                let v = self.solved[(jt + dj) * n + (jx + dx)];
                if v == f64::INFINITY {
                    if w > 0.0 {
                        return Ok(ExtReal::PlusInf);
                    }
                } else {
                    acc += w * v;
                }
            }
        }
        ExtReal::finite(acc)
    }

    pub fn time_axis(&self) -> Axis {
        self.time
    }

    pub fn solved_axis(&self) -> Axis {
        self.solved_axis
    }
}

/// Integral of L along the straight step segment, adaptive midpoint
/// bisection. Integrable singularities get graded subdivision; a panel
/// still +inf at the depth cap makes the whole step +inf.
pub fn segment_cost(l: &LagrangianModel, t0: f64, dt: f64, x: f64, v: f64) -> f64 {
    if dt <= 0.0 {
        return 0.0;
    }
    let f = |s: f64| l.eval(s, x + (s - t0) * v, v).to_f64();
    fn rec(
        f: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        est: f64,
        depth: u32,
        tol: f64,
    ) -> f64 {
        let w = hi - lo;
        let m1 = lo + 0.25 * w;
        let m2 = lo + 0.75 * w;
        let f1 = f(m1);
        let f2 = f(m2);
        // a panel whose samples stay +inf through repeated splits lies in
        // {L = +inf} on positive measure: the step integral is +inf
        // (measure-zero singularities always expose finite samples)
        if !f1.is_finite() && !f2.is_finite() && !est.is_finite() && depth >= 6 {
            return f64::INFINITY;
        }
        let e1 = f1 * 0.5 * w;
        let e2 = f2 * 0.5 * w;
        if depth >= QUAD_MAX_DEPTH {
            return e1 + e2; // +inf propagates naturally
        }
        let s = e1 + e2;
        if s.is_finite() && est.is_finite() && (s - est).abs() <= tol * (1.0 + s.abs()) {
            return s;
        }
        let mid = lo + 0.5 * w;
        rec(f, lo, mid, e1, depth + 1, tol) + rec(f, mid, hi, e2, depth + 1, tol)
    }
    let est = f(t0 + 0.5 * dt) * dt;
    rec(&f, t0, t0 + dt, est, 0, QUAD_REL_TOL)
}

/// Increment-ratio jump test for cell k = [k, k+1]: its increment dwarfs
/// the smaller finite neighbor increment.
fn cell_jump(vals: &[f64], k: usize) -> bool {
    let n = vals.len();
    if k + 1 >= n {
        return false;
    }
    let d = (vals[k + 1] - vals[k]).abs();
    if !d.is_finite() {
        return true;
    }
    let scale = 1.0 + vals[k].abs().max(vals[k + 1].abs());
    let mut m = f64::INFINITY;
    if k >= 1 {
        let dl = (vals[k] - vals[k - 1]).abs();
        if dl.is_finite() {
            m = m.min(dl);
        }
    }
    if k + 2 < n {
        let dr = (vals[k + 2] - vals[k + 1]).abs();
        if dr.is_finite() {
            m = m.min(dr);
        }
    }
    m.is_finite() && d > 4.0 * m + 1e-9 * scale
}

/// lsc-safe lookup in one raw layer: the chord or a neighbor-cell linear
/// extrapolation, whichever is larger, with +inf absorption.
///
/// On convex stretches the extrapolations fall below the chord, so smooth
/// accuracy is the chord's. At concave kinks of the propagated value the
/// chord undershoots (and the min() of the recursion would harvest that);
/// the higher-side extrapolation covers those, so the lookup errs toward
/// +inf, never toward -inf. Cells in or next to a detected jump carry no
/// sub-cell information at all and return +inf: the node-aligned candidate
/// family still reaches their endpoints exactly.
fn guarded_lookup(vals: &[f64], axis: &Axis, xq: f64) -> f64 {
    let n = vals.len();
    let h = axis.spacing();
    let slack = 1e-9 * h.max(1.0);
    if xq < axis.lo - slack || xq > axis.hi + slack {
        return f64::INFINITY;
    }
    let xq = xq.clamp(axis.lo, axis.hi);
    let raw = (xq - axis.lo) / h;
    let mut i = raw.floor() as usize;
    if i + 2 > n {
        i = n - 2;
    }
    let w = ((xq - axis.coord(i)) / h).clamp(0.0, 1.0);
    let lo = vals[i];
    let hi = vals[i + 1];
    if w < 1e-12 {
        return lo;
    }
    if w > 1.0 - 1e-12 {
        return hi;
    }
    if lo == f64::INFINITY || hi == f64::INFINITY {
        return f64::INFINITY;
    }
    if cell_jump(vals, i) || (i >= 1 && cell_jump(vals, i - 1)) || cell_jump(vals, i + 1) {
        return f64::INFINITY;
    }
    let mut best = (1.0 - w) * lo + w * hi;
    if i >= 1 && vals[i - 1].is_finite() {
        let extrap_left = lo + (lo - vals[i - 1]) * w;
        best = best.max(extrap_left);
    }
    if i + 2 < n && vals[i + 2].is_finite() {
        let extrap_right = hi + (hi - vals[i + 2]) * (1.0 - w);
        best = best.max(extrap_right);
    }
    best
}

struct Candidates {
    aligned: Vec<(isize, f64)>, // (cell displacement, velocity)
    vgrid: Vec<f64>,
}

fn candidates(velocity: &VelocityGrid, dt: f64, dx: f64) -> Candidates {
    let kmax = (velocity.vmax() * dt / dx).floor() as isize;
    let aligned = (-kmax..=kmax)
        .map(|k| (k, k as f64 * dx / dt))
        .filter(|&(_, v)| v >= velocity.lo - 1e-12 && v <= velocity.hi + 1e-12)
        .collect();
    let vgrid = (0..velocity.nodes)
        .map(|i| {
            velocity.lo + (velocity.hi - velocity.lo) * i as f64 / (velocity.nodes - 1) as f64
        })
        .collect();
    Candidates { aligned, vgrid }
}

/// Fast domain rejection for a candidate velocity: the step integral is
/// +inf when |v| exceeds the dom L hull probed along the segment.
fn outside_domain(l: &LagrangianModel, t0: f64, dt: f64, x: f64, v: f64) -> bool {
    let mut bound: f64 = 0.0;
    let mut any = false;
    for c in [0.0, 0.5, 1.0] {
        if let Some(b) = l.domain_bound(t0 + c * dt, x + c * dt * v) {
            bound = bound.max(b);
            any = true;
        }
    }
    any && v.abs() > bound + 1e-12
}

/// Backward DP solve. With Model terminal data the space grid is padded
/// internally by the reachable cone so no spurious state constraint binds;
/// the returned field is restricted to the requested grid.
pub fn solve_value(cfg: &DpConfig) -> Result<ValueField, Error> {
    let time = cfg.time;
    let space = cfg.space;
    let nt = time.nodes;
    let dt = time.spacing();
    let dx = space.spacing();
    let vel = cfg.velocity;

    // the velocity box must cover dom L over the solve region
    if let TerminalData::Field(f) = &cfg.terminal {
        if f.grid.dim() != 1 || f.grid.axes[0] != space {
            return Err(Error::InvalidConfig(
                "terminal field must live on the space axis".into(),
            ));
        }
        if !f.proper {
            return Err(Error::ImproperFunction);
        }
    }
    for i in 0..9 {
        for j in 0..9 {
            let t = time.lo + (time.hi - time.lo) * i as f64 / 8.0;
            let x = space.lo + (space.hi - space.lo) * j as f64 / 8.0;
            if let Some(b) = cfg.lagrangian.domain_bound(t, x) {
                if b > vel.vmax() + 1e-9 {
                    return Err(Error::VelocityCoverage {
                        have: (vel.lo, vel.hi),
                        need: b,
                    });
                }
            }
        }
    }

    let (pad_cells, solved_axis) = match &cfg.terminal {
        TerminalData::Model(_) => {
            let pad = ((vel.vmax() * (time.hi - time.lo)) / dx).ceil() as usize + 1;
            let axis = Axis::new(
                space.lo - pad as f64 * dx,
                space.hi + pad as f64 * dx,
                space.nodes + 2 * pad,
            )?;
            (pad, axis)
        }
        TerminalData::Field(_) => (0, space),
    };
    let nxp = solved_axis.nodes;

    let mut solved = vec![f64::INFINITY; nt * nxp];
    let mut solved_policy = vec![f64::NAN; nt * nxp];
    match &cfg.terminal {
        TerminalData::Model(m) => {
            for j in 0..nxp {
                solved[(nt - 1) * nxp + j] = m.eval(time.hi, solved_axis.coord(j));
            }
        }
        TerminalData::Field(f) => {
            for j in 0..nxp {
                solved[(nt - 1) * nxp + j] = f.values[j].to_f64();
            }
        }
    }
    if solved[(nt - 1) * nxp..].iter().any(|v| *v == f64::NEG_INFINITY) {
        return Err(Error::ImproperFunction);
    }

    let cand = candidates(&vel, dt, dx);
    for j in (0..nt - 1).rev() {
        let t0 = time.coord(j);
        let (prev_rows, next_rows) = solved.split_at_mut((j + 1) * nxp);
        let row_next = &next_rows[..nxp];
        let row = &mut prev_rows[j * nxp..(j + 1) * nxp];
        let pol = &mut solved_policy[j * nxp..(j + 1) * nxp];
        for i in 0..nxp {
            let x = solved_axis.coord(i);
            let mut best = f64::INFINITY;
            let mut best_v = f64::NAN;
            let mut consider = |cost: f64, v: f64| {
                if cost < best
                    || (cost == best
                        && (v.abs() < best_v.abs() || (v.abs() == best_v.abs() && v < best_v)))
                {
                    best = cost;
                    best_v = v;
                }
            };
            for &(k, v) in &cand.aligned {
                let ii = i as isize + k;
                if ii < 0 || ii >= nxp as isize {
                    continue;
                }
                let next = row_next[ii as usize];
                if next == f64::INFINITY || outside_domain(&cfg.lagrangian, t0, dt, x, v) {
                    continue;
                }
                let c = segment_cost(&cfg.lagrangian, t0, dt, x, v);
                consider(next + c, v);
            }
            for &v in &cand.vgrid {
                if outside_domain(&cfg.lagrangian, t0, dt, x, v) {
                    continue;
                }
                let next = guarded_lookup(row_next, &solved_axis, x + dt * v);
                if next == f64::INFINITY {
                    continue;
                }
                let c = segment_cost(&cfg.lagrangian, t0, dt, x, v);
                consider(next + c, v);
            }
            row[i] = best;
            pol[i] = if best.is_finite() { best_v } else { f64::NAN };
        }
    }

    // restrict to the requested grid
    let offset = pad_cells;
    let grid = Grid::new(vec![time, space])?;
    let mut values = Vec::with_capacity(nt * space.nodes);
    let mut policy = Vec::with_capacity(nt * space.nodes);
    for j in 0..nt {
        for i in 0..space.nodes {
            let raw = solved[j * nxp + offset + i];
            values.push(ExtReal::finite(raw)?);
            let p = solved_policy[j * nxp + offset + i];
            policy.push(if j + 1 < nt && p.is_finite() { Some(p) } else { None });
        }
    }
    Ok(ValueField {
        fun: GridFn::new(grid, values)?,
        policy,
        manifest: SolveManifest {
            requested_space: space,
            solved_space: solved_axis,
            pad_cells,
            velocity: vel,
            aligned_span: cand.aligned.len(),
            quad_rel_tol: QUAD_REL_TOL,
        },
        time,
        solved_axis,
        solved,
        solved_policy,
        lagrangian: cfg.lagrangian.clone(),
        terminal: cfg.terminal.clone(),
        velocity: vel,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryNode {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

/// An absolutely continuous pair (x,u) stored as time-stamped nodes with
/// piecewise-linear interpolation between them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub nodes: Vec<TrajectoryNode>,
    pub velocities: Vec<f64>,
    pub requested_start: (f64, f64),
    /// The node-snapped start actually used.
    pub start: (f64, f64),
}

impl Trajectory {
    /// Worst membership margin of ((dx/dt), (du/dt)) in Q(t_i, x_i):
    /// positive when -du/dt >= L(t_i, x_i, v) strictly.
    pub fn q_segment_margins(&self, l: &LagrangianModel) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.nodes.len().saturating_sub(1) {
            let a = &self.nodes[k];
            let b = &self.nodes[k + 1];
            let dt = b.t - a.t;
            let v = (b.x - a.x) / dt;
            let eta = (b.u - a.u) / dt;
            let lv = l.eval(a.t, a.x, v);
            out.push(match lv {
                ExtReal::Finite(lval) => -eta - lval,
                ExtReal::PlusInf => f64::NEG_INFINITY,
                ExtReal::MinusInf => f64::INFINITY,
            });
        }
        out
    }
}

/// Follows the policy forward from the node nearest to (t0, x0), carrying
/// u(t) = g(x(T)) + cost-to-go along the discrete path.
pub fn extract_trajectory(field: &ValueField, t0: f64, x0: f64) -> Result<Trajectory, Error> {
    let time = field.time;
    let req = field.manifest.requested_space;
    if !req.contains(x0) || !time.contains(t0) {
        return Err(Error::OutOfDomain { point: vec![t0, x0] });
    }
    let j0 = time.nearest(t0);
    let i0 = field.solved_axis.nearest(x0);
    let nxp = field.solved_axis.nodes;
    if field.solved[j0 * nxp + i0] == f64::INFINITY {
        return Err(Error::OutOfDomain { point: vec![t0, x0] });
    }
    let start = (time.coord(j0), field.solved_axis.coord(i0));
    let dt = time.spacing();
    let dx = field.solved_axis.spacing();
    let cand = candidates(&field.velocity, dt, dx);
    let nt = time.nodes;

    let mut xs = vec![start.1];
    let mut costs = Vec::new();
    let mut vels = Vec::new();
    let mut x_cur = start.1;
    for j in j0..nt - 1 {
        let t = time.coord(j);
        let row_next = &field.solved[(j + 1) * nxp..(j + 2) * nxp];
        let mut best = f64::INFINITY;
        let mut best_v = f64::NAN;
        let mut best_cost = f64::NAN;
        let mut consider = |tot: f64, v: f64, c: f64, bv: &mut f64, bc: &mut f64, b: &mut f64| {
            if tot < *b || (tot == *b && (v.abs() < bv.abs() || (v.abs() == bv.abs() && v < *bv)))
            {
                *b = tot;
                *bv = v;
                *bc = c;
            }
        };
        for &(_, v) in &cand.aligned {
            let xq = x_cur + dt * v;
            if outside_domain(&field.lagrangian, t, dt, x_cur, v) {
                continue;
            }
            let next = guarded_lookup(row_next, &field.solved_axis, xq);
            if next == f64::INFINITY {
                continue;
            }
            let c = segment_cost(&field.lagrangian, t, dt, x_cur, v);
            consider(next + c, v, c, &mut best_v, &mut best_cost, &mut best);
        }
        for &v in &cand.vgrid {
            if outside_domain(&field.lagrangian, t, dt, x_cur, v) {
                continue;
            }
            let next = guarded_lookup(row_next, &field.solved_axis, x_cur + dt * v);
            if next == f64::INFINITY {
                continue;
            }
            let c = segment_cost(&field.lagrangian, t, dt, x_cur, v);
            consider(next + c, v, c, &mut best_v, &mut best_cost, &mut best);
        }
        if !best.is_finite() {
            return Err(Error::Precondition(format!(
                "trajectory dead-ends at t={t}: every candidate is +inf"
            )));
        }
        // snap to a node-aligned velocity when the argmin sits within one
        // velocity-grid cell of it: at that resolution the two moves are
        // indistinguishable, and lattice paths read the field without
        // interpolation
        let vcell = (field.velocity.hi - field.velocity.lo)
            / (field.velocity.nodes - 1).max(1) as f64;
        if let Some(&(_, va)) = cand
            .aligned
            .iter()
            .min_by(|a, b| {
                (a.1 - best_v).abs().partial_cmp(&(b.1 - best_v).abs()).unwrap()
            })
            .filter(|&&(_, va)| (va - best_v).abs() <= vcell && va != best_v)
        {
            let xq = x_cur + dt * va;
            let next = guarded_lookup(
                &field.solved[(j + 1) * nxp..(j + 2) * nxp],
                &field.solved_axis,
                xq,
            );
            if next != f64::INFINITY && !outside_domain(&field.lagrangian, t, dt, x_cur, va) {
                best_v = va;
                best_cost = segment_cost(&field.lagrangian, t, dt, x_cur, va);
            }
        }
        costs.push(best_cost);
        vels.push(best_v);
        x_cur += dt * best_v;
        xs.push(x_cur);
    }

    // terminal value, then accumulate backwards
    let x_t = *xs.last().unwrap();
    let u_t = match &field.terminal {
        TerminalData::Model(m) => m.eval(time.hi, x_t),
        TerminalData::Field(f) => f.eval_interp(&[x_t])?.to_f64(),
    };
    if !u_t.is_finite() {
        return Err(Error::Precondition("terminal cost is not finite".into()));
    }
    let mut us = vec![0.0; xs.len()];
    us[xs.len() - 1] = u_t;
    for k in (0..costs.len()).rev() {
        us[k] = us[k + 1] + costs[k];
    }
    let nodes = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| TrajectoryNode {
            t: time.coord(j0 + k),
            x,
            u: us[k],
        })
        .collect();
    Ok(Trajectory {
        nodes,
        velocities: vels,
        requested_start: (t0, x0),
        start,
    })
}

/// The function U under verification: a sampled field or a closed form.
#[derive(Clone)]
pub enum Solution {
    Field(Arc<GridFn>),
    Model(Arc<ValueModel>),
}

impl Solution {
    fn eval(&self, t: f64, x: f64) -> ExtReal {
        match self {
            Solution::Field(f) => f
                .eval_interp(&[t, x])
                .unwrap_or(ExtReal::PlusInf),
            Solution::Model(m) => {
                ExtReal::finite(m.eval(t, x)).unwrap_or(ExtReal::PlusInf)
            }
        }
    }

    /// Candidate subgradient at (t,x): analytic when registered, otherwise a
    /// central finite-difference probe validated by the subdifferential test.
    fn subgradient(&self, t: f64, x: f64, scale: f64) -> Option<(f64, f64)> {
        match self {
            Solution::Model(m) => m.gradient(t, x),
            Solution::Field(f) => {
                let h = scale;
                let at = |tt: f64, xx: f64| f.eval_interp(&[tt, xx]).ok()?.to_f64().into();
                let vals: [Option<f64>; 4] = [
                    at(t + h, x),
                    at(t - h, x),
                    at(t, x + h),
                    at(t, x - h),
                ];
                let [tp, tm, xp, xm] = vals;
                let p_t = (tp? - tm?) / (2.0 * h);
                let p_x = (xp? - xm?) / (2.0 * h);
                if !(p_t.is_finite() && p_x.is_finite()) {
                    return None;
                }
                let phi = |z: &[f64]| self.eval(z[0], z[1]);
                subdifferential_probe(&phi, &[t, x], &[p_t, p_x], scale, 10.0 * scale)
                    .then_some((p_t, p_x))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub probes: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            probes: 200,
            seed: 0x51C5,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LscViolation {
    pub t: f64,
    pub x: f64,
    pub amount: f64,
    pub inequality: String,
}

/// Report of the Def-1.1 inequality checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LscReport {
    /// Worst violation of -p_t + H(t,x,-p_x) >= 0 on t in [0,T).
    pub max_violation_forward: f64,
    /// Worst violation of -p_t + H(t,x,-p_x) <= 0 on t in (0,T].
    pub max_violation_backward: f64,
    /// sup |U(T,x) - g(x)| over terminal samples.
    pub terminal_gap: f64,
    pub probes_used: usize,
    pub probes_skipped: usize,
    pub worst: Vec<LscViolation>,
}

/// Checks the lsc-solution inequalities of U against H on the given box,
/// with terminal data g.
pub fn verify_lsc_solution(
    u: &Solution,
    h: &HamiltonianModel,
    g: &dyn Fn(f64) -> ExtReal,
    t_box: (f64, f64),
    x_box: (f64, f64),
    cfg: &ProbeConfig,
) -> Result<LscReport, Error> {
    let mut s = Sampler::new(cfg.seed, 2);
    let scale = 1e-4 * (x_box.1 - x_box.0).max(t_box.1 - t_box.0);
    let mut fwd = 0.0f64;
    let mut bwd = 0.0f64;
    let mut used = 0;
    let mut skipped = 0;
    let mut worst: Vec<LscViolation> = Vec::new();
    for _ in 0..cfg.probes {
        let z = s.next_in(&[t_box.0, x_box.0], &[t_box.1, x_box.1]);
        let (t, x) = (z[0], z[1]);
        if !u.eval(t, x).is_finite() {
            skipped += 1;
            continue;
        }
        let Some((p_t, p_x)) = u.subgradient(t, x, scale) else {
            skipped += 1;
            continue;
        };
        used += 1;
        let e = -p_t + h.eval(t, x, -p_x);
        let eps = 1e-9;
        if t < t_box.1 - eps && -e > fwd {
            fwd = -e;
            worst.push(LscViolation {
                t,
                x,
                amount: -e,
                inequality: "forward".into(),
            });
        }
        if t > t_box.0 + eps && e > bwd {
            bwd = e;
            worst.push(LscViolation {
                t,
                x,
                amount: e,
                inequality: "backward".into(),
            });
        }
    }
    if used == 0 {
        return Err(Error::Precondition(
            "no candidate subgradients found at any probe".into(),
        ));
    }
    // terminal comparison
    let mut terminal_gap = 0.0f64;
    let t_end = t_box.1;
    for k in 0..=256 {
        let x = x_box.0 + (x_box.1 - x_box.0) * k as f64 / 256.0;
        let uval = u.eval(t_end, x);
        let gval = g(x);
        let gap = match (uval, gval) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
            (ExtReal::PlusInf, ExtReal::PlusInf) => 0.0,
            _ => f64::INFINITY,
        };
        terminal_gap = terminal_gap.max(gap);
    }
    worst.sort_by(|a, b| b.amount.partial_cmp(&a.amount).unwrap());
    worst.truncate(4);
    let _ = cfg.tol;
    Ok(LscReport {
        max_violation_forward: fwd.max(0.0),
        max_violation_backward: bwd.max(0.0),
        terminal_gap,
        probes_used: used,
        probes_skipped: skipped,
        worst,
    })
}

/// Report of the subderivative inequality checks along the value function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Thm5Report {
    /// max over probes of min over v of [ dV(t,x)(1,v) - (-L(t,x,v)) ]:
    /// nonpositive margins witness the forward inequality.
    pub worst_existence_margin: ExtReal,
    /// max over probes and v in dom of [ dV(t,x)(-1,-v) - L(t,x,v) ].
    pub worst_universal_margin: ExtReal,
    pub unstable_estimates: usize,
    pub probes_used: usize,
}

/// Sampled check of the two subderivative theorems on the value function:
/// forward existence (some v with dV(1,v) <= -L) and backward universality
/// (dV(-1,-v) <= L for all v in dom L).
pub fn verify_thm52_54(
    v: &Solution,
    l: &LagrangianModel,
    t_box: (f64, f64),
    x_box: (f64, f64),
    vbox: (f64, f64),
    cfg: &ProbeConfig,
) -> Result<Thm5Report, Error> {
    let mut s = Sampler::new(cfg.seed ^ 0x54, 2);
    let nv = 65;
    let mut worst_exist = ExtReal::MinusInf;
    let mut worst_universal = ExtReal::MinusInf;
    let mut unstable = 0;
    let mut used = 0;
    let phi = |z: &[f64]| v.eval(z[0], z[1]);
    for _ in 0..cfg.probes {
        let z = s.next_in(&[t_box.0, x_box.0], &[t_box.1, x_box.1]);
        let (t, x) = (z[0], z[1]);
        if !v.eval(t, x).is_finite() {
            continue;
        }
        used += 1;
        // forward: search for a witness velocity, allowed outside dom L
        if t < t_box.1 - 1e-9 {
            let mut best = ExtReal::PlusInf;
            for k in 0..nv {
                let vv = vbox.0 + (vbox.1 - vbox.0) * k as f64 / (nv - 1) as f64;
                let est = subderivative(&phi, &[t, x], &[1.0, vv], 1.0);
                if !est.stable && !est.diverging {
                    unstable += 1;
                }
                let neg_l = match l.eval(t, x, vv) {
                    ExtReal::Finite(lv) => ExtReal::Finite(-lv),
                    ExtReal::PlusInf => ExtReal::MinusInf,
                    ExtReal::MinusInf => ExtReal::PlusInf,
                };
                // margin = dV(1,v) - (-L)
                let margin = match (est.value, neg_l) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a - b),
                    (ExtReal::MinusInf, _) => ExtReal::MinusInf,
                    (_, ExtReal::MinusInf) => ExtReal::PlusInf,
                    (ExtReal::PlusInf, _) => ExtReal::PlusInf,
                    (ExtReal::Finite(_), ExtReal::PlusInf) => ExtReal::MinusInf,
                };
                if margin < best {
                    best = margin;
                }
            }
            if best > worst_exist {
                worst_exist = best;
            }
        }
        // backward: universal over dom L on the grid; probes at t == t_lo
        // would step out of the domain and are skipped
        if t > t_box.0 + 1e-6 {
            for k in 0..nv {
                let vv = vbox.0 + (vbox.1 - vbox.0) * k as f64 / (nv - 1) as f64;
                let ExtReal::Finite(lv) = l.eval(t, x, vv) else {
                    continue;
                };
                let est = subderivative(&phi, &[t, x], &[-1.0, -vv], 1.0);
                if !est.stable && !est.diverging {
                    unstable += 1;
                }
                let margin = match est.value {
                    ExtReal::Finite(a) => ExtReal::Finite(a - lv),
                    other => other,
                };
                if margin > worst_universal {
                    worst_universal = margin;
                }
            }
        }
    }
    Ok(Thm5Report {
        worst_existence_margin: worst_exist,
        worst_universal_margin: worst_universal,
        unstable_estimates: unstable,
        probes_used: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    fn frozen_lagrangian() -> Arc<LagrangianModel> {
        Arc::new(
            LagrangianModel::from_fn("frozen", 1.0, |_t, _x, v| {
                if v == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PlusInf
                }
            })
            .with_domain(|_t, _x| (0.0, 0.0)),
        )
    }

    fn free_lagrangian() -> Arc<LagrangianModel> {
        Arc::new(
            LagrangianModel::from_fn("free", 1.0, |_t, _x, v| {
                if v.abs() <= 1.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PlusInf
                }
            })
            .with_domain(|_t, _x| (-1.0, 1.0)),
        )
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Axis {
        Axis::new(lo, hi, n).unwrap()
    }

    fn terminal_field(space: Axis, g: impl Fn(f64) -> f64) -> TerminalData {
        TerminalData::Field(
            GridFn::sample(Grid::new(vec![space]).unwrap(), |p| {
                ExtReal::Finite(g(p[0]))
            })
            .unwrap(),
        )
    }

    #[test]
    fn frozen_dynamics_reproduce_terminal_data() {
        let space = axis(-2.0, 2.0, 41);
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 21),
            space,
            velocity: VelocityGrid { lo: -1.0, hi: 1.0, nodes: 21 },
            terminal: terminal_field(space, |x| x * x - 0.5),
            lagrangian: frozen_lagrangian(),
        };
        let field = solve_value(&cfg).unwrap();
        for j in 0..21 {
            for i in 0..41 {
                let x = space.coord(i);
                let got = field.fun.values[j * 41 + i].to_f64();
                assert!((got - (x * x - 0.5)).abs() < 1e-12, "t-layer {j}, x={x}");
            }
        }
    }

    #[test]
    fn zero_cost_full_box_minimizes_terminal_over_reachable_set() {
        // dt = dx, so the node-aligned candidates include v = +-1 and the
        // expanding-cone kink is tracked without interpolation
        let space = axis(-2.0, 2.0, 81);
        let nx = space.nodes;
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 21),
            space,
            velocity: VelocityGrid { lo: -1.05, hi: 1.05, nodes: 43 },
            terminal: terminal_field(space, |x| (x - 0.7).abs()),
            lagrangian: free_lagrangian(),
        };
        let field = solve_value(&cfg).unwrap();
        // V(t,x) = min over |y - x| <= (T-t) of g(y), g touching 0 at 0.7;
        // check away from the space boundary (Field terminal: no padding)
        for (j, t) in [(0usize, 0.0), (10, 0.5), (16, 0.8)] {
            for i in 10..nx - 10 {
                let x = space.coord(i);
                let reach = 1.0 - t;
                let want = if (x - 0.7).abs() <= reach {
                    0.0
                } else {
                    (x - 0.7).abs() - reach
                };
                let got = field.fun.values[j * nx + i].to_f64();
                assert!(
                    (got - want).abs() < 1e-9,
                    "t={t} x={x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn monotone_in_terminal_data_and_shift_equivariant() {
        let space = axis(-1.0, 1.0, 21);
        let mk = |shift: f64| DpConfig {
            time: axis(0.0, 1.0, 11),
            space,
            velocity: VelocityGrid { lo: -1.05, hi: 1.05, nodes: 21 },
            terminal: terminal_field(space, move |x| x.sin() + shift),
            lagrangian: free_lagrangian(),
        };
        let v0 = solve_value(&mk(0.0)).unwrap();
        let v1 = solve_value(&mk(0.25)).unwrap();
        for (a, b) in v0.fun.values.iter().zip(&v1.fun.values) {
            assert!(a <= b, "monotonicity violated");
            assert!(
                (b.to_f64() - a.to_f64() - 0.25).abs() < 1e-12,
                "shift equivariance violated"
            );
        }
    }

    #[test]
    fn backward_step_is_deterministic() {
        let space = axis(-1.0, 1.0, 21);
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 11),
            space,
            velocity: VelocityGrid { lo: -1.05, hi: 1.05, nodes: 21 },
            terminal: terminal_field(space, |x| x.cos()),
            lagrangian: free_lagrangian(),
        };
        let a = solve_value(&cfg).unwrap();
        let b = solve_value(&cfg).unwrap();
        assert_eq!(a.fun.values, b.fun.values);
        assert_eq!(a.policy, b.policy);
    }

    #[test]
    fn velocity_coverage_error_when_box_too_small() {
        let space = axis(-1.0, 1.0, 11);
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 11),
            space,
            velocity: VelocityGrid { lo: -0.5, hi: 0.5, nodes: 11 },
            terminal: terminal_field(space, |x| x),
            lagrangian: free_lagrangian(),
        };
        assert!(matches!(
            solve_value(&cfg),
            Err(Error::VelocityCoverage { .. })
        ));
    }

    #[test]
    fn improper_terminal_is_rejected() {
        let space = axis(-1.0, 1.0, 11);
        let g = GridFn::new(
            Grid::new(vec![space]).unwrap(),
            (0..11)
                .map(|i| {
                    if i == 5 {
                        ExtReal::MinusInf
                    } else {
                        ExtReal::Finite(0.0)
                    }
                })
                .collect(),
        )
        .unwrap();
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 11),
            space,
            velocity: VelocityGrid { lo: -1.05, hi: 1.05, nodes: 11 },
            terminal: TerminalData::Field(g),
            lagrangian: free_lagrangian(),
        };
        assert!(matches!(solve_value(&cfg), Err(Error::ImproperFunction)));
    }

    #[test]
    fn frozen_trajectory_is_constant() {
        let space = axis(-2.0, 2.0, 41);
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 21),
            space,
            velocity: VelocityGrid { lo: -1.0, hi: 1.0, nodes: 21 },
            terminal: terminal_field(space, |x| x * x),
            lagrangian: frozen_lagrangian(),
        };
        let field = solve_value(&cfg).unwrap();
        let traj = extract_trajectory(&field, 0.0, 0.5).unwrap();
        for n in &traj.nodes {
            assert!((n.x - 0.5).abs() < 1e-12);
            assert!((n.u - 0.25).abs() < 1e-12);
        }
        let margins = traj.q_segment_margins(&frozen_lagrangian());
        assert!(margins.iter().all(|m| *m >= -1e-9));
    }

    #[test]
    fn quadratic_lagrangian_matches_piecewise_constant_brute_force() {
        // L = v^2/2, g = x: V(t,x) = x - (T-t)/2, optimal v = -1
        let space = axis(-3.0, 3.0, 121);
        let quad = Arc::new(
            LagrangianModel::from_fn("quad", 1.0, |_t, _x, v| {
                if v.abs() <= 3.0 {
                    ExtReal::Finite(0.5 * v * v)
                } else {
                    ExtReal::PlusInf
                }
            })
            .with_domain(|_t, _x| (-3.0, 3.0)),
        );
        let terminal = TerminalData::Model(Arc::new(ValueModel::from_fn("g", 1.0, |_t, x| x)));
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 51),
            space,
            velocity: VelocityGrid { lo: -3.15, hi: 3.15, nodes: 129 },
            terminal,
            lagrangian: quad.clone(),
        };
        let field = solve_value(&cfg).unwrap();
        let traj = extract_trajectory(&field, 0.0, 0.0).unwrap();
        let u0 = traj.nodes[0].u;

        // oracle: piecewise-constant controls with 3 switch times (quarters)
        let mut brute = f64::INFINITY;
        let grid: Vec<f64> = (0..13).map(|i| -3.0 + 0.5 * i as f64).collect();
        for &v1 in &grid {
            for &v2 in &grid {
                for &v3 in &grid {
                    for &v4 in &grid {
                        let xt = 0.25 * (v1 + v2 + v3 + v4);
                        let cost =
                            xt + 0.125 * (v1 * v1 + v2 * v2 + v3 * v3 + v4 * v4);
                        brute = brute.min(cost);
                    }
                }
            }
        }
        assert!(
            (u0 - brute).abs() < 1e-2,
            "u(0) = {u0} vs brute force {brute}"
        );
    }

    #[test]
    fn lsc_verifier_accepts_sec4_and_flags_perturbations() {
        let v = builtin("sec4-V").unwrap().as_value().unwrap();
        let h = crate::models::sec4_hamiltonian();
        let g = {
            let v = v.clone();
            move |x: f64| ExtReal::Finite(v.eval(1.0, x))
        };
        let cfg = ProbeConfig::default();
        let sol = Solution::Model(v.clone());
        let rep =
            verify_lsc_solution(&sol, &h, &g, (0.0, 1.0), (-2.0, 2.0), &cfg).unwrap();
        assert!(rep.max_violation_forward <= 1e-6, "{rep:?}");
        assert!(rep.max_violation_backward <= 1e-6, "{rep:?}");
        assert!(rep.terminal_gap <= 1e-12);

        // scaled Hamiltonian violates the backward inequality
        let h2 = HamiltonianModel::from_fn("2H", 1.0, {
            let h = h.clone();
            move |t, x, p| 2.0 * h.eval(t, x, p)
        });
        let rep2 =
            verify_lsc_solution(&sol, &h2, &g, (0.0, 1.0), (-2.0, 2.0), &cfg).unwrap();
        assert!(
            rep2.max_violation_backward > 1e-3,
            "scaled H must violate: {rep2:?}"
        );

        // shifted solution fails the terminal comparison
        let shifted = Arc::new(
            ValueModel::from_fn("V+0.5", 1.0, {
                let v = v.clone();
                move |t, x| v.eval(t, x) + 0.5
            })
            .with_gradient({
                let v = v.clone();
                move |t, x| v.gradient(t, x)
            }),
        );
        let rep3 = verify_lsc_solution(
            &Solution::Model(shifted),
            &h,
            &g,
            (0.0, 1.0),
            (-2.0, 2.0),
            &cfg,
        )
        .unwrap();
        assert!((rep3.terminal_gap - 0.5).abs() < 1e-12, "{rep3:?}");
    }

    #[test]
    fn thm52_54_on_frozen_dynamics() {
        // frozen model: v0 = 0 satisfies the forward inequality with 0 <= 0
        let space = axis(-1.0, 1.0, 41);
        let cfg = DpConfig {
            time: axis(0.0, 1.0, 41),
            space,
            velocity: VelocityGrid { lo: -1.0, hi: 1.0, nodes: 21 },
            terminal: terminal_field(space, |x| x * x),
            lagrangian: frozen_lagrangian(),
        };
        let field = solve_value(&cfg).unwrap();
        let sol = Solution::Field(Arc::new(field.fun.clone()));
        let rep = verify_thm52_54(
            &sol,
            &frozen_lagrangian(),
            (0.0, 1.0),
            (-0.8, 0.8),
            (-0.5, 0.5),
            &ProbeConfig {
                probes: 40,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            rep.worst_existence_margin <= ExtReal::Finite(1e-6),
            "{rep:?}"
        );
        assert!(
            rep.worst_universal_margin <= ExtReal::Finite(1e-6),
            "{rep:?}"
        );
    }
}
