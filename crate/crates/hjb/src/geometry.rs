//! Epigraph and convex-set machinery: the set-valued map Q(t,x), distances
//! and projections to epigraphs, normal-cone probes, numerical
//! subderivatives, Steiner points, and the fixed-point parametrization of Q.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::grid::GridFn;
use crate::models::LagrangianModel;

/// The convex set Q(t,x) = { (v, eta) : eta <= -L(t,x,v) }, carried by its
/// defining Lagrangian slice plus membership/projection machinery.
///
/// The boundary graph is the piecewise-linear interpolant of -L(t,x,.) on
/// the sampled velocity box; L convex in v keeps the sampled set convex.
#[derive(Clone)]
pub struct QSample {
    pub t: f64,
    pub x: f64,
    pub lagrangian: Arc<LagrangianModel>,
    pub vbox: (f64, f64),
    pub nodes: usize,
    /// Finite boundary vertices (v, -L(t,x,v)), ascending in v.
    boundary: Vec<(f64, f64)>,
}

impl QSample {
    /// Velocity box from the registered domain descriptor plus a margin,
    /// sampled on `nodes` points.
    pub fn new(
        t: f64,
        x: f64,
        lagrangian: Arc<LagrangianModel>,
        nodes: usize,
    ) -> Result<Self, Error> {
        let (lo, hi) = lagrangian
            .domain(t, x)
            .ok_or_else(|| Error::InvalidConfig("lagrangian has no domain descriptor".into()))?;
        let margin = 0.05 * (hi - lo).max(1e-6) + 1e-9;
        Self::with_box(t, x, lagrangian, (lo - margin, hi + margin), nodes)
    }

    pub fn with_box(
        t: f64,
        x: f64,
        lagrangian: Arc<LagrangianModel>,
        vbox: (f64, f64),
        nodes: usize,
    ) -> Result<Self, Error> {
        if nodes < 2 || vbox.1 <= vbox.0 {
            return Err(Error::InvalidConfig("bad velocity box".into()));
        }
        let mut boundary = Vec::new();
        for i in 0..nodes {
            let v = vbox.0 + (vbox.1 - vbox.0) * i as f64 / (nodes - 1) as f64;
            if let ExtReal::Finite(l) = lagrangian.eval(t, x, v) {
                boundary.push((v, -l));
            }
        }
        if boundary.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(QSample {
            t,
            x,
            lagrangian,
            vbox,
            nodes,
            boundary,
        })
    }

    /// -L-hat(v): the PL interpolant of the sampled boundary, None outside
    /// its sampled domain.
    pub fn boundary_height(&self, v: f64) -> Option<f64> {
        let b = &self.boundary;
        if v < b[0].0 || v > b[b.len() - 1].0 {
            return None;
        }
        match b.binary_search_by(|&(bv, _)| bv.partial_cmp(&v).unwrap()) {
            Ok(i) => Some(b[i].1),
            Err(i) => {
                let (v0, h0) = b[i - 1];
                let (v1, h1) = b[i];
                let w = (v - v0) / (v1 - v0);
                Some(h0 + w * (h1 - h0))
            }
        }
    }

    /// (v, eta) in Q(t,x) up to tol: L finite at v and eta <= -L + tol.
    pub fn membership(&self, v: f64, eta: f64, tol: f64) -> bool {
        match self.lagrangian.eval(self.t, self.x, v) {
            ExtReal::Finite(l) => eta <= -l + tol,
            _ => false,
        }
    }

    /// Membership against the sampled PL boundary (what `project` uses).
    pub fn membership_sampled(&self, v: f64, eta: f64, tol: f64) -> bool {
        self.boundary_height(v)
            .map(|h| eta <= h + tol)
            .unwrap_or(false)
    }

    /// A minimal-norm element of the sampled set: the boundary vertex or
    /// deep point with the smallest |(v, eta)|, preferring eta on the graph.
    pub fn minimal_norm_element(&self) -> (f64, f64) {
        let mut best = self.boundary[0];
        let mut best_n = f64::INFINITY;
        for &(v, h) in &self.boundary {
            let eta = h.min(0.0).max(h); // the graph point itself
            let n = (v * v + eta * eta).sqrt();
            if n < best_n {
                best_n = n;
                best = (v, eta);
            }
            // interior points directly below the graph can be closer to 0
            if h > 0.0 {
                let n0 = v.abs();
                if n0 < best_n {
                    best_n = n0;
                    best = (v, 0.0);
                }
            }
        }
        best
    }

    /// Metric projection onto the sampled Q(t,x).
    ///
    /// Points already in the set come back bit-identical: the fixed-point
    /// property holds exactly. Exterior points project onto the nearest
    /// piece of the PL boundary, including the two downward edge rays.
    pub fn project(&self, a: (f64, f64)) -> (f64, f64) {
        if self.membership_sampled(a.0, a.1, 0.0) {
            return a;
        }
        let b = &self.boundary;
        let mut best = (f64::INFINITY, b[0]);
        let mut consider = |w: (f64, f64)| {
            let d2 = (w.0 - a.0).powi(2) + (w.1 - a.1).powi(2);
            if d2 < best.0 {
                best = (d2, w);
            }
        };
        for k in 0..b.len().saturating_sub(1) {
            consider(project_to_segment(a, b[k], b[k + 1]));
        }
        // downward edge rays at the domain ends
        let (vl, hl) = b[0];
        let (vr, hr) = b[b.len() - 1];
        consider((vl, a.1.min(hl)));
        consider((vr, a.1.min(hr)));
        best.1
    }
}

fn project_to_segment(a: (f64, f64), p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    let dx = q.0 - p.0;
    let dy = q.1 - p.1;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p;
    }
    let s = (((a.0 - p.0) * dx + (a.1 - p.1) * dy) / len2).clamp(0.0, 1.0);
    (p.0 + s * dx, p.1 + s * dy)
}

/// The parametrization of Q(t,x): metric projection of the parameter point.
///
/// (P2) holds exactly (members are fixed points) and the map is nonexpansive
/// in a; its Lipschitz modulus in x is reported empirically elsewhere.
pub fn parametrize_theta(q: &QSample, a: (f64, f64)) -> (f64, f64) {
    q.project(a)
}

/// Result of an epigraph distance query.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EpiDist {
    pub dist: f64,
    /// Proximal point w in the epigraph.
    pub w: [f64; 3],
    /// y - w: a proximal normal direction at w (n_u <= 0 when y sits below).
    pub normal: [f64; 3],
}

/// Epigraph of a 2-D GridFn base over (t,x): { (t,x,u) : u >= base(t,x) }.
pub struct EpiSet<'a> {
    pub base: &'a GridFn,
}

impl<'a> EpiSet<'a> {
    pub fn new(base: &'a GridFn) -> Result<Self, Error> {
        if base.grid.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: base.grid.dim(),
            });
        }
        if !base.values.iter().any(|v| v.is_finite()) {
            return Err(Error::EmptySet);
        }
        Ok(EpiSet { base })
    }

    pub fn contains(&self, y: [f64; 3], tol: f64) -> bool {
        match self.base.eval_interp(&[y[0], y[1]]) {
            Ok(ExtReal::Finite(u)) => y[2] >= u - tol,
            Ok(ExtReal::MinusInf) => true,
            _ => false,
        }
    }

    fn objective(&self, y: [f64; 3], t: f64, x: f64) -> f64 {
        match self.base.eval_interp(&[t, x]) {
            Ok(ExtReal::Finite(u)) => {
                (y[0] - t).powi(2) + (y[1] - x).powi(2) + (u - y[2]).max(0.0).powi(2)
            }
            Ok(ExtReal::MinusInf) => (y[0] - t).powi(2) + (y[1] - x).powi(2),
            _ => f64::INFINITY,
        }
    }

    /// Distance to the epigraph with the proximal point, by full node scan
    /// plus continuous refinement on the bilinear surface.
    pub fn dist_to_epi(&self, y: [f64; 3]) -> Result<EpiDist, Error> {
        if self.contains(y, 0.0) {
            return Ok(EpiDist {
                dist: 0.0,
                w: y,
                normal: [0.0; 3],
            });
        }
        let ta = self.base.grid.axes[0];
        let xa = self.base.grid.axes[1];
        let mut best = f64::INFINITY;
        let mut best_tx = (ta.lo, xa.lo);
        // seed with the column above the nearest node: a tight initial
        // bound lets the scan prune almost every row
        {
            let i0 = ta.nearest(y[0]);
            let j0 = xa.nearest(y[1]);
            if let ExtReal::Finite(u) = self.base.values[i0 * xa.nodes + j0] {
                best = (y[0] - ta.coord(i0)).powi(2)
                    + (y[1] - xa.coord(j0)).powi(2)
                    + (u - y[2]).max(0.0).powi(2);
                best_tx = (ta.coord(i0), xa.coord(j0));
            }
        }
        for i in 0..ta.nodes {
            let t = ta.coord(i);
            let dt2 = (y[0] - t).powi(2);
            if dt2 > best {
                continue;
            }
            for j in 0..xa.nodes {
                let x = xa.coord(j);
                let dx2 = (y[1] - x).powi(2);
                if dt2 + dx2 > best {
                    continue;
                }
                let u = match self.base.values[i * xa.nodes + j] {
                    ExtReal::Finite(u) => u,
                    ExtReal::MinusInf => y[2],
                    ExtReal::PlusInf => continue,
                };
                let d2 = dt2 + dx2 + (u - y[2]).max(0.0).powi(2);
                if d2 < best {
                    best = d2;
                    best_tx = (t, x);
                }
            }
        }
        if best == f64::INFINITY {
            return Err(Error::EmptySet);
        }
        // refine: shrinking pattern search on the interpolated surface
        let (mut t, mut x) = best_tx;
        let mut step_t = ta.spacing();
        let mut step_x = xa.spacing();
        let mut f0 = self.objective(y, t, x);
        for _ in 0..90 {
            let mut improved = false;
            for &(dt, dx) in &[
                (1.0, 0.0),
                (-1.0, 0.0),
                (0.0, 1.0),
                (0.0, -1.0),
                (1.0, 1.0),
                (1.0, -1.0),
                (-1.0, 1.0),
                (-1.0, -1.0),
            ] {
                let tn = (t + dt * step_t).clamp(ta.lo, ta.hi);
                let xn = (x + dx * step_x).clamp(xa.lo, xa.hi);
                let fi = self.objective(y, tn, xn);
                if fi < f0 {
                    f0 = fi;
                    t = tn;
                    x = xn;
                    improved = true;
                }
            }
            if !improved {
                step_t *= 0.5;
                step_x *= 0.5;
                if step_t < 1e-12 && step_x < 1e-12 {
                    break;
                }
            }
        }
        let u_surf = match self.base.eval_interp(&[t, x])? {
            ExtReal::Finite(u) => u,
            _ => return Err(Error::EmptySet),
        };
        let w = [t, x, u_surf.max(y[2])];
        let dist = f0.sqrt();
        let normal = [y[0] - w[0], y[1] - w[1], y[2] - w[2]];
        Ok(EpiDist { dist, w, normal })
    }
}

/// A normal-direction probe anchored at an epigraph boundary point.
/// Accepted directions have n_u <= 0.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConeProbe {
    pub base: [f64; 3],
    pub direction: [f64; 3],
}

impl ConeProbe {
    pub fn new(base: [f64; 3], direction: [f64; 3]) -> Result<Self, Error> {
        if direction[2] > 0.0 {
            return Err(Error::Precondition(
                "normal directions to an epigraph have n_u <= 0".into(),
            ));
        }
        Ok(ConeProbe { base, direction })
    }
}

/// Liminf difference-quotient estimate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SubderivEstimate {
    pub value: ExtReal,
    /// Last two ladder levels agree within tolerance.
    pub stable: bool,
    /// Quotients kept growing across the final levels (PLUS_INF trend).
    pub diverging: bool,
}

/// Step ladder, as fractions of the caller's length scale.
const H_LADDER: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Numerical subderivative d phi(z)(dir): liminf of difference quotients
/// over the h ladder and a shrinking direction-perturbation net.
///
/// `phi` returns `PlusInf` outside its effective domain; those quotients are
/// skipped unless a whole level is +inf.
pub fn subderivative(
    phi: &dyn Fn(&[f64]) -> ExtReal,
    z: &[f64],
    dir: &[f64],
    scale: f64,
) -> SubderivEstimate {
    let d = z.len();
    assert_eq!(dir.len(), d);
    let ExtReal::Finite(phi0) = phi(z) else {
        return SubderivEstimate {
            value: ExtReal::PlusInf,
            stable: false,
            diverging: false,
        };
    };
    let mut levels: Vec<f64> = Vec::with_capacity(H_LADDER.len());
    let mut point = vec![0.0; d];
    for (li, &hf) in H_LADDER.iter().enumerate() {
        let h = hf * scale;
        // direction net: dir itself plus 8*dim perturbations; the net radius
        // shrinks a decade per level so the joint liminf over (tau, y) ->
        // (0+, dir) is approached without a persistent direction bias
        let rho = 0.1_f64.powi(li as i32) * 0.25;
        let mut level_min = f64::INFINITY;
        {
            let mut probe = |y: &[f64]| {
                for k in 0..d {
                    point[k] = z[k] + h * y[k];
                }
                if let ExtReal::Finite(p) = phi(&point) {
                    let q = (p - phi0) / h;
                    if q < level_min {
                        level_min = q;
                    }
                }
            };
            probe(dir);
            let mut y = dir.to_vec();
            for k in 0..d {
                for m in 0..4 {
                    let delta = rho * (m + 1) as f64 / 4.0;
                    for sgn in [-1.0, 1.0] {
                        y.copy_from_slice(dir);
                        y[k] += sgn * delta;
                        probe(&y);
                    }
                }
            }
        }
        levels.push(level_min);
    }
    let n = levels.len();
    let last = levels[n - 1];
    let prev = levels[n - 2];
    if !levels.iter().any(|v| v.is_finite()) {
        return SubderivEstimate {
            value: ExtReal::PlusInf,
            stable: false,
            diverging: false,
        };
    }
    let tol = 1e-3 * (1.0 + last.abs().min(prev.abs()));
    let diverging = last.is_finite()
        && prev.is_finite()
        && last.abs() > 1.0
        && last.abs() >= 2.0 * prev.abs().max(1e-9)
        && prev.abs() >= 2.0 * levels[n - 3].abs().max(1e-9);
    let stable = last.is_finite() && prev.is_finite() && (last - prev).abs() <= tol;
    let value = if diverging {
        // the trend decides the sign of the divergence
        if last > 0.0 {
            ExtReal::PlusInf
        } else {
            ExtReal::MinusInf
        }
    } else if !last.is_finite() {
        ExtReal::PlusInf
    } else {
        // the most-refined level is the estimate; coarser levels only feed
        // the stability and divergence flags
        ExtReal::Finite(last)
    };
    SubderivEstimate {
        value,
        stable,
        diverging,
    }
}

/// Membership test for the subdifferential: p is accepted iff
/// <p, d> <= d phi(z)(d) + tol over the whole direction net.
pub fn subdifferential_probe(
    phi: &dyn Fn(&[f64]) -> ExtReal,
    z: &[f64],
    p: &[f64],
    scale: f64,
    tol: f64,
) -> bool {
    let d = z.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for k in 0..d {
        for sgn in [-1.0, 1.0] {
            let mut e = vec![0.0; d];
            e[k] = sgn;
            dirs.push(e);
        }
    }
    if d >= 2 {
        for sa in [-1.0, 1.0] {
            for sb in [-1.0, 1.0] {
                let mut e = vec![0.0; d];
                e[0] = sa / std::f64::consts::SQRT_2;
                e[1] = sb / std::f64::consts::SQRT_2;
                dirs.push(e);
            }
        }
    }
    for dir in &dirs {
        let est = subderivative(phi, z, dir, scale);
        let pd: f64 = p.iter().zip(dir).map(|(a, b)| a * b).sum();
        match est.value {
            ExtReal::PlusInf => continue,
            ExtReal::MinusInf => return false,
            ExtReal::Finite(v) => {
                if pd > v + tol {
                    return false;
                }
            }
        }
    }
    true
}

/// Steiner point of a convex body given by a support-point oracle:
/// the average of support points over M quasi-uniform sphere directions.
pub fn steiner_point(
    support: &dyn Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    m: usize,
) -> Result<Vec<f64>, Error> {
    if dim == 0 || m == 0 {
        return Err(Error::InvalidConfig("empty steiner config".into()));
    }
    let mut acc = vec![0.0; dim];
    for i in 0..m {
        let u = sphere_direction(dim, i, m);
        let s = support(&u);
        if s.len() != dim || s.iter().any(|v| !v.is_finite()) {
            return Err(Error::EmptySet);
        }
        for k in 0..dim {
            acc[k] += s[k];
        }
    }
    for a in &mut acc {
        *a /= m as f64;
    }
    Ok(acc)
}

/// Quasi-uniform direction i of m on the unit sphere.
fn sphere_direction(dim: usize, i: usize, m: usize) -> Vec<f64> {
    match dim {
        1 => vec![if i % 2 == 0 { 1.0 } else { -1.0 }],
        2 => {
            let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
            vec![theta.cos(), theta.sin()]
        }
        3 => {
            // Fibonacci sphere
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let theta = 2.0 * std::f64::consts::PI * i as f64 / golden;
            vec![r * theta.cos(), r * theta.sin(), z]
        }
        _ => {
            // Weyl lattice on the cube, normalized
            let mut v: Vec<f64> = (0..dim)
                .map(|k| {
                    let alpha = ((k + 2) as f64).sqrt().fract();
                    2.0 * (i as f64 * alpha).fract() - 1.0
                })
                .collect();
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                v[0] = 1.0;
            } else {
                for x in &mut v {
                    *x /= norm;
                }
            }
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Grid};
    use crate::models::builtin;

    fn sec3_q(x: f64) -> QSample {
        let l = crate::models::printed_lagrangian("sec3").unwrap();
        QSample::new(0.0, x, l, 801).unwrap()
    }

    #[test]
    fn q_membership_sec3() {
        let q = sec3_q(2.0);
        // L(2, 1) = 0.5, so eta = -0.5 is on the boundary
        assert!(q.membership(1.0, -0.5, 1e-12));
        assert!(q.membership(1.0, -0.7, 0.0));
        assert!(!q.membership(1.0, -0.4, 1e-3));
        assert!(!q.membership(3.0, -10.0, 0.0)); // outside dom
        // strictly below the hypograph boundary at the argmin of L
        assert!(q.membership(0.0, -1.0, 0.0));
    }

    #[test]
    fn projection_fixed_point_is_exact() {
        let q = sec3_q(2.0);
        for a in [(0.3, -0.9), (1.5, -1.2), (-1.0, -0.5001), (0.0, 0.0)] {
            if q.membership_sampled(a.0, a.1, 0.0) {
                let p = q.project(a);
                assert_eq!(p, a, "member {a:?} must be a bit-identical fixed point");
            }
        }
    }

    #[test]
    fn projection_drops_to_boundary_from_above() {
        // sec3 at x=2: a = (0, 5) sits straight above the apex (0, 0)
        let q = sec3_q(2.0);
        let p = q.project((0.0, 5.0));
        assert!(p.0.abs() < 1e-9 && p.1.abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn projection_matches_dense_search() {
        let q = sec3_q(2.0);
        for a in [(0.0, 5.0), (3.0, 1.0), (-4.0, -0.5), (1.0, 2.0), (2.5, -20.0)] {
            let p = q.project(a);
            let mut best = f64::INFINITY;
            for i in 0..20001 {
                let v = -2.5 + 5.0 * i as f64 / 20000.0;
                let Some(h) = q.boundary_height(v) else { continue };
                let w = (v, h.min(a.1));
                let d2 = (w.0 - a.0).powi(2) + (w.1 - a.1).powi(2);
                if d2 < best {
                    best = d2;
                }
            }
            let got = ((p.0 - a.0).powi(2) + (p.1 - a.1).powi(2)).sqrt();
            assert!(
                (got - best.sqrt()).abs() <= 2e-3,
                "a={a:?}: {got} vs {}",
                best.sqrt()
            );
        }
    }

    #[test]
    fn projection_idempotent_and_nonexpansive() {
        let q = sec3_q(1.5);
        let pts = [(2.0, 1.0), (-3.0, 0.5), (0.7, 4.0), (1.2, -9.0)];
        for &a in &pts {
            let p1 = q.project(a);
            let p2 = q.project(p1);
            assert_eq!(p1, p2, "projection must be idempotent");
        }
        for &a in &pts {
            for &b in &pts {
                let pa = q.project(a);
                let pb = q.project(b);
                let da = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
                let dab = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                assert!(da <= dab + 1e-12, "nonexpansiveness violated");
            }
        }
    }

    fn flat_epi() -> GridFn {
        let g = Grid::new(vec![
            Axis::new(0.0, 1.0, 11).unwrap(),
            Axis::new(-2.0, 2.0, 21).unwrap(),
        ])
        .unwrap();
        GridFn::sample(g, |_| ExtReal::Finite(0.0)).unwrap()
    }

    #[test]
    fn dist_zero_inside_epigraph() {
        let base = flat_epi();
        let epi = EpiSet::new(&base).unwrap();
        let r = epi.dist_to_epi([0.5, 0.0, 1.0]).unwrap();
        assert_eq!(r.dist, 0.0);
        assert_eq!(r.w, [0.5, 0.0, 1.0]);
    }

    #[test]
    fn dist_to_flat_epigraph_is_vertical() {
        let base = flat_epi();
        let epi = EpiSet::new(&base).unwrap();
        let r = epi.dist_to_epi([0.5, 0.3, -1.0]).unwrap();
        assert!((r.dist - 1.0).abs() < 1e-6, "dist {}", r.dist);
        assert!((r.w[0] - 0.5).abs() < 1e-6 && (r.w[1] - 0.3).abs() < 1e-6);
        assert!(r.normal[2] <= 0.0);
    }

    #[test]
    fn dist_matches_brute_force_on_sec4_value() {
        let v = builtin("sec4-V").unwrap().as_value().unwrap();
        let g = Grid::new(vec![
            Axis::new(0.0, 1.0, 101).unwrap(),
            Axis::new(-2.0, 2.0, 201).unwrap(),
        ])
        .unwrap();
        let base = GridFn::sample(g.clone(), |p| ExtReal::Finite(v.eval(p[0], p[1]))).unwrap();
        let epi = EpiSet::new(&base).unwrap();
        let y = [0.5, 0.5, v.eval(0.5, 0.5) - 0.3];
        let r = epi.dist_to_epi(y).unwrap();
        assert!(r.dist <= 0.3 + 1e-9);
        // never worse than the best grid node
        let mut brute = f64::INFINITY;
        for i in 0..g.num_nodes() {
            let c = g.node_coords(i);
            let u = base.values[i].to_f64();
            let d2 =
                (y[0] - c[0]).powi(2) + (y[1] - c[1]).powi(2) + (u - y[2]).max(0.0).powi(2);
            brute = brute.min(d2);
        }
        assert!(r.dist <= brute.sqrt() + 1e-9);
        assert!(r.normal[2] <= 0.0);
    }

    #[test]
    fn cone_probe_rejects_upward_normals() {
        assert!(ConeProbe::new([0.0; 3], [0.1, 0.0, 0.5]).is_err());
        assert!(ConeProbe::new([0.0; 3], [0.1, 0.0, -0.5]).is_ok());
    }

    #[test]
    fn subderivative_of_smooth_quadratic() {
        let phi = |z: &[f64]| ExtReal::Finite(z[0] * z[0] + 3.0 * z[1]);
        let est = subderivative(&phi, &[1.0, 0.0], &[1.0, 1.0], 1.0);
        // gradient is (2, 3): directional derivative 5
        assert!((est.value.to_f64() - 5.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn subderivative_of_abs_at_kink() {
        let phi = |z: &[f64]| ExtReal::Finite(z[1].abs());
        let est = subderivative(&phi, &[0.5, 0.0], &[0.0, 1.0], 1.0);
        assert!((est.value.to_f64() - 1.0).abs() < 0.3, "{est:?}");
        assert!(!est.diverging);
    }

    #[test]
    fn subderivative_diverges_on_sec4_diagonal_forward() {
        let v = builtin("sec4-V").unwrap().as_value().unwrap();
        let phi = move |z: &[f64]| ExtReal::Finite(v.eval(z[0], z[1]));
        let xi = 0.5;
        let est = subderivative(&phi, &[xi, xi], &[1.0, 0.0], 1.0);
        assert!(est.value.is_plus_inf(), "{est:?}");
    }

    #[test]
    fn subdifferential_probe_smooth_and_kink() {
        let phi = |z: &[f64]| ExtReal::Finite(z[0] + 2.0 * z[1]);
        assert!(subdifferential_probe(&phi, &[0.3, 0.4], &[1.0, 2.0], 1.0, 1e-2));
        assert!(!subdifferential_probe(
            &phi,
            &[0.3, 0.4],
            &[1.5, 2.0],
            1.0,
            1e-2
        ));
        // |x| at zero: the subdifferential is [-1, 1] in the x slot
        let absf = |z: &[f64]| ExtReal::Finite(z[1].abs());
        assert!(subdifferential_probe(&absf, &[0.0, 0.0], &[0.0, 0.5], 1.0, 1e-2));
        assert!(!subdifferential_probe(
            &absf,
            &[0.0, 0.0],
            &[0.0, 1.5],
            1.0,
            1e-2
        ));
    }

    #[test]
    fn steiner_point_of_symmetric_bodies() {
        let square = |u: &[f64]| vec![u[0].signum(), u[1].signum()];
        let s = steiner_point(&square, 2, 4096).unwrap();
        assert!(s[0].abs() < 1e-2 && s[1].abs() < 1e-2, "{s:?}");
        let c = [1.5, -0.25];
        let ball = move |u: &[f64]| vec![c[0] + 0.7 * u[0], c[1] + 0.7 * u[1]];
        let s = steiner_point(&ball, 2, 4096).unwrap();
        assert!((s[0] - c[0]).abs() < 1e-9 && (s[1] - c[1]).abs() < 1e-9);
    }

    #[test]
    fn steiner_point_of_triangle_matches_dense_oracle() {
        let verts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let tri = move |u: &[f64]| {
            let best = verts
                .iter()
                .max_by(|a, b| {
                    let fa = a.0 * u[0] + a.1 * u[1];
                    let fb = b.0 * u[0] + b.1 * u[1];
                    fa.partial_cmp(&fb).unwrap()
                })
                .unwrap();
            vec![best.0, best.1]
        };
        let coarse = steiner_point(&tri, 2, 2048).unwrap();
        let dense = steiner_point(&tri, 2, 100_000).unwrap();
        let d = ((coarse[0] - dense[0]).powi(2) + (coarse[1] - dense[1]).powi(2)).sqrt();
        assert!(d < 1e-2, "coarse {coarse:?} vs dense {dense:?}");
    }
}
