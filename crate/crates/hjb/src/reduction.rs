//! Representations (A, f, l) of a Hamiltonian, H(t,x,p) = sup_a { <p, f> - l },
//! the positively homogeneous reduction
//!
//!   Hbar(t,x,r,p,q) = sup_a < (p,q), (f(t,x,a), l(t,x,a)) >,
//!
//! which restricts back to H at q = -1, and the Barron-Jensen construction
//! diagnostic that motivates building Hbar from a representation instead of
//! from the sup over dom L.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::geometry::steiner_point;
use crate::grid::Axis;
use crate::models::checks::{conjugate_at, slope_box};
use crate::models::{HamiltonianModel, LagrangianModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstructionTag {
    /// Closed-form triple quoted from a worked example.
    Printed,
    /// e(t,x,a) = nearest point of epi H*(t,x,.) to omega(t,x) a.
    EpigraphProjection,
}

/// A sampled representation: parameter set A_h plus evaluable e = (f, l).
#[derive(Clone)]
pub struct Representation {
    pub name: String,
    pub tag: ConstructionTag,
    pub param_dim: usize,
    pub params: Vec<Vec<f64>>,
    e: Arc<dyn Fn(f64, f64, &[f64]) -> (f64, f64) + Send + Sync>,
}

impl Representation {
    /// (f, l) at one parameter.
    pub fn eval(&self, t: f64, x: f64, a: &[f64]) -> (f64, f64) {
        (self.e)(t, x, a)
    }

    /// sup over the sampled parameter set of <p, f> - l.
    pub fn sup(&self, t: f64, x: f64, p: f64) -> f64 {
        self.params
            .iter()
            .map(|a| {
                let (f, l) = self.eval(t, x, a);
                p * f - l
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl std::fmt::Debug for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Representation")
            .field("name", &self.name)
            .field("tag", &self.tag)
            .field("params", &self.params.len())
            .finish_non_exhaustive()
    }
}

/// The printed representation of the section-3 Hamiltonian:
/// A = [-1, 1], f(x, a) = a |x|, l(x, a) = |a|.
pub fn printed_sec3_representation(param_nodes: usize) -> Representation {
    let n = param_nodes.max(3) | 1; // odd: contains -1, 0, 1
    let params = (0..n)
        .map(|i| vec![-1.0 + 2.0 * i as f64 / (n - 1) as f64])
        .collect();
    Representation {
        name: "sec3-printed".into(),
        tag: ConstructionTag::Printed,
        param_dim: 1,
        params,
        e: Arc::new(|_t, x, a| (a[0] * x.abs(), a[0].abs())),
    }
}

/// Epigraph slice of a discrete conjugate: the trusted piecewise-linear
/// curve (v, L(v)) plus projection machinery for the region above it.
#[derive(Clone, Debug)]
pub struct EpiSlice {
    pub curve: Vec<(f64, f64)>,
}

impl EpiSlice {
    pub fn height(&self, v: f64) -> Option<f64> {
        let b = &self.curve;
        if b.is_empty() || v < b[0].0 || v > b[b.len() - 1].0 {
            return None;
        }
        match b.binary_search_by(|&(bv, _)| bv.partial_cmp(&v).unwrap()) {
            Ok(i) => Some(b[i].1),
            Err(i) => {
                let (v0, l0) = b[i - 1];
                let (v1, l1) = b[i];
                let w = (v - v0) / (v1 - v0);
                Some(l0 + w * (l1 - l0))
            }
        }
    }

    pub fn contains(&self, v: f64, l: f64, tol: f64) -> bool {
        self.height(v).map(|h| l >= h - tol).unwrap_or(false)
    }

    /// Metric projection onto the epigraph of the curve.
    pub fn project(&self, a: (f64, f64)) -> (f64, f64) {
        if self.contains(a.0, a.1, 0.0) {
            return a;
        }
        let b = &self.curve;
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
        // upward edge rays at the domain ends
        let (vl, ll) = b[0];
        let (vr, lr) = b[b.len() - 1];
        consider((vl, a.1.max(ll)));
        consider((vr, a.1.max(lr)));
        best.1
    }

    pub fn dist(&self, a: (f64, f64)) -> f64 {
        let p = self.project(a);
        ((p.0 - a.0).powi(2) + (p.1 - a.1).powi(2)).sqrt()
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

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Points per axis of the unit-ball parameter lattice.
    pub param_nodes: usize,
    /// Dual radius and node count of the conjugate slices.
    pub dual_radius: f64,
    pub dual_nodes: usize,
    pub primal_nodes: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            param_nodes: 257,
            dual_radius: 64.0,
            dual_nodes: 2001,
            primal_nodes: 513,
        }
    }
}

/// The trusted conjugate slice of H(t,x,.) as an epigraph curve.
pub fn conjugate_epi_slice(
    h: &HamiltonianModel,
    t: f64,
    x: f64,
    cfg: &BuildConfig,
) -> Result<EpiSlice, Error> {
    let b = slope_box(h, t, x);
    let primal = Axis::new(-b, b, cfg.primal_nodes)?;
    let conj = conjugate_at(h, t, x, cfg.dual_radius, cfg.dual_nodes, primal)?;
    let curve: Vec<(f64, f64)> = conj
        .trusted()
        .map(|i| (primal.coord(i), conj.fun.values[i].to_f64()))
        .collect();
    if curve.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(EpiSlice { curve })
}

/// Builds the projection representation of H: per (t,x), the selection
/// e(t,x,a) is the nearest point of epi H*(t,x,.) to omega(t,x) a with
/// omega = 2 lambda + 1, over the sampled unit ball of R^(N+1).
///
/// `lambda` is the condition-(A) bound: printed when available, otherwise
/// an empirical lambda-hat from the condition checker.
pub fn build_representation(
    h: Arc<HamiltonianModel>,
    lambda: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    cfg: &BuildConfig,
) -> Representation {
    let n = cfg.param_nodes.max(3) | 1;
    let mut params = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let a = [
                -1.0 + 2.0 * i as f64 / (n - 1) as f64,
                -1.0 + 2.0 * j as f64 / (n - 1) as f64,
            ];
            if a[0] * a[0] + a[1] * a[1] <= 1.0 + 1e-12 {
                params.push(vec![a[0], a[1]]);
            }
        }
    }
    let cache: Mutex<HashMap<(u64, u64), Arc<EpiSlice>>> = Mutex::new(HashMap::new());
    let cfg = cfg.clone();
    let name = format!("{}-projection", h.name);
    let e = move |t: f64, x: f64, a: &[f64]| -> (f64, f64) {
        let key = (t.to_bits(), x.to_bits());
        let slice = {
            let mut guard = cache.lock().unwrap();
            if let Some(s) = guard.get(&key) {
                s.clone()
            } else {
                let s = Arc::new(
                    conjugate_epi_slice(&h, t, x, &cfg).expect("conjugate slice"),
                );
                guard.insert(key, s.clone());
                s
            }
        };
        let om = 2.0 * lambda(t, x) + 1.0;
        slice.project((om * a[0], om * a[1]))
    };
    Representation {
        name,
        tag: ConstructionTag::EpigraphProjection,
        param_dim: 2,
        params,
        e: Arc::new(e),
    }
}

/// The reduced, positively homogeneous Hamiltonian over a representation.
#[derive(Clone, Debug)]
pub struct ReducedHamiltonian {
    pub rep: Representation,
}

impl ReducedHamiltonian {
    /// Hbar(t,x,r,p,q) = max over A_h of <(p,q), (f,l)>: a finite max of
    /// linear forms, so positive homogeneity in (p,q) is exact.
    pub fn eval(&self, t: f64, x: f64, _r: f64, p: f64, q: f64) -> f64 {
        self.rep
            .params
            .iter()
            .map(|a| {
                let (f, l) = self.rep.eval(t, x, a);
                p * f + q * l
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Assembles Hbar from a representation.
pub fn build_hbar(rep: Representation) -> Result<ReducedHamiltonian, Error> {
    if rep.params.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(ReducedHamiltonian { rep })
}

/// Result of the Barron-Jensen construction scan at one (p, q).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BjReport {
    pub p: f64,
    pub q: f64,
    /// Hbar_BJ(0, r, p, q).
    pub value_at_zero: f64,
    /// Limit estimate of Hbar_BJ(x, r, p, q) as x -> 0+.
    pub limit_estimate: f64,
    pub jump: f64,
    pub jump_detected: bool,
}

/// The Barron-Jensen Hbar by direct sup over dom L(x,.) on a grid:
/// Hbar_BJ(x,r,p,q) = sup { v p + q L(x,v) : v in dom L(x,.) }, scanned for
/// a jump in x at x = 0 (present exactly when q > 0 and L collapses there).
pub fn barron_jensen_diagnostic(
    l: &LagrangianModel,
    t: f64,
    p: f64,
    q: f64,
    tol: f64,
) -> Result<BjReport, Error> {
    let sup_at = |x: f64| -> Result<f64, Error> {
        let (lo, hi) = l
            .domain(t, x)
            .ok_or_else(|| Error::InvalidConfig("no domain descriptor".into()))?;
        let n = 2001;
        let mut best = f64::NEG_INFINITY;
        for i in 0..n {
            let v = if hi > lo {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            } else {
                lo
            };
            if let ExtReal::Finite(lv) = l.eval(t, x, v) {
                best = best.max(v * p + q * lv);
            }
            if hi <= lo {
                break;
            }
        }
        if best == f64::NEG_INFINITY {
            return Err(Error::EmptySet);
        }
        Ok(best)
    };
    let at_zero = sup_at(0.0)?;
    let mut last = f64::NAN;
    for k in 1..=10 {
        let x = 0.5_f64.powi(k);
        last = sup_at(x)?;
    }
    let jump = (last - at_zero).abs();
    Ok(BjReport {
        p,
        q,
        value_at_zero: at_zero,
        limit_estimate: last,
        jump,
        jump_detected: jump > tol,
    })
}

/// Convexifies a representation: parameters become pairs with simplex
/// weights, (a0, a1, alpha) -> alpha e(a0) + (1-alpha) e(a1), so the image
/// of f covers conv f(t,x,A) = dom H*(t,x,.).
pub fn convexify_representation(
    rep: &Representation,
    base_stride: usize,
    weight_nodes: usize,
) -> Result<Representation, Error> {
    if rep.param_dim + 1 > 3 {
        return Err(Error::InvalidConfig(
            "convexification is desk-scale: param dim + 1 <= 3".into(),
        ));
    }
    let base: Vec<Vec<f64>> = rep
        .params
        .iter()
        .step_by(base_stride.max(1))
        .cloned()
        .collect();
    if base.is_empty() || weight_nodes < 2 {
        return Err(Error::InvalidConfig("empty convexification".into()));
    }
    let mut params = Vec::new();
    for (i, a0) in base.iter().enumerate() {
        for a1 in base.iter().skip(i) {
            for w in 0..weight_nodes {
                let alpha = w as f64 / (weight_nodes - 1) as f64;
                let mut prm = Vec::with_capacity(2 * rep.param_dim + 1);
                prm.extend_from_slice(a0);
                prm.extend_from_slice(a1);
                prm.push(alpha);
                params.push(prm);
            }
        }
    }
    let d = rep.param_dim;
    let inner = rep.e.clone();
    let e = move |t: f64, x: f64, a: &[f64]| -> (f64, f64) {
        let (f0, l0) = inner(t, x, &a[..d]);
        let (f1, l1) = inner(t, x, &a[d..2 * d]);
        let alpha = a[2 * d];
        (
            alpha * f0 + (1.0 - alpha) * f1,
            alpha * l0 + (1.0 - alpha) * l1,
        )
    };
    Ok(Representation {
        name: format!("{}-convexified", rep.name),
        tag: rep.tag,
        param_dim: 2 * d + 1,
        params,
        e: Arc::new(e),
    })
}

/// lambda-hat(t,x) = sup over the sampled parameters of |f| + |l|: the
/// bound a representation certifies for condition (A).
pub fn representation_lambda_hat(rep: &Representation, t: f64, x: f64) -> f64 {
    rep.params
        .iter()
        .map(|a| {
            let (f, l) = rep.eval(t, x, a);
            f.abs() + l.abs()
        })
        .fold(0.0, f64::max)
}

/// The paper-style Steiner-selection alternative for one slice: the Steiner
/// point of epi H* intersected with the ball around omega a of twice the
/// distance, from a support oracle over a sampled intersection cloud. Kept
/// for side-by-side comparison with the projection selection.
pub fn steiner_selection(
    slice: &EpiSlice,
    omega: f64,
    a: (f64, f64),
    directions: usize,
) -> Result<(f64, f64), Error> {
    let center = (omega * a.0, omega * a.1);
    let r = 2.0 * slice.dist(center);
    if r == 0.0 {
        return Ok(center);
    }
    let m = 129;
    let mut cloud = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let v = center.0 - r + 2.0 * r * i as f64 / (m - 1) as f64;
            let l = center.1 - r + 2.0 * r * j as f64 / (m - 1) as f64;
            let inside_ball =
                (v - center.0).powi(2) + (l - center.1).powi(2) <= r * r + 1e-12;
            if inside_ball && slice.contains(v, l, 1e-12) {
                cloud.push((v, l));
            }
        }
    }
    if cloud.is_empty() {
        return Err(Error::EmptySet);
    }
    let support = move |u: &[f64]| -> Vec<f64> {
        let best = cloud
            .iter()
            .max_by(|p, q| {
                let fp = p.0 * u[0] + p.1 * u[1];
                let fq = q.0 * u[0] + q.1 * u[1];
                fp.partial_cmp(&fq).unwrap()
            })
            .unwrap();
        vec![best.0, best.1]
    };
    let s = steiner_point(&support, 2, directions)?;
    Ok((s[0], s[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    #[test]
    fn printed_sec3_hbar_matches_closed_form_exactly() {
        let rep = printed_sec3_representation(257);
        let hbar = build_hbar(rep).unwrap();
        let mut s = crate::sampler::Sampler::new(99, 4);
        for _ in 0..2000 {
            let z = s.next_in(&[-3.0, -8.0, -8.0, -5.0], &[3.0, 8.0, 8.0, 5.0]);
            let (x, p, q, r) = (z[0], z[1], z[2], z[3]);
            let want = (p.abs() * x.abs() + q).max(0.0);
            let got = hbar.eval(0.0, x, r, p, q);
            assert!(
                (got - want).abs() <= 1e-12 * (1.0 + want.abs()),
                "x={x} p={p} q={q}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn hbar_is_positively_homogeneous_exactly() {
        let rep = printed_sec3_representation(257);
        let hbar = build_hbar(rep).unwrap();
        let mut s = crate::sampler::Sampler::new(7, 4);
        for _ in 0..200 {
            let z = s.next_in(&[-2.0, -4.0, -4.0, 0.01], &[2.0, 4.0, 4.0, 3.0]);
            let (x, p, q, scale) = (z[0], z[1], z[2], z[3]);
            let a = hbar.eval(0.0, x, 0.0, scale * p, scale * q);
            let b = scale * hbar.eval(0.0, x, 0.0, p, q);
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())),
                "scaling failed: {a} vs {b}"
            );
        }
    }

    #[test]
    fn hbar_restriction_recovers_sec3() {
        let rep = printed_sec3_representation(257);
        let hbar = build_hbar(rep).unwrap();
        let h = builtin("sec3").unwrap().as_hamiltonian().unwrap();
        for &(x, p) in &[(2.0, 3.0), (0.5, -4.0), (0.0, 1.0), (-1.5, 0.25)] {
            let got = hbar.eval(0.0, x, 0.0, p, -1.0);
            let want = h.eval(0.0, x, p);
            assert!((got - want).abs() <= 1e-13, "x={x} p={p}");
        }
    }

    #[test]
    fn projection_representation_of_zero_hamiltonian() {
        // H == 0: the trusted conjugate slice is {0} x [0, inf)
        let h = Arc::new(HamiltonianModel::from_fn("zero", 1.0, |_, _, _| 0.0));
        let rep = build_representation(
            h,
            Arc::new(|_, _| 0.0),
            &BuildConfig {
                param_nodes: 17,
                ..BuildConfig::default()
            },
        );
        for a in rep.params.iter().take(40) {
            let (f, l) = rep.eval(0.3, 0.7, a);
            assert!(f.abs() <= 1e-9, "f = {f}");
            assert!(l >= -1e-12);
        }
        assert!(rep.sup(0.3, 0.7, 1.5).abs() <= 1e-9);
    }

    #[test]
    fn projection_representation_of_abs_p() {
        // H(x,p) = |p|: dom H* = [-1,1], H* = 0; omega = 2*1+1 = 3;
        // e(a) = projection of 3a onto [-1,1] x [0, inf)
        let h = Arc::new(HamiltonianModel::from_fn("abs", 1.0, |_, _, p| p.abs()));
        let rep = build_representation(
            h,
            Arc::new(|_, _| 1.0),
            &BuildConfig {
                param_nodes: 65,
                ..BuildConfig::default()
            },
        );
        for a in rep.params.iter().take(200) {
            let (f, l) = rep.eval(0.5, 0.0, a);
            let want_f = (3.0 * a[0]).clamp(-1.0, 1.0);
            let want_l = (3.0 * a[1]).max(0.0);
            if 3.0 * a[1] >= 0.0 && (3.0 * a[0]).abs() <= 1.0 {
                assert!((f - 3.0 * a[0]).abs() < 1e-9 && (l - 3.0 * a[1]).abs() < 1e-9);
            } else {
                let d = ((f - want_f).powi(2) + (l - want_l).powi(2)).sqrt();
                assert!(d < 2e-2, "a={a:?}: ({f},{l}) vs ({want_f},{want_l})");
            }
        }
        // sup recovers |p| up to the primal-grid quantization of the slice:
        // the trusted domain end sits within ~2 cells of v = 1
        let dv = 2.0 * 2.1 / 512.0;
        for &p in &[0.5, -2.0, 3.0] {
            let got = rep.sup(0.5, 0.0, p);
            assert!(got <= p.abs() + 1e-9, "p={p}: {got} overshoots");
            assert!(
                p.abs() - got <= 3.0 * dv * (1.0 + p.abs()),
                "p={p}: {got} vs {}",
                p.abs()
            );
        }
    }

    #[test]
    fn sec3_projection_representation_recovers_h() {
        let h = builtin("sec3").unwrap().as_hamiltonian().unwrap();
        let lam = Arc::new(|_t: f64, x: f64| x.abs() + 1.0);
        let rep = build_representation(
            h.clone(),
            lam,
            &BuildConfig {
                param_nodes: 129,
                ..BuildConfig::default()
            },
        );
        // the l-component carries the dual-grid quantization of the
        // conjugate slice (L-hat <= L), so the sup can exceed H by up to
        // one dual cell's worth of slope
        let dp = 2.0 * 64.0 / 2000.0;
        for &(x, p) in &[(2.0, 1.0), (2.0, -0.5), (1.0, 3.0), (0.5, 2.0)] {
            let got = rep.sup(0.0, x, p);
            let want = h.eval(0.0, x, p);
            assert!(
                got <= want + dp * (1.0 + x.abs()),
                "x={x} p={p}: {got} > {want}"
            );
            assert!(want - got <= 0.15, "x={x} p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn sandwich_property_on_sec3_slice() {
        // gph H* subset e(B) subset epi H* on a sampled slice
        let h = builtin("sec3").unwrap().as_hamiltonian().unwrap();
        let cfg = BuildConfig::default();
        let slice = conjugate_epi_slice(&h, 0.0, 2.0, &cfg).unwrap();
        let om = 2.0 * 3.0 + 1.0; // omega = 2 lambda(2) + 1
        let mut s = crate::sampler::Sampler::new(31, 2);
        for _ in 0..500 {
            let a = s.next_in(&[-1.0, -1.0], &[1.0, 1.0]);
            if a[0] * a[0] + a[1] * a[1] > 1.0 {
                continue;
            }
            let e = slice.project((om * a[0], om * a[1]));
            assert!(slice.contains(e.0, e.1, 1e-9), "projection left the epigraph");
        }
        // coverage: every trusted graph point is its own projection under
        // the omega-scaled preimage, which stays inside the unit ball
        for &(v, l) in slice.curve.iter().step_by(16) {
            let a = (v / om, l / om);
            assert!(a.0 * a.0 + a.1 * a.1 <= 1.0 + 1e-12, "graph escapes the ball");
            let e = slice.project((om * a.0, om * a.1));
            let d = ((e.0 - v).powi(2) + (e.1 - l).powi(2)).sqrt();
            assert!(d <= 1e-9, "graph point ({v},{l}) not recovered: {d}");
        }
    }

    #[test]
    fn barron_jensen_jump_at_zero() {
        let l = crate::models::printed_lagrangian("sec3").unwrap();
        for &q in &[0.5, 1.0, 2.0] {
            let rep = barron_jensen_diagnostic(&l, 0.0, 1.0, q, 1e-3).unwrap();
            assert!(rep.jump_detected, "q={q}: {rep:?}");
            assert!((rep.jump - q).abs() < 5e-2, "q={q}: jump {}", rep.jump);
            assert!(rep.value_at_zero.abs() < 1e-12);
        }
        // q = -1 restricts to H itself, continuous: no jump
        let rep = barron_jensen_diagnostic(&l, 0.0, 1.0, -1.0, 1e-3).unwrap();
        assert!(!rep.jump_detected, "{rep:?}");
        // H == 0 model: no jump anywhere
        let zero = Arc::new(
            LagrangianModel::from_fn("zero-L", 1.0, |_, _, v| {
                if v == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PlusInf
                }
            })
            .with_domain(|_, _| (0.0, 0.0)),
        );
        let rep = barron_jensen_diagnostic(&zero, 0.0, 1.0, 1.0, 1e-3).unwrap();
        assert!(!rep.jump_detected);
    }

    #[test]
    fn convexify_identity_and_segment_hull() {
        // single-point A: convexification is the identity
        let single = Representation {
            name: "single".into(),
            tag: ConstructionTag::Printed,
            param_dim: 1,
            params: vec![vec![0.5]],
            e: Arc::new(|_t, _x, a| (a[0], 1.0 - a[0])),
        };
        let conv = convexify_representation(&single, 1, 5).unwrap();
        for a in &conv.params {
            let (f, l) = conv.eval(0.0, 0.0, a);
            assert!((f - 0.5).abs() < 1e-15 && (l - 0.5).abs() < 1e-15);
        }
        // two-point A with f values {-1, 1}: the image covers [-1, 1]
        let two = Representation {
            name: "two".into(),
            tag: ConstructionTag::Printed,
            param_dim: 1,
            params: vec![vec![-1.0], vec![1.0]],
            e: Arc::new(|_t, _x, a| (a[0], 0.0)),
        };
        let conv = convexify_representation(&two, 1, 33).unwrap();
        let mut covered = vec![false; 17];
        for a in &conv.params {
            let (f, _) = conv.eval(0.0, 0.0, a);
            let cell = ((f + 1.0) / 2.0 * 16.0).round() as usize;
            covered[cell.min(16)] = true;
        }
        assert!(covered.iter().all(|&c| c), "hull not covered: {covered:?}");
    }

    #[test]
    fn convexified_sec3_covers_dom_and_certifies_lambda() {
        let rep = printed_sec3_representation(65);
        let conv = convexify_representation(&rep, 4, 9).unwrap();
        let x = 2.0;
        // image of f covers dom H*(2,.) = [-2,2] within one cell
        let cell = 4.0 / 32.0;
        let mut covered = vec![false; 33];
        for a in &conv.params {
            let (f, _) = conv.eval(0.0, x, a);
            let idx = ((f + 2.0) / cell).round() as isize;
            if (0..=32).contains(&idx) {
                covered[idx as usize] = true;
            }
        }
        assert!(covered.iter().all(|&c| c), "dom not covered");
        // lambda-hat certifies the (A)-bounds of the printed pair
        let lam = representation_lambda_hat(&conv, 0.0, x);
        assert!(lam <= x.abs() + 1.0 + 1e-9, "lambda-hat {lam}");
        assert!(lam >= 2.0 - 1e-9);
        let l = crate::models::printed_lagrangian("sec3").unwrap();
        let (lo, hi) = l.domain(0.0, x).unwrap();
        assert!(lo.abs().max(hi.abs()) <= lam + 1e-9);
    }

    #[test]
    fn steiner_selection_comparison_on_sec3() {
        let h = builtin("sec3").unwrap().as_hamiltonian().unwrap();
        let cfg = BuildConfig::default();
        let slice = conjugate_epi_slice(&h, 0.0, 2.0, &cfg).unwrap();
        let om = 2.0 * 3.0 + 1.0;
        for a in [(0.3, -0.4), (-0.5, 0.1), (0.0, -0.9)] {
            let proj = slice.project((om * a.0, om * a.1));
            let steiner = steiner_selection(&slice, om, a, 2048).unwrap();
            // both selections land in the epigraph (the sandwich upper half)
            assert!(slice.contains(proj.0, proj.1, 1e-9));
            assert!(slice.contains(steiner.0, steiner.1, 0.12), "{steiner:?}");
        }
    }
}
