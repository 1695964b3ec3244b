//! The constructive side of the viability theory: the step-size rule
//!
//!   |y + h(f - (y-w)) - w| <= |y-w|  for  0 <= h < 2 (|y-w|^2 - <f, y-w>) / |f - (y-w)|^2,
//!
//! valid whenever <f, y-w> < |y-w|^2, the epsilon-approximate Euler
//! broken-line builder it powers, and numerical invariance checking of
//! trajectories against an epigraph.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::geometry::{EpiDist, EpiSet, QSample};
use crate::grid::GridFn;
use crate::models::LagrangianModel;
use crate::valuefn::Trajectory;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// The admissible step interval of the descent lemma.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepBound {
    pub y: [f64; 3],
    pub w: [f64; 3],
    pub f: [f64; 3],
    pub h_max: f64,
}

impl StepBound {
    /// The moved point y + h (f - (y - w)).
    pub fn advance(&self, h: f64) -> [f64; 3] {
        let n = sub(self.y, self.w);
        [
            self.y[0] + h * (self.f[0] - n[0]),
            self.y[1] + h * (self.f[1] - n[1]),
            self.y[2] + h * (self.f[2] - n[2]),
        ]
    }
}

/// Checks the strict precondition <f, y-w> < |y-w|^2 and returns
/// h_max = 2 (|y-w|^2 - <f, y-w>) / |f - (y-w)|^2. Every h in [0, h_max)
/// satisfies |y + h(f - (y-w)) - w| <= |y - w|.
pub fn step_bound(y: [f64; 3], w: [f64; 3], f: [f64; 3]) -> Result<StepBound, Error> {
    let n = sub(y, w);
    let n2 = dot(n, n);
    let fn_ = dot(f, n);
    if fn_ >= n2 {
        // includes the impossibility case f = y - w
        return Err(Error::NoValidStep);
    }
    let fmn = sub(f, n);
    let denom = dot(fmn, fmn);
    if denom == 0.0 {
        return Err(Error::NoValidStep);
    }
    Ok(StepBound {
        y,
        w,
        f,
        h_max: 2.0 * (n2 - fn_) / denom,
    })
}

/// One interval of an epsilon-approximate solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Interval {
    pub t_j: f64,
    pub tau_j: f64,
    /// Chosen (1, v_j, -eta_j).
    pub f: [f64; 3],
    /// Proximal epigraph point of y(t_j).
    pub w: [f64; 3],
    /// Perturbed base point, |wbar - w| <= epsilon.
    pub wbar: [f64; 3],
    /// y(t_j), the interval's left state.
    pub y: [f64; 3],
    /// y(t_j) was inside the epigraph (condition (iv) applies).
    pub on_epi: bool,
}

/// An Euler broken line staying within epsilon of the epigraph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsApproxSolution {
    pub epsilon: f64,
    pub intervals: Vec<Interval>,
    /// Final state y(t_end).
    pub y_end: [f64; 3],
    pub t_end: f64,
    /// Window restarts used to pass the local-theorem horizon.
    pub restarts: usize,
    /// The working-box radius from the Gronwall a-priori estimate.
    pub radius: f64,
}

impl EpsApproxSolution {
    /// y(t) by the interval formula y(t_j) + (t - t_j)(f_j - (y_j - w_j)).
    pub fn eval(&self, t: f64) -> Option<[f64; 3]> {
        if self.intervals.is_empty() {
            return None;
        }
        if t >= self.t_end {
            return Some(self.y_end);
        }
        let iv = match self
            .intervals
            .binary_search_by(|iv| iv.t_j.partial_cmp(&t).unwrap())
        {
            Ok(i) => &self.intervals[i],
            Err(0) => return None,
            Err(i) => &self.intervals[i - 1],
        };
        let h = t - iv.t_j;
        let n = sub(iv.y, iv.w);
        Some([
            iv.y[0] + h * (iv.f[0] - n[0]),
            iv.y[1] + h * (iv.f[1] - n[1]),
            iv.y[2] + h * (iv.f[2] - n[2]),
        ])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Perturbed-base-point budget of the witness search.
    pub witness_budget: usize,
    /// Distances below `eps * on_epi_frac` count as "on the epigraph":
    /// stepping from exact boundary points only would shrink the admissible
    /// h toward zero as the state hugs the boundary.
    pub on_epi_frac: f64,
    /// Velocity-grid resolution of the witness search.
    pub velocity_nodes: usize,
    /// Hard cap on intervals per run.
    pub max_intervals: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            witness_budget: 64,
            on_epi_frac: 0.25,
            velocity_nodes: 129,
            max_intervals: 400_000,
        }
    }
}

/// Builds an epsilon-approximate solution from `start` in epi U up to
/// `t_stop`, restarting the local window until the target time is reached.
///
/// Preconditions follow the local theorem: eps <= (T - t0) / (2 (1 + T)),
/// re-checked at every window restart, and each window runs to
/// min{ t_r + 1/(1 + C_R), t_r + (T - t_r)/2, t_stop }.
pub fn build_eps_approx(
    u: &GridFn,
    lagrangian: Arc<LagrangianModel>,
    start: [f64; 3],
    eps: f64,
    t_stop: f64,
    cfg: &BuildConfig,
) -> Result<EpsApproxSolution, Error> {
    let epi = EpiSet::new(u)?;
    let t_axis = u.grid.axes[0];
    let x_axis = u.grid.axes[1];
    let horizon = t_axis.hi;
    let t0 = start[0];
    if t_stop <= t0 || t_stop > horizon {
        return Err(Error::InvalidConfig("t_stop outside (t0, T]".into()));
    }
    if !epi.contains(start, 1e-9) {
        return Err(Error::Precondition("start point is not in epi U".into()));
    }
    let eps0 = (horizon - t0) / (2.0 * (1.0 + horizon));
    if eps <= 0.0 || eps > eps0 {
        return Err(Error::Precondition(format!(
            "eps {eps} violates 0 < eps <= (T - t0)/(2(1+T)) = {eps0}"
        )));
    }

    // C_R over the working box, and the Gronwall a-priori radius
    let mut c_r: f64 = 0.0;
    for i in 0..17 {
        for j in 0..17 {
            let t = t_axis.lo + (t_axis.hi - t_axis.lo) * i as f64 / 16.0;
            let x = x_axis.lo + (x_axis.hi - x_axis.lo) * j as f64 / 16.0;
            if let Some(b) = lagrangian.domain_bound(t, x) {
                c_r = c_r.max(b);
            }
        }
    }
    if c_r == 0.0 {
        c_r = 1.0;
    }
    let integral_c = c_r * (horizon - t0);
    let radius = (start[1].abs() + integral_c) * integral_c.exp();

    let clamp_tx = |t: f64, x: f64| -> (f64, f64) {
        (
            t.clamp(t_axis.lo, t_axis.hi),
            x.clamp(x_axis.lo, x_axis.hi),
        )
    };

    let mut intervals: Vec<Interval> = Vec::new();
    let mut y = start;
    let mut t_cur = t0;
    let mut restarts = 0usize;

    while t_cur < t_stop - 1e-12 {
        // window precondition and extent per the local theorem
        let eps_window = (horizon - t_cur) / (2.0 * (1.0 + horizon));
        if eps > eps_window {
            return Err(Error::Precondition(format!(
                "eps {eps} too large to restart at t = {t_cur} (limit {eps_window})"
            )));
        }
        let window_end = (t_cur + 1.0 / (1.0 + c_r))
            .min(t_cur + (horizon - t_cur) / 2.0)
            .min(t_stop);

        while t_cur < window_end - 1e-12 {
            if intervals.len() >= cfg.max_intervals {
                return Err(Error::InvalidConfig(
                    "interval budget exhausted before the stop time".into(),
                ));
            }
            let d = epi.dist_to_epi(y)?;
            let (f, w, wbar, h_cap, on_epi) = if d.dist <= cfg.on_epi_frac * eps {
                // on the epigraph (within tolerance): any f in {1} x Q at
                // the clamped base; the step keeps dist <= d + h|f| < eps
                let (tc, xc) = clamp_tx(y[0], y[1]);
                let q = QSample::new(tc, xc, lagrangian.clone(), cfg.velocity_nodes)?;
                let (v, eta) = q.minimal_norm_element();
                let f = [1.0, v, eta];
                let w = y;
                let cap = (0.95 - cfg.on_epi_frac).max(0.1) * eps / (1.0 + norm(f));
                (f, w, w, cap, true)
            } else {
                let w = d.w;
                let n = sub(y, w);
                let n2 = dot(n, n);
                let (f, wbar) =
                    witness_search(&lagrangian, &d, n, n2, eps, cfg, &clamp_tx)
                        .ok_or(Error::BoundaryConditionFailure { t: t_cur })?;
                let sb = step_bound(y, w, f)?;
                (f, w, wbar, (0.5 * sb.h_max).min(eps / (1.0 + norm(f))), false)
            };
            let h = h_cap.min(window_end - t_cur).max(1e-14);
            let n = sub(y, w);
            let y_next = [
                y[0] + h * (f[0] - n[0]),
                y[1] + h * (f[1] - n[1]),
                y[2] + h * (f[2] - n[2]),
            ];
            intervals.push(Interval {
                t_j: t_cur,
                tau_j: t_cur + h,
                f,
                w,
                wbar,
                y,
                on_epi,
            });
            y = y_next;
            t_cur += h;
        }
        restarts += 1;
    }

    Ok(EpsApproxSolution {
        epsilon: eps,
        intervals,
        y_end: y,
        t_end: t_cur,
        restarts: restarts.saturating_sub(1),
        radius,
    })
}

/// Searches perturbed base points (t_k, x_k) on a shrinking ladder around
/// the proximal base and velocities in dom L(t_k, x_k, .) for a direction
/// f = (1, v, -L) satisfying the descent precondition <f, n> < |n|^2.
fn witness_search(
    lagrangian: &Arc<LagrangianModel>,
    d: &EpiDist,
    n: [f64; 3],
    n2: f64,
    eps: f64,
    cfg: &BuildConfig,
    clamp_tx: &dyn Fn(f64, f64) -> (f64, f64),
) -> Option<([f64; 3], [f64; 3])> {
    let dirs: [(f64, f64); 9] = [
        (0.0, 0.0),
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (0.7, 0.7),
        (0.7, -0.7),
        (-0.7, 0.7),
        (-0.7, -0.7),
    ];
    let levels = cfg.witness_budget.div_ceil(dirs.len()).max(1);
    let mut best: Option<(f64, [f64; 3], [f64; 3])> = None;
    let mut tried = 0usize;
    'outer: for m in 0..levels {
        let rho = eps * 0.5f64.powi(m as i32);
        for (dt, dx) in dirs {
            if tried >= cfg.witness_budget {
                break 'outer;
            }
            tried += 1;
            let (tk, xk) = clamp_tx(d.w[0] + rho * dt, d.w[1] + rho * dx);
            // |wbar - w| <= eps
            let wbar = [tk, xk, d.w[2]];
            if norm(sub(wbar, d.w)) > eps {
                continue;
            }
            let Some((lo, hi)) = lagrangian.domain(tk, xk) else {
                continue;
            };
            let nv = cfg.velocity_nodes.max(3);
            for i in 0..nv {
                let v = if hi > lo {
                    lo + (hi - lo) * i as f64 / (nv - 1) as f64
                } else {
                    lo
                };
                let ExtReal::Finite(lv) = lagrangian.eval(tk, xk, v) else {
                    continue;
                };
                let f = [1.0, v, -lv];
                let ip = dot(f, n);
                if ip < n2 * (1.0 - 1e-9) - 1e-15 {
                    match &best {
                        Some((bip, _, _)) if *bip <= ip => {}
                        _ => best = Some((ip, f, wbar)),
                    }
                }
                if hi <= lo {
                    break;
                }
            }
        }
        // prefer the least perturbation: accept as soon as a level succeeds
        if best.is_some() {
            break;
        }
    }
    best.map(|(_, f, wbar)| (f, wbar))
}

/// Audit of the builder's invariants, measured after construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsAudit {
    /// sup over sampled times of dist(y(t), epi U).
    pub sup_dist: f64,
    /// Worst reconstruction error of the interval formula at interval ends.
    pub reconstruction_err: f64,
    /// Condition (iv): max (tau_j - t_j)|f_j| over on-epi intervals.
    pub max_epi_step: f64,
    /// sup |w_j - y(t)| over sampled times.
    pub sup_w_dev: f64,
    /// sup |s(t) - t|.
    pub sup_s_dev: f64,
    pub samples: usize,
}

/// Samples every interval (interior and endpoints) and measures the
/// EpsApproxSolution invariants independently of the builder.
pub fn audit_eps_approx(
    sol: &EpsApproxSolution,
    u: &GridFn,
    samples_per_interval: usize,
) -> Result<EpsAudit, Error> {
    let epi = EpiSet::new(u)?;
    let mut sup_dist = 0.0f64;
    let mut recon = 0.0f64;
    let mut max_epi_step = 0.0f64;
    let mut sup_w_dev = 0.0f64;
    let mut sup_s_dev = 0.0f64;
    let mut samples = 0usize;
    let m = samples_per_interval.max(2);
    for (k, iv) in sol.intervals.iter().enumerate() {
        let n = sub(iv.y, iv.w);
        for s in 0..m {
            let t = iv.t_j + (iv.tau_j - iv.t_j) * s as f64 / (m - 1) as f64;
            let h = t - iv.t_j;
            let y = [
                iv.y[0] + h * (iv.f[0] - n[0]),
                iv.y[1] + h * (iv.f[1] - n[1]),
                iv.y[2] + h * (iv.f[2] - n[2]),
            ];
            let dd = epi.dist_to_epi(y)?;
            sup_dist = sup_dist.max(dd.dist);
            sup_w_dev = sup_w_dev.max(norm(sub(iv.w, y)));
            sup_s_dev = sup_s_dev.max((y[0] - t).abs());
            samples += 1;
        }
        if iv.on_epi {
            max_epi_step = max_epi_step.max((iv.tau_j - iv.t_j) * norm(iv.f));
        }
        // the next interval's stored state must equal the formula at tau_j
        let next_y = if k + 1 < sol.intervals.len() {
            sol.intervals[k + 1].y
        } else {
            sol.y_end
        };
        let h = iv.tau_j - iv.t_j;
        let formula = [
            iv.y[0] + h * (iv.f[0] - n[0]),
            iv.y[1] + h * (iv.f[1] - n[1]),
            iv.y[2] + h * (iv.f[2] - n[2]),
        ];
        recon = recon.max(norm(sub(next_y, formula)));
    }
    Ok(EpsAudit {
        sup_dist,
        reconstruction_err: recon,
        max_epi_step,
        sup_w_dev,
        sup_s_dev,
        samples,
    })
}

/// Invariance check of a trajectory against the epigraph of U.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// min over nodes of u(t_i) - U(t_i, x(t_i)).
    pub worst_margin: f64,
    /// Worst sampled value of n^t + <v, n^x> - n^u L over proximal normals
    /// and velocities in dom L (the theorem's hypothesis).
    pub worst_hypothesis_margin: f64,
    /// The hypothesis was violated beyond tolerance somewhere: the
    /// conclusion check is reported but not implied.
    pub hypothesis_violated: bool,
    pub nodes_checked: usize,
}

/// Verifies u(t_i) >= U(t_i, x(t_i)) - tol along the trajectory, after
/// checking its Q-segment feasibility and the terminal comparison; also
/// samples the invariance hypothesis at proximal normals.
pub fn check_invariance(
    u: &GridFn,
    lagrangian: &Arc<LagrangianModel>,
    traj: &Trajectory,
    tol: f64,
) -> Result<InvarianceReport, Error> {
    if traj.nodes.len() < 2 {
        return Err(Error::Precondition("trajectory too short".into()));
    }
    let margins = traj.q_segment_margins(lagrangian);
    if let Some(worst) = margins
        .iter()
        .cloned
        ()
        .fold(None::<f64>, |acc, m| Some(acc.map_or(m, |a| a.min(m))))
    {
        if worst < -tol {
            return Err(Error::Precondition(format!(
                "trajectory violates the Q-segment invariant (margin {worst})"
            )));
        }
    }
    let epi = EpiSet::new(u)?;
    let last = traj.nodes.last().unwrap();
    let u_terminal = u.eval_interp(&[last.t, last.x])?;
    if let ExtReal::Finite(ut) = u_terminal {
        if last.u < ut - tol {
            return Err(Error::Precondition(format!(
                "terminal condition u(T) >= U(T, x(T)) fails: {} < {}",
                last.u, ut
            )));
        }
    }

    let mut worst_margin = f64::INFINITY;
    for node in &traj.nodes {
        match u.eval_interp(&[node.t, node.x]) {
            Ok(ExtReal::Finite(uval)) => {
                worst_margin = worst_margin.min(node.u - uval);
            }
            _ => continue,
        }
    }

    // hypothesis (4.1): sample proximal normals from points dropped below
    // the graph along the trajectory
    let mut worst_hyp = f64::INFINITY;
    let stride = (traj.nodes.len() / 16).max(1);
    for node in traj.nodes.iter().step_by(stride) {
        let Ok(ExtReal::Finite(uval)) = u.eval_interp(&[node.t, node.x]) else {
            continue;
        };
        let y = [node.t, node.x, uval - 0.1];
        let d = epi.dist_to_epi(y)?;
        if d.dist <= 0.0 {
            continue;
        }
        let n = d.normal;
        let (tw, xw) = (d.w[0], d.w[1]);
        if let Some((lo, hi)) = lagrangian.domain(tw, xw) {
            let nv = 33;
            for i in 0..nv {
                let v = if hi > lo {
                    lo + (hi - lo) * i as f64 / (nv - 1) as f64
                } else {
                    lo
                };
                if let ExtReal::Finite(lv) = lagrangian.eval(tw, xw, v) {
                    let expr = n[0] + v * n[1] - n[2] * lv;
                    worst_hyp = worst_hyp.min(expr);
                }
                if hi <= lo {
                    break;
                }
            }
        }
    }

    Ok(InvarianceReport {
        worst_margin,
        worst_hypothesis_margin: worst_hyp,
        hypothesis_violated: worst_hyp < -tol,
        nodes_checked: traj.nodes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Grid};
    use crate::models::builtin;

    #[test]
    fn step_bound_pure_descent() {
        // y-w = (1,0,0), f = 0: h_max = 2; at h=1 the point reaches w
        let y = [1.0, 0.0, 0.0];
        let w = [0.0, 0.0, 0.0];
        let f = [0.0, 0.0, 0.0];
        let sb = step_bound(y, w, f).unwrap();
        assert!((sb.h_max - 2.0).abs() < 1e-15);
        let moved = sb.advance(1.0);
        assert!(norm(sub(moved, w)) <= 1.0 + 1e-15);
        assert!(norm(sub(moved, w)) < 1e-12);
    }

    #[test]
    fn step_bound_oblique() {
        // y-w = (1,0,0), f = (0, 0.5, 0): h_max = 2(1-0)/|(-1,0.5,0)|^2 = 1.6
        let y = [1.0, 0.0, 0.0];
        let w = [0.0, 0.0, 0.0];
        let f = [0.0, 0.5, 0.0];
        let sb = step_bound(y, w, f).unwrap();
        assert!((sb.h_max - 1.6).abs() < 1e-12);
        let moved = sb.advance(1.5);
        let d = norm(sub(moved, w));
        assert!((d - 0.901_387_818_865_997_1).abs() < 1e-12, "{d}");
        assert!(d <= 1.0);
    }

    #[test]
    fn step_bound_rejects_impossible_case() {
        let y = [1.0, 0.0, 0.0];
        let w = [0.0, 0.0, 0.0];
        // f = y - w: <f, n> = |n|^2, the lemma's impossibility case
        assert!(matches!(
            step_bound(y, w, [1.0, 0.0, 0.0]),
            Err(Error::NoValidStep)
        ));
        // and anything with <f,n> >= |n|^2
        assert!(matches!(
            step_bound(y, w, [2.0, 3.0, 0.0]),
            Err(Error::NoValidStep)
        ));
    }

    #[test]
    fn step_bound_conclusion_holds_on_random_triples() {
        let mut s = crate::sampler::Sampler::new(4040, 9);
        let mut accepted = 0;
        while accepted < 1000 {
            let z = s.next_in(&[-1.0; 9], &[1.0; 9]);
            let y = [z[0], z[1], z[2]];
            let w = [z[3], z[4], z[5]];
            let f = [2.0 * z[6], 2.0 * z[7], 2.0 * z[8]];
            match step_bound(y, w, f) {
                Ok(sb) => {
                    accepted += 1;
                    let base = norm(sub(y, w));
                    for frac in [0.0, 0.25, 0.5, 0.75, 0.99] {
                        let moved = sb.advance(frac * sb.h_max);
                        assert!(
                            norm(sub(moved, w)) <= base + 1e-9,
                            "lemma conclusion fails at frac {frac}"
                        );
                    }
                }
                Err(_) => {
                    let n = sub(y, w);
                    assert!(dot(f, n) >= dot(n, n) - 1e-12);
                }
            }
        }
    }

    fn flat_u() -> GridFn {
        let g = Grid::new(vec![
            Axis::new(0.0, 1.0, 41).unwrap(),
            Axis::new(-2.0, 2.0, 81).unwrap(),
        ])
        .unwrap();
        GridFn::sample(g, |_| ExtReal::Finite(0.0)).unwrap()
    }

    fn zero_lagrangian() -> Arc<LagrangianModel> {
        Arc::new(
            LagrangianModel::from_fn("zero", 1.0, |_t, _x, v| {
                if v.abs() <= 1.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PlusInf
                }
            })
            .with_domain(|_t, _x| (-1.0, 1.0)),
        )
    }

    #[test]
    fn flat_case_stays_on_the_boundary() {
        let u = flat_u();
        let sol = build_eps_approx(
            &u,
            zero_lagrangian(),
            [0.0, 0.0, 0.0],
            0.05,
            0.4,
            &BuildConfig::default(),
        )
        .unwrap();
        let audit = audit_eps_approx(&sol, &u, 5).unwrap();
        assert!(audit.sup_dist <= 0.05 + 1e-9, "{audit:?}");
        assert!(audit.reconstruction_err < 1e-12);
        assert!(audit.max_epi_step <= 0.05 + 1e-12);
        // minimal-norm element of Q = {(v, eta): eta <= 0} is (0,0): u
        // stays exactly on the flat boundary
        assert!(sol.y_end[2].abs() < 1e-9);
        assert!((sol.y_end[0] - 0.4).abs() < 1e-9);
    }

    #[test]
    fn eps_preconditions_are_enforced() {
        let u = flat_u();
        // eps too large
        assert!(matches!(
            build_eps_approx(
                &u,
                zero_lagrangian(),
                [0.0, 0.0, 0.0],
                0.3,
                0.5,
                &BuildConfig::default()
            ),
            Err(Error::Precondition(_))
        ));
        // start below the epigraph
        assert!(matches!(
            build_eps_approx(
                &u,
                zero_lagrangian(),
                [0.0, 0.0, -1.0],
                0.05,
                0.5,
                &BuildConfig::default()
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sec4_eps_family_stays_within_eps() {
        let v = builtin("sec4-V").unwrap().as_value().unwrap();
        let g = Grid::new(vec![
            Axis::new(0.0, 1.0, 101).unwrap(),
            Axis::new(-2.0, 2.0, 201).unwrap(),
        ])
        .unwrap();
        let u = GridFn::sample(g, |p| ExtReal::Finite(v.eval(p[0], p[1]))).unwrap();
        let l = builtin("sec4-L").unwrap().as_lagrangian().unwrap();
        let start = [0.2, 0.9, v.eval(0.2, 0.9)];
        let sol = build_eps_approx(&u, l, start, 0.1, 0.5, &BuildConfig::default()).unwrap();
        let audit = audit_eps_approx(&sol, &u, 3).unwrap();
        assert!(
            audit.sup_dist <= 0.1 + 1e-6,
            "sup dist {} exceeds eps",
            audit.sup_dist
        );
        assert!(audit.sup_w_dev <= 0.1 + 1e-6, "{audit:?}");
        assert!(audit.sup_s_dev <= 0.5 * 0.1 + 1e-6, "{audit:?}");
        assert!((sol.t_end - 0.5).abs() < 1e-9);
    }

    #[test]
    fn invariance_check_on_lifted_flat_trajectory() {
        let u = flat_u();
        let l = zero_lagrangian();
        let mk = |lift: f64| Trajectory {
            nodes: (0..11)
                .map(|k| crate::valuefn::TrajectoryNode {
                    t: k as f64 * 0.1,
                    x: 0.0,
                    u: lift,
                })
                .collect(),
            velocities: vec![0.0; 10],
            requested_start: (0.0, 0.0),
            start: (0.0, 0.0),
        };
        let rep = check_invariance(&u, &l, &mk(0.0), 1e-9).unwrap();
        assert!(rep.worst_margin >= -1e-9);
        let rep1 = check_invariance(&u, &l, &mk(1.0), 1e-9).unwrap();
        assert!(rep1.worst_margin >= 1.0 - 1e-9, "{rep1:?}");
        assert!(!rep1.hypothesis_violated);
    }

    #[test]
    fn invariance_check_rejects_infeasible_segments() {
        let u = flat_u();
        let l = zero_lagrangian();
        // velocity 3 is far outside dom L = [-1,1]
        let traj = Trajectory {
            nodes: vec![
                crate::valuefn::TrajectoryNode { t: 0.0, x: 0.0, u: 0.0 },
                crate::valuefn::TrajectoryNode { t: 0.1, x: 0.3, u: 0.0 },
            ],
            velocities: vec![3.0],
            requested_start: (0.0, 0.0),
            start: (0.0, 0.0),
        };
        assert!(matches!(
            check_invariance(&u, &l, &traj, 1e-6),
            Err(Error::Precondition(_))
        ));
    }
}
