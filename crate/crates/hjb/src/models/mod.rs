//! Registry of evaluable Hamiltonian/Lagrangian models: every worked
//! example, with their printed conjugate partners and whatever regularity
//! data (C_R, c(t), k_R(t), lambda, ...) the closed forms certify.
//!
//! All builtins are one-dimensional in space (N = 1) with horizon T = 1.

use std::sync::Arc;

use crate::error::Error;
use crate::extreal::ExtReal;

pub mod checks;

pub use checks::{
    check_condition_a, check_h, check_l6_transfer, ConditionReport, HCondition, SamplerConfig,
    Verdict, Witness,
};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Scalar2Fn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type HamFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type LagFn = Arc<dyn Fn(f64, f64, f64) -> ExtReal + Send + Sync>;
type GradFn = Arc<dyn Fn(f64, f64) -> Option<(f64, f64)> + Send + Sync>;
type CtrlFn = Arc<dyn Fn(f64, f64, &[f64]) -> f64 + Send + Sync>;

/// Real-valued Hamiltonian H(t,x,p), convex in p.
#[derive(Clone)]
pub struct HamiltonianModel {
    pub name: String,
    /// Spatial dimension N.
    pub dim: usize,
    /// Horizon T.
    pub horizon: f64,
    eval: HamFn,
    /// Integrable c(t) certifying (H4), when known.
    pub known_c: Option<ScalarFn>,
    /// (R, t) -> k_R(t) certifying (H5), when known.
    pub known_k_r: Option<Scalar2Fn>,
    /// R -> C_R certifying (H3), when known.
    pub known_c_r: Option<ScalarFn>,
    /// lambda(t,x) of condition (A), when known.
    pub known_lambda: Option<Scalar2Fn>,
    /// theta(t) with lambda(t,x) <= theta(t)(1+|x|), when known.
    pub known_theta: Option<ScalarFn>,
    /// (R, t) -> zeta_R(t), the Lipschitz modulus of lambda(t,.), when known.
    pub known_zeta_r: Option<Scalar2Fn>,
}

impl HamiltonianModel {
    pub fn eval(&self, t: f64, x: f64, p: f64) -> f64 {
        (self.eval)(t, x, p)
    }

    /// A bare model from a closure; regularity data defaults to unknown.
    pub fn from_fn(
        name: &str,
        horizon: f64,
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        HamiltonianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(f),
            known_c: None,
            known_k_r: None,
            known_c_r: None,
            known_lambda: None,
            known_theta: None,
            known_zeta_r: None,
        }
    }

    pub fn with_known_c_r(mut self, c_r: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.known_c_r = Some(Arc::new(c_r));
        self
    }

    pub fn with_known_k_r(
        mut self,
        k_r: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.known_k_r = Some(Arc::new(k_r));
        self
    }

    pub fn with_known_c(mut self, c: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.known_c = Some(Arc::new(c));
        self
    }

    pub fn with_known_lambda(
        mut self,
        lambda: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.known_lambda = Some(Arc::new(lambda));
        self
    }
}

impl std::fmt::Debug for HamiltonianModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

/// Extended-real Lagrangian L(t,x,v) = H*(t,x,v), convex and proper in v.
#[derive(Clone)]
pub struct LagrangianModel {
    pub name: String,
    pub dim: usize,
    pub horizon: f64,
    eval: LagFn,
    /// Closed-form interval hull of dom L(t,x,.), when known.
    domain: Option<Scalar2FnPair>,
}

type Scalar2FnPair = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

impl LagrangianModel {
    pub fn eval(&self, t: f64, x: f64, v: f64) -> ExtReal {
        (self.eval)(t, x, v)
    }

    pub fn from_fn(
        name: &str,
        horizon: f64,
        f: impl Fn(f64, f64, f64) -> ExtReal + Send + Sync + 'static,
    ) -> Self {
        LagrangianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(f),
            domain: None,
        }
    }

    pub fn with_domain(
        mut self,
        d: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        self.domain = Some(Arc::new(d));
        self
    }

    /// Interval hull of the effective domain in v, when registered.
    pub fn domain(&self, t: f64, x: f64) -> Option<(f64, f64)> {
        self.domain.as_ref().map(|d| d(t, x))
    }

    /// sup |v| over dom L(t,x,.), from the registered descriptor.
    pub fn domain_bound(&self, t: f64, x: f64) -> Option<f64> {
        self.domain(t, x).map(|(lo, hi)| lo.abs().max(hi.abs()))
    }
}

impl std::fmt::Debug for LagrangianModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LagrangianModel")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// Closed-form scalar field over (t,x): value functions and coefficients.
#[derive(Clone)]
pub struct ValueModel {
    pub name: String,
    pub dim: usize,
    pub horizon: f64,
    eval: Scalar2Fn,
    /// Analytic gradient (V_t, V_x); None at nonsmooth points.
    gradient: Option<GradFn>,
}

impl ValueModel {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        (self.eval)(t, x)
    }

    pub fn gradient(&self, t: f64, x: f64) -> Option<(f64, f64)> {
        self.gradient.as_ref().and_then(|g| g(t, x))
    }

    pub fn from_fn(
        name: &str,
        horizon: f64,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ValueModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(f),
            gradient: None,
        }
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(f64, f64) -> Option<(f64, f64)> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }
}

impl std::fmt::Debug for ValueModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ValueModel")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// Control system (f, l) realizing H(t,x,p) = sup_a { <p, f(t,x,a)> - l(t,x,a) }.
#[derive(Clone)]
pub struct ControlSystemModel {
    pub name: String,
    pub dim: usize,
    pub horizon: f64,
    pub control_dim: usize,
    f: CtrlFn,
    l: CtrlFn,
}

impl ControlSystemModel {
    pub fn eval_f(&self, t: f64, x: f64, a: &[f64]) -> f64 {
        (self.f)(t, x, a)
    }

    pub fn eval_l(&self, t: f64, x: f64, a: &[f64]) -> f64 {
        (self.l)(t, x, a)
    }

    /// sup_a { p f - l } over a warped control lattice covering all of R^M
    /// (s in (-1,1)^M mapped by s -> s/(1-|s|) per axis, n points per axis).
    pub fn hamiltonian_sampled(&self, t: f64, x: f64, p: f64, n: usize) -> f64 {
        assert!(n >= 3);
        let warp = |s: f64| s / (1.0 - s.abs());
        let mut best = f64::NEG_INFINITY;
        let m = self.control_dim;
        let mut idx = vec![0usize; m];
        let mut a = vec![0.0; m];
        loop {
            for k in 0..m {
                let s = -0.999 + 1.998 * idx[k] as f64 / (n - 1) as f64;
                a[k] = warp(s);
            }
            let val = p * self.eval_f(t, x, &a) - self.eval_l(t, x, &a);
            best = best.max(val);
            // odometer
            let mut k = 0;
            loop {
                if k == m {
                    return best;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

impl std::fmt::Debug for ControlSystemModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ControlSystemModel")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// What the registry hands out.
#[derive(Clone, Debug)]
pub enum Model {
    Hamiltonian(Arc<HamiltonianModel>),
    Lagrangian(Arc<LagrangianModel>),
    Value(Arc<ValueModel>),
    ControlSystem(Arc<ControlSystemModel>),
}

impl Model {
    pub fn name(&self) -> &str {
        match self {
            Model::Hamiltonian(m) => &m.name,
            Model::Lagrangian(m) => &m.name,
            Model::Value(m) => &m.name,
            Model::ControlSystem(m) => &m.name,
        }
    }

    pub fn as_hamiltonian(&self) -> Option<Arc<HamiltonianModel>> {
        match self {
            Model::Hamiltonian(m) => Some(m.clone()),
            _ => None,
        }
    }

    pub fn as_lagrangian(&self) -> Option<Arc<LagrangianModel>> {
        match self {
            Model::Lagrangian(m) => Some(m.clone()),
            _ => None,
        }
    }

    pub fn as_value(&self) -> Option<Arc<ValueModel>> {
        match self {
            Model::Value(m) => Some(m.clone()),
            _ => None,
        }
    }
}

pub const BUILTIN_NAMES: [&str; 10] = [
    "ex1",
    "ex2",
    "ex3-gamma",
    "ex4",
    "ex5-fl-hat",
    "ex5-fl-check",
    "sec3",
    "sec4-L",
    "sec4-V",
    "rem29",
];

/// gamma(t,x) = alpha + beta: locally Lipschitz, sublinear with integrable
/// c(t), but with k_R(t), c(t) necessarily unbounded in t.
pub fn gamma(t: f64, x: f64) -> f64 {
    let alpha = if t > 0.0 {
        (x.abs() / t.sqrt() - 1.0 / t).max(0.0)
    } else {
        0.0
    };
    let s = t.max(0.0).sqrt() + x.abs();
    let beta = if s > 0.0 { s * (1.0 / s).sin().abs() } else { 0.0 };
    alpha + beta
}

fn ham_sqrt_family(coef: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> HamFn {
    // H = (sqrt(c|p|) - 1)^2 if c|p| > 1 else 0, with c = coef(t,x)
    Arc::new(move |t, x, p| {
        let s = coef(t, x) * p.abs();
        if s > 1.0 {
            (s.sqrt() - 1.0).powi(2)
        } else {
            0.0
        }
    })
}

fn lag_sqrt_family(coef: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> LagFn {
    // L = |v|/(c - |v|) on (-c, c) when c != 0; indicator of {0} when c = 0
    Arc::new(move |t, x, v| {
        let c = coef(t, x);
        if c != 0.0 {
            if v.abs() < c {
                ExtReal::Finite(v.abs() / (c - v.abs()))
            } else {
                ExtReal::PlusInf
            }
        } else if v == 0.0 {
            ExtReal::Finite(0.0)
        } else {
            ExtReal::PlusInf
        }
    })
}

/// kappa(t,x): the slope coefficient of the section-4 Lagrangian,
/// 1/(2 sqrt|t-x| exp(2 sqrt|t-x|)); +inf on the diagonal.
pub fn sec4_kappa(t: f64, x: f64) -> f64 {
    let d = (t - x).abs();
    if d == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * d.sqrt() * (2.0 * d.sqrt()).exp())
    }
}

fn sec4_value(t: f64, x: f64, horizon: f64) -> f64 {
    if x >= t {
        (-2.0 * (x - t).sqrt()).exp() - 1.0
    } else if x >= 2.0 * t - horizon {
        1.0 - (-2.0 * (t - x).sqrt()).exp()
    } else {
        1.0
    }
}

fn sec4_gradient(t: f64, x: f64, horizon: f64) -> Option<(f64, f64)> {
    let eps = 1e-9;
    // nonsmooth on the diagonal and on the jump line x = 2t - T
    if (x - t).abs() <= eps || (x - (2.0 * t - horizon)).abs() <= eps {
        return None;
    }
    if x < 2.0 * t - horizon {
        return Some((0.0, 0.0));
    }
    let d = (x - t).abs();
    let g = (-2.0 * d.sqrt()).exp() / d.sqrt();
    Some((g, -g))
}

/// Looks up a builtin model by its registry name.
pub fn builtin(name: &str) -> Result<Model, Error> {
    let horizon = 1.0;
    match name {
        "ex1" => Ok(Model::Hamiltonian(Arc::new(HamiltonianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: ham_sqrt_family(|_t, x| x.abs()),
            known_c: Some(Arc::new(|_t| 1.0)),
            known_k_r: Some(Arc::new(|_r, _t| 1.0)),
            known_c_r: Some(Arc::new(|r| r)),
            known_lambda: None,
            known_theta: None,
            known_zeta_r: None,
        }))),
        "ex2" => Ok(Model::Hamiltonian(Arc::new(HamiltonianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(|t, _x, p| {
                if t > 0.0 {
                    (p.abs() - 1.0 / t.sqrt()).max(0.0)
                } else {
                    0.0
                }
            }),
            known_c: Some(Arc::new(|_t| 1.0)),
            known_k_r: Some(Arc::new(|_r, _t| 0.0)),
            known_c_r: Some(Arc::new(|_r| 1.0)),
            known_lambda: None,
            known_theta: None,
            known_zeta_r: None,
        }))),
        "ex3-gamma" => Ok(Model::Value(Arc::new(ValueModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(gamma),
            gradient: None,
        }))),
        "ex4" => Ok(Model::Hamiltonian(Arc::new(HamiltonianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: ham_sqrt_family(gamma),
            known_c: Some(Arc::new(|t| 1.0 + if t > 0.0 { 1.0 / t.sqrt() } else { 0.0 })),
            known_k_r: Some(Arc::new(|_r, t| if t > 0.0 { 3.0 / t.sqrt() } else { 0.0 })),
            known_c_r: Some(Arc::new(|r| r * r + r + 1.0)),
            known_lambda: None,
            known_theta: None,
            known_zeta_r: None,
        }))),
        "ex5-fl-hat" => Ok(Model::ControlSystem(Arc::new(ControlSystemModel {
            name: name.into(),
            dim: 1,
            horizon,
            control_dim: 2,
            f: Arc::new(|_t, x, a| a[0] * x.abs() / (1.0 + a[0].abs())),
            l: Arc::new(|_t, x, a| {
                a[0].abs() + a[1].abs() + (x * a[1]).abs() / (1.0 + a[1].abs())
            }),
        }))),
        "ex5-fl-check" => Ok(Model::ControlSystem(Arc::new(ControlSystemModel {
            name: name.into(),
            dim: 1,
            horizon,
            control_dim: 2,
            f: Arc::new(|t, x, a| a[0] * gamma(t, x) / (1.0 + a[0].abs())),
            l: Arc::new(|t, x, a| {
                a[0].abs() + a[1].abs() + gamma(t, x) * a[1].abs() / (1.0 + a[1].abs())
            }),
        }))),
        "sec3" => Ok(Model::Hamiltonian(Arc::new(HamiltonianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(|_t, x, p| (p.abs() * x.abs() - 1.0).max(0.0)),
            known_c: Some(Arc::new(|_t| 1.0)),
            known_k_r: Some(Arc::new(|_r, _t| 1.0)),
            known_c_r: Some(Arc::new(|r| r)),
            known_lambda: Some(Arc::new(|_t, x| x.abs() + 1.0)),
            known_theta: Some(Arc::new(|_t| 1.0)),
            known_zeta_r: Some(Arc::new(|_r, _t| 1.0)),
        }))),
        "sec4-L" => Ok(Model::Lagrangian(Arc::new(sec4_lagrangian(horizon)))),
        "sec4-V" => Ok(Model::Value(Arc::new(ValueModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(move |t, x| sec4_value(t, x, horizon)),
            gradient: Some(Arc::new(move |t, x| sec4_gradient(t, x, horizon))),
        }))),
        "rem29" => Ok(Model::Hamiltonian(Arc::new(HamiltonianModel {
            name: name.into(),
            dim: 1,
            horizon,
            eval: Arc::new(|t, _x, p| {
                if t > 0.0 {
                    (p.abs() / t.sqrt() - 1.0 / t).max(0.0)
                } else {
                    0.0
                }
            }),
            known_c: Some(Arc::new(|t| if t > 0.0 { 1.0 / t.sqrt() } else { 0.0 })),
            known_k_r: Some(Arc::new(|_r, _t| 0.0)),
            known_c_r: None,
            known_lambda: None,
            known_theta: None,
            known_zeta_r: None,
        }))),
        other => Err(Error::UnknownModel(other.into())),
    }
}

fn sec4_lagrangian(horizon: f64) -> LagrangianModel {
    LagrangianModel {
        name: "sec4-L".into(),
        dim: 1,
        horizon,
        eval: Arc::new(|t, x, v| {
            if t != x {
                if v.abs() <= 2.0 {
                    ExtReal::Finite(sec4_kappa(t, x) * v.abs())
                } else {
                    ExtReal::PlusInf
                }
            } else if v == 0.0 {
                ExtReal::Finite(0.0)
            } else {
                ExtReal::PlusInf
            }
        }),
        domain: Some(Arc::new(|t, x| {
            if t == x {
                (0.0, 0.0)
            } else {
                (-2.0, 2.0)
            }
        })),
    }
}

/// Printed Lagrangian partners of the Hamiltonian builtins, where the paper
/// gives the conjugate in closed form.
pub fn printed_lagrangian(name: &str) -> Result<Arc<LagrangianModel>, Error> {
    let horizon = 1.0;
    match name {
        "ex1" => Ok(Arc::new(LagrangianModel {
            name: "ex1-L".into(),
            dim: 1,
            horizon,
            eval: lag_sqrt_family(|_t, x| x.abs()),
            domain: Some(Arc::new(|_t, x| (-x.abs(), x.abs()))),
        })),
        "ex2" => Ok(Arc::new(LagrangianModel {
            name: "ex2-L".into(),
            dim: 1,
            horizon,
            eval: Arc::new(|t, _x, v| {
                if t > 0.0 {
                    if v.abs() <= 1.0 {
                        ExtReal::Finite(v.abs() / t.sqrt())
                    } else {
                        ExtReal::PlusInf
                    }
                } else if v == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PlusInf
                }
            }),
            domain: Some(Arc::new(|t, _x| {
                if t > 0.0 {
                    (-1.0, 1.0)
                } else {
                    (0.0, 0.0)
                }
            })),
        })),
        "ex4" => Ok(Arc::new(LagrangianModel {
            name: "ex4-L".into(),
            dim: 1,
            horizon,
            eval: lag_sqrt_family(gamma),
            domain: Some(Arc::new(|t, x| {
                let g = gamma(t, x);
                (-g, g)
            })),
        })),
        "sec3" => Ok(Arc::new(LagrangianModel {
            name: "sec3-L".into(),
            dim: 1,
            horizon,
            eval: Arc::new(|_t, x, v| {
                if x != 0.0 {
                    if v.abs() <= x.abs() {
                        ExtReal::Finite((v / x).abs())
                    } else {
                        ExtReal::PlusInf
                    }
                } else if v == 0.0 {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PlusInf
                }
            }),
            domain: Some(Arc::new(|_t, x| (-x.abs(), x.abs()))),
        })),
        "sec4-L" => Ok(Arc::new(sec4_lagrangian(horizon))),
        other => Err(Error::UnknownModel(other.into())),
    }
}

/// The Hamiltonian conjugate of the section-4 Lagrangian, by closed-form
/// arithmetic from the printed formula: H = 2 max{|p| - kappa(t,x), 0}.
pub fn sec4_hamiltonian() -> Arc<HamiltonianModel> {
    Arc::new(HamiltonianModel {
        name: "sec4-H".into(),
        dim: 1,
        horizon: 1.0,
        eval: Arc::new(|t, x, p| {
            let k = sec4_kappa(t, x);
            if k.is_finite() {
                2.0 * (p.abs() - k).max(0.0)
            } else {
                0.0
            }
        }),
        known_c: Some(Arc::new(|_t| 2.0)),
        known_k_r: None,
        known_c_r: Some(Arc::new(|_r| 2.0)),
        known_lambda: None,
        known_theta: None,
        known_zeta_r: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sec3_eval_matches_printed_form() {
        let h = builtin("sec3").unwrap().as_hamiltonian().unwrap();
        assert_eq!(h.eval(0.0, 2.0, 3.0), 5.0); // max{6-1, 0}
        assert_eq!(h.eval(0.0, 0.0, 3.0), 0.0);
    }

    #[test]
    fn ex1_eval_branches() {
        let h = builtin("ex1").unwrap().as_hamiltonian().unwrap();
        assert_eq!(h.eval(0.0, 1.0, 1.0), 0.0); // |xp| = 1 <= 1
        let v = h.eval(0.0, 2.0, 2.0); // |xp| = 4: (2-1)^2 = 1
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sec4_value_at_origin_start() {
        let v = builtin("sec4-V").unwrap().as_value().unwrap();
        let expect = (-2.0_f64).exp() - 1.0;
        assert!((v.eval(0.0, 1.0) - expect).abs() < 1e-12);
        // the three branches agree continuously across x = t
        assert!((v.eval(0.5, 0.5)).abs() < 1e-12);
        // jump across x = 2t - T
        let t = 0.6;
        let just_left = v.eval(t, 2.0 * t - 1.0 - 1e-9);
        let on_line = v.eval(t, 2.0 * t - 1.0);
        assert!((just_left - 1.0).abs() < 1e-12);
        assert!(on_line < 1.0);
    }

    #[test]
    fn sec4_gradient_satisfies_hjb_identity() {
        // -V_t + H(t,x,-V_x) = 0 at smooth points
        let v = builtin("sec4-V").unwrap().as_value().unwrap();
        let h = sec4_hamiltonian();
        for &(t, x) in &[(0.2, 0.9), (0.5, 1.4), (0.7, 0.55), (0.3, -0.2)] {
            let (vt, vx) = v.gradient(t, x).unwrap();
            let resid = -vt + h.eval(t, x, -vx);
            assert!(resid.abs() < 1e-9, "residual {resid} at ({t},{x})");
        }
    }

    #[test]
    fn sec4_lagrangian_dom_and_values() {
        let l = builtin("sec4-L").unwrap().as_lagrangian().unwrap();
        assert_eq!(l.eval(0.5, 0.5, 0.5), ExtReal::PlusInf); // diagonal, v != 0
        assert_eq!(l.eval(0.5, 0.5, 0.0), ExtReal::Finite(0.0));
        assert_eq!(l.eval(0.2, 0.9, 3.0), ExtReal::PlusInf); // |v| > 2
        let val = l.eval(0.2, 0.9, 1.0).to_f64();
        assert!((val - sec4_kappa(0.2, 0.9)).abs() < 1e-15);
    }

    #[test]
    fn ex5_hat_recovers_ex1_hamiltonian() {
        let cs = match builtin("ex5-fl-hat").unwrap() {
            Model::ControlSystem(m) => m,
            _ => panic!("wrong kind"),
        };
        let h = builtin("ex1").unwrap().as_hamiltonian().unwrap();
        for &(x, p) in &[(1.5, 2.0), (2.0, -1.0), (0.5, 3.0), (2.0, 0.25)] {
            let sampled = cs.hamiltonian_sampled(0.0, x, p, 2001);
            let exact = h.eval(0.0, x, p);
            assert!(
                (sampled - exact).abs() < 2e-2,
                "x={x} p={p}: {sampled} vs {exact}"
            );
        }
    }

    #[test]
    fn ex5_check_recovers_ex4_hamiltonian() {
        let cs = match builtin("ex5-fl-check").unwrap() {
            Model::ControlSystem(m) => m,
            _ => panic!("wrong kind"),
        };
        let h = builtin("ex4").unwrap().as_hamiltonian().unwrap();
        for &(t, x, p) in &[(0.5, 1.5, 2.0), (0.25, 0.8, -3.0)] {
            let sampled = cs.hamiltonian_sampled(t, x, p, 2001);
            let exact = h.eval(t, x, p);
            assert!(
                (sampled - exact).abs() < 5e-2,
                "t={t} x={x} p={p}: {sampled} vs {exact}"
            );
        }
    }

    #[test]
    fn unknown_name_is_an_error() {
        assert!(matches!(builtin("nope"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn gamma_is_nonnegative_and_vanishes_at_origin() {
        assert_eq!(gamma(0.0, 0.0), 0.0);
        for &(t, x) in &[(0.1, 0.5), (0.5, -2.0), (1.0, 0.0), (0.01, 3.0)] {
            assert!(gamma(t, x) >= 0.0);
        }
    }
}
