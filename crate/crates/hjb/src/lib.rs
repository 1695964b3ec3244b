//! Numerical toolkit for Hamilton-Jacobi-Bellman equations with convex
//! Hamiltonians in the gradient variable.
//!
//! The pieces fit together as the theory does:
//!
//! * [`extreal`] / [`grid`] — extended-real scalars and uniform-grid
//!   functions with an lsc-safe multilinear interpolant.
//! * [`transform`] — discrete Legendre-Fenchel conjugation between
//!   Hamiltonian and Lagrangian slices, H*(t,x,.) = L(t,x,.).
//! * [`models`] — the worked-example registry (Hamiltonians, Lagrangians,
//!   closed-form value functions) and sampled checkers for the optimality
//!   conditions (H1)-(H5), (L1)-(L6) and condition (A).
//! * [`geometry`] — epigraphs, the set-valued map Q(t,x), distances and
//!   projections, numerical subderivatives, Steiner points, and the
//!   fixed-point parametrization of Q.
//! * [`valuefn`] — backward dynamic programming for the value function,
//!   optimal-trajectory extraction, and lsc-solution verification.
//! * [`viability`] — the step-size lemma, the epsilon-approximate Euler
//!   broken-line builder, and invariance checking.
//! * [`reduction`] — representations (A,f,l) of H and the positively
//!   homogeneous reduction Hbar, with the Barron-Jensen counterexample
//!   diagnostic.
//! * [`io`] — GridFn CSV/JSON round-tripping (the untrusted-input surface).
//!
//! All types are immutable after construction and operations are pure.

pub mod error;
pub mod extreal;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod models;
pub mod reduction;
pub mod sampler;
pub mod transform;
pub mod valuefn;
pub mod viability;

pub use error::Error;
pub use extreal::ExtReal;
pub use grid::{Axis, Grid, GridFn};
