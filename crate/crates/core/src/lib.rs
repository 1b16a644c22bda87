//! Decides whether one signed measure dominates another in (n+1)-convex
//! stochastic order, and applies the machinery to inequalities between
//! quadrature operators.
//!
//! The decision runs through the cascade `H_0 = F_2 - F_1`,
//! `H_k = int_a H_{k-1}`: the ordering holds exactly when every `H_k`
//! vanishes at the right endpoint and `(-1)^{n+1} H_n` is nonnegative on the
//! interior. Two exact engines implement this: a global-minimum check and a
//! sign-change/checkpoint procedure over the crossings of `H_{n-1}`. An
//! independent oracle evaluates candidate orderings directly against
//! truncated-power splines and monomials for cross-validation.
//!
//! With the default `parallel` feature, Monte Carlo corroboration and batch
//! verification fan out over rayon; results are identical to the sequential
//! fallback.

pub mod error;
pub mod instances;
pub mod jsonfmt;
pub mod measure;
pub mod oracle;
pub mod ordering;
pub mod piecewise;
pub mod quadrature;

mod par;
mod poly;

pub use error::{Error, Result};
pub use measure::{Atom, DensityPiece, MeasureSpec, SignedMeasure};
pub use ordering::{Decision, OrderingVerdict, Witness};
pub use piecewise::{PiecewisePolynomial, RootParity, SignChangeCatalogue};
pub use quadrature::QuadratureRule;

/// Default verdict tolerance; always applied relative to a per-function scale.
pub const DEFAULT_TOL: f64 = 1e-9;
