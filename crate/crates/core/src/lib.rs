//! Tempered exponential measures and the geometry they induce.
//!
//! The crate is organised bottom-up:
//!
//! - [`talgebra`]: tempered logarithm/exponential and the `⊕_t`/`⊖_t` operators.
//! - [`temparam`]: discrete tempered measures on the co-simplex and their three dual
//!   parameterizations (minimal, unconstrained, constrained).
//! - [`tgeometry`]: tempered Funk and Hilbert distances on convex domains and on the
//!   co-simplex, the variation and normed-space isometries, coarse-graining and
//!   contraction checks, grid sampling of balls and bisectors.
//! - [`tcalculus`]: the tempered derivative, Riemann t-sums, t-lengths of curves and
//!   unit-speed t-geodesics.
//! - [`diffapprox`]: tempered log-sum-exp, differentiable distances and their gradients.
//! - [`embed`]: a harness embedding distance matrices into four geometries.
//! - [`hypmodels`]: tempered Klein and Poincaré disk models.
//! - [`cli`]: the `tempered` command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diffapprox;
pub mod embed;
pub mod error;
pub mod hypmodels;
pub mod talgebra;
pub mod tcalculus;
pub mod temparam;
pub mod tgeometry;

pub use error::{Error, Result};
pub use talgebra::{exp_t, log_t, t_add, t_neg, t_sub, Temperature};
pub use temparam::CoSimplexPoint;
