//! Exact and numeric verification of explicit invariant algebraic curves for
//! the planar Lotka-Volterra families
//!
//! ```text
//! x' = x(1 - x),   y' = y(n + b x - y)      (Family::MinusY)
//! x' = x(1 - x),   y' = y(n + b x + y)      (Family::PlusY)
//! ```
//!
//! The symbolic layer keeps `b` as an indeterminate, so every identity that is
//! checked here is checked in `Q[b][x, y]` and therefore holds for every value
//! of `b` in a field of characteristic zero. The numeric layer specializes `b`
//! and integrates trajectories to cross-check the symbolic results.

pub mod darboux;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod lvfamily;
pub mod poly2;

pub use error::{Error, Result};
pub use exact::{BPoly, BRat, Rat};
pub use lvfamily::Family;
pub use poly2::{Var, XYPoly};
