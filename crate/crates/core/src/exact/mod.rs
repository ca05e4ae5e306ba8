//! Exact scalars and coefficient rings: `Q`, `Q[b]` and `Q(b)`.

mod bpoly;
mod brat;
mod rat;

pub use bpoly::{pochhammer, BPoly};
pub use brat::BRat;
pub use rat::{factorial, lemma1_residual, pochhammer_rat, Rat};
