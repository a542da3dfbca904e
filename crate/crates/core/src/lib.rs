//! Exact motivic invariants of quotient stacks.
//!
//! The crate works in the field Λ = ℚ(ℓ) of rational functions in the class
//! ℓ of the affine line. On top of it sit closed subgroups of split tori
//! (as integer character lattices), the partition lattices that index the
//! block tori of `GL(m)`, the `E`/`F` coefficients that rewrite a `GL(m)`
//! quotient as a combination of torus quotients, and the abelianized
//! stack-function ring over a point together with its weight operators.

pub mod coefficients;
pub mod error;
pub mod groups;
pub mod ratfield;
pub mod stackcalc;
pub mod subgroups;

pub use error::{Error, Result};
