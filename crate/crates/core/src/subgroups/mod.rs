//! Closed subgroups of split tori, intersection-closed posets of them, and
//! their Möbius coefficients.

mod lattice;
mod poset;
mod subgroup;

pub use lattice::{hnf, in_row_span, snf_divisors, IntMatrix};
pub use poset::{SubgroupPoset, CROSSCUT_LIMIT};
pub use subgroup::{AbelianGroupClass, TorusSubgroup};

use crate::error::Result;

pub fn intersect(a: &TorusSubgroup, b: &TorusSubgroup) -> Result<TorusSubgroup> {
    a.intersect(b)
}

/// Whether `b ⊆ a`.
pub fn contains(a: &TorusSubgroup, b: &TorusSubgroup) -> Result<bool> {
    a.contains(b)
}

pub fn iso_class(a: &TorusSubgroup) -> AbelianGroupClass {
    a.iso_class()
}

pub fn poset_close(seed: &[TorusSubgroup], top: &TorusSubgroup) -> Result<SubgroupPoset> {
    SubgroupPoset::close(seed, top)
}

pub fn mobius(p: &SubgroupPoset, a: &TorusSubgroup, b: &TorusSubgroup) -> Result<i64> {
    p.mobius(a, b)
}

pub fn crosscut_coeff(
    p: &SubgroupPoset,
    lower: &TorusSubgroup,
    upper: &TorusSubgroup,
) -> Result<i64> {
    p.crosscut_coeff(lower, upper)
}
