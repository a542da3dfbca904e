use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lattice::{hnf, in_row_span, snf_divisors, IntMatrix};
use crate::error::{Error, Result};

/// Closed subgroup of the split torus `G_m^m`.
///
/// Stored as the lattice `L ⊆ ℤ^m` of characters that vanish on it, in
/// Hermite normal form. Bigger lattices are smaller subgroups: the full
/// torus has the empty lattice.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "SubgroupJson", into = "SubgroupJson")]
pub struct TorusSubgroup {
    ambient: usize,
    lattice: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct SubgroupJson {
    ambient: usize,
    lattice: IntMatrix,
}

impl TryFrom<SubgroupJson> for TorusSubgroup {
    type Error = Error;
    fn try_from(j: SubgroupJson) -> Result<Self> {
        TorusSubgroup::from_characters(j.ambient, &j.lattice)
    }
}

impl From<TorusSubgroup> for SubgroupJson {
    fn from(s: TorusSubgroup) -> Self {
        SubgroupJson {
            ambient: s.ambient,
            lattice: s.lattice,
        }
    }
}

impl TorusSubgroup {
    /// Subgroup cut out by the given characters (rows of exponents).
    pub fn from_characters(ambient: usize, chars: &[Vec<i64>]) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::InvalidInput("ambient rank must be positive".into()));
        }
        if let Some(bad) = chars.iter().find(|r| r.len() != ambient) {
            return Err(Error::InvalidInput(format!(
                "character {bad:?} has length {} but the ambient rank is {ambient}",
                bad.len()
            )));
        }
        Ok(TorusSubgroup {
            ambient,
            lattice: hnf(chars),
        })
    }

    /// The whole torus `G_m^m`.
    pub fn full(ambient: usize) -> Self {
        assert!(ambient > 0, "ambient rank must be positive");
        TorusSubgroup {
            ambient,
            lattice: Vec::new(),
        }
    }

    /// Scalar matrices `{t_1 = … = t_m}`.
    pub fn scalars(ambient: usize) -> Self {
        let rows: IntMatrix = (0..ambient.saturating_sub(1))
            .map(|i| {
                let mut r = vec![0; ambient];
                r[i] = 1;
                r[i + 1] = -1;
                r
            })
            .collect();
        Self::from_characters(ambient, &rows).expect("well-formed characters")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    /// Canonical character lattice rows.
    pub fn lattice(&self) -> &[Vec<i64>] {
        &self.lattice
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// `self ∩ other`, whose character lattice is the sum of the two.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let rows: IntMatrix = self.lattice.iter().chain(&other.lattice).cloned().collect();
        Ok(TorusSubgroup {
            ambient: self.ambient,
            lattice: hnf(&rows),
        })
    }

    /// Whether `other ⊆ self`, i.e. `L_self ⊆ L_other`.
    pub fn contains(&self, other: &Self) -> Result<bool> {
        self.check_ambient(other)?;
        Ok(self.lattice.len() <= other.lattice.len()
            && self
                .lattice
                .iter()
                .all(|row| in_row_span(&other.lattice, row)))
    }

    /// Dimension of the subgroup, `m - rank L`.
    pub fn dim(&self) -> usize {
        self.ambient - self.lattice.len()
    }

    /// Isomorphism class `G_m^k × K` with `K` the torsion of `ℤ^m / L`.
    pub fn iso_class(&self) -> AbelianGroupClass {
        let torsion = snf_divisors(&self.lattice)
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| d as u64)
            .collect();
        AbelianGroupClass {
            rank: self.dim(),
            torsion,
        }
    }
}

impl fmt::Display for TorusSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}{:?}", self.ambient, self.lattice)
    }
}

/// Isomorphism class of `G_m^k × K` for a finite abelian `K`.
///
/// `torsion` holds the invariant factors of `K`, each at least two and each
/// dividing the next.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "ClassJson", into = "ClassJson")]
pub struct AbelianGroupClass {
    rank: usize,
    torsion: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    rank: usize,
    torsion: Vec<u64>,
}

impl TryFrom<ClassJson> for AbelianGroupClass {
    type Error = Error;
    fn try_from(j: ClassJson) -> Result<Self> {
        let canon = AbelianGroupClass::new(j.rank, &j.torsion)?;
        if canon.torsion != j.torsion {
            return Err(Error::InvalidInput(format!(
                "torsion {:?} is not a divisibility chain of factors ≥ 2",
                j.torsion
            )));
        }
        Ok(canon)
    }
}

impl From<AbelianGroupClass> for ClassJson {
    fn from(c: AbelianGroupClass) -> Self {
        ClassJson {
            rank: c.rank,
            torsion: c.torsion,
        }
    }
}

impl AbelianGroupClass {
    /// `G_m^rank × ∏ ℤ/c` for arbitrary positive cyclic orders `c`.
    pub fn new(rank: usize, cyclic_orders: &[u64]) -> Result<Self> {
        if cyclic_orders.contains(&0) {
            return Err(Error::InvalidInput("cyclic factor of order 0".into()));
        }
        let n = cyclic_orders.len();
        let diag: IntMatrix = (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = i64::try_from(cyclic_orders[i])
                    .map_err(|_| Error::InvalidInput("cyclic order too large".into()))?;
                Ok(r)
            })
            .collect::<Result<_>>()?;
        let torsion = snf_divisors(&diag)
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| d as u64)
            .collect();
        Ok(AbelianGroupClass { rank, torsion })
    }

    pub fn torus(rank: usize) -> Self {
        AbelianGroupClass {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::torus(0)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[u64] {
        &self.torsion
    }

    /// `|K|`.
    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    /// Class of the product group.
    pub fn product(&self, other: &Self) -> Self {
        let orders: Vec<u64> = self.torsion.iter().chain(&other.torsion).copied().collect();
        Self::new(self.rank + other.rank, &orders).expect("invariant factors are positive")
    }
}

impl PartialOrd for AbelianGroupClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AbelianGroupClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rank, &self.torsion).cmp(&(other.rank, &other.torsion))
    }
}

impl fmt::Display for AbelianGroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Gm".to_string()),
            k => parts.push(format!("Gm^{k}")),
        }
        parts.extend(self.torsion.iter().map(|n| format!("Z/{n}")));
        if parts.is_empty() {
            f.write_str("{1}")
        } else {
            f.write_str(&parts.join("×"))
        }
    }
}
