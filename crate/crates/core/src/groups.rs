//! The groups the calculator works with: tori, `GL(m)` and products of them,
//! together with the set-partition description of the block tori of `GL(m)`.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfield::{Polynomial, RatFunc, Rational};
use crate::subgroups::{AbelianGroupClass, SubgroupPoset, TorusSubgroup};

/// Largest `m` accepted by [`enumerate_partitions`].
pub const PARTITION_LIMIT: usize = 9;
/// Largest `m` accepted by [`q_lattice_gl`].
pub const Q_LATTICE_LIMIT: usize = 7;

/// Set partition of `{1, …, m}`.
///
/// Blocks are sorted internally and ordered by their least element, so the
/// representation is unique.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct SetPartition {
    m: usize,
    blocks: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<usize>>> for SetPartition {
    type Error = Error;
    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        SetPartition::new(blocks)
    }
}

impl From<SetPartition> for Vec<Vec<usize>> {
    fn from(p: SetPartition) -> Self {
        p.blocks
    }
}

impl SetPartition {
    /// Canonicalize arbitrary blocks; they must be nonempty, disjoint and
    /// cover `{1, …, m}` for some `m ≥ 1`.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidInput("empty block in set partition".into()));
            }
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        let m = all.len();
        if m == 0 || all.iter().enumerate().any(|(i, &x)| x != i + 1) {
            return Err(Error::InvalidInput(format!(
                "blocks {blocks:?} do not partition {{1..{m}}}"
            )));
        }
        Ok(SetPartition { m, blocks })
    }

    /// From a restricted growth string: `rgs[i]` is the block of `i + 1`.
    fn from_rgs(rgs: &[usize]) -> Self {
        let n = rgs.iter().max().map_or(0, |&x| x + 1);
        let mut blocks = vec![Vec::new(); n];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        SetPartition {
            m: rgs.len(),
            blocks,
        }
    }

    pub fn singletons(m: usize) -> Self {
        Self::from_rgs(&(0..m).collect::<Vec<_>>())
    }

    pub fn one_block(m: usize) -> Self {
        Self::from_rgs(&vec![0; m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block sizes, largest first.
    pub fn block_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Self) -> bool {
        self.m == other.m
            && self.blocks.iter().all(|b| {
                other
                    .blocks
                    .iter()
                    .any(|c| b.iter().all(|x| c.binary_search(x).is_ok()))
            })
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let items: Vec<String> = b.iter().map(usize::to_string).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// Torus, general linear group, or a product of these.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub enum GroupDesc {
    Torus(AbelianGroupClass),
    GeneralLinear(usize),
    /// Flattened, with at least two factors.
    Product(Vec<GroupDesc>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
enum GroupJson {
    Torus(AbelianGroupClass),
    GeneralLinear(usize),
    Product(Vec<GroupJson>),
}

impl TryFrom<GroupJson> for GroupDesc {
    type Error = Error;
    fn try_from(j: GroupJson) -> Result<Self> {
        match j {
            GroupJson::Torus(c) => Ok(GroupDesc::Torus(c)),
            GroupJson::GeneralLinear(m) => GroupDesc::gl(m),
            GroupJson::Product(fs) => GroupDesc::product(
                fs.into_iter()
                    .map(GroupDesc::try_from)
                    .collect::<Result<_>>()?,
            ),
        }
    }
}

impl From<GroupDesc> for GroupJson {
    fn from(g: GroupDesc) -> Self {
        match g {
            GroupDesc::Torus(c) => GroupJson::Torus(c),
            GroupDesc::GeneralLinear(m) => GroupJson::GeneralLinear(m),
            GroupDesc::Product(fs) => GroupJson::Product(fs.into_iter().map(Into::into).collect()),
        }
    }
}

impl GroupDesc {
    pub fn gl(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("GL(m) needs m ≥ 1".into()));
        }
        Ok(GroupDesc::GeneralLinear(m))
    }

    pub fn torus(rank: usize) -> Self {
        GroupDesc::Torus(AbelianGroupClass::torus(rank))
    }

    /// Product with nested products flattened; a single factor is returned
    /// as itself.
    pub fn product(factors: Vec<GroupDesc>) -> Result<Self> {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                GroupDesc::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Err(Error::InvalidInput("empty group product".into())),
            1 => Ok(flat.pop().expect("one factor")),
            _ => Ok(GroupDesc::Product(flat)),
        }
    }

    /// Rank of a maximal torus.
    pub fn rank(&self) -> usize {
        match self {
            GroupDesc::Torus(c) => c.rank(),
            GroupDesc::GeneralLinear(m) => *m,
            GroupDesc::Product(fs) => fs.iter().map(GroupDesc::rank).sum(),
        }
    }

    pub fn is_torus(&self) -> bool {
        match self {
            GroupDesc::Torus(_) => true,
            GroupDesc::GeneralLinear(_) => false,
            GroupDesc::Product(fs) => fs.iter().all(GroupDesc::is_torus),
        }
    }
}

impl fmt::Display for GroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDesc::Torus(c) => write!(f, "{c}"),
            GroupDesc::GeneralLinear(m) => write!(f, "GL({m})"),
            GroupDesc::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join("×"))
            }
        }
    }
}

/// `Υ(GL(m)) = ℓ^{m(m-1)/2} ∏_{k=1}^m (ℓ^k - 1)`.
pub fn upsilon_gl(m: usize) -> RatFunc {
    let mut p = Polynomial::monomial(
        Rational::from_integer(1.into()),
        m * (m.saturating_sub(1)) / 2,
    );
    for k in 1..=m {
        let mut c = vec![0i64; k + 1];
        c[0] = -1;
        c[k] = 1;
        p = &p * &Polynomial::from_ints(&c);
    }
    RatFunc::from_poly(p)
}

/// `Υ(G_m^k × K) = |K| (ℓ - 1)^k`.
pub fn upsilon_torus(c: &AbelianGroupClass) -> RatFunc {
    let lm1 = Polynomial::from_ints(&[-1, 1]);
    RatFunc::from_poly(
        lm1.pow(c.rank() as u32)
            .scale(&Rational::from_integer(c.torsion_order().into())),
    )
}

pub fn upsilon_group(g: &GroupDesc) -> RatFunc {
    match g {
        GroupDesc::Torus(c) => upsilon_torus(c),
        GroupDesc::GeneralLinear(m) => upsilon_gl(*m),
        GroupDesc::Product(fs) => fs.iter().map(upsilon_group).product(),
    }
}

/// All set partitions of `{1, …, m}`, in lexicographic order of restricted
/// growth strings (one block first, singletons last).
pub fn enumerate_partitions(m: usize) -> Result<Vec<SetPartition>> {
    if m == 0 {
        return Err(Error::InvalidInput("set partitions need m ≥ 1".into()));
    }
    if m > PARTITION_LIMIT {
        return Err(Error::TooLarge {
            what: "set partition enumeration",
            limit: PARTITION_LIMIT,
            got: m,
        });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; m];
    fn go(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        if i == rgs.len() {
            out.push(SetPartition::from_rgs(rgs));
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            go(i + 1, max.max(b), rgs, out);
        }
    }
    go(1, 0, &mut rgs, &mut out);
    Ok(out)
}

/// Block torus `{diag(q) : q_i = q_j whenever i, j share a block}`.
pub fn partition_to_subgroup(p: &SetPartition) -> TorusSubgroup {
    let m = p.m();
    let rows: Vec<Vec<i64>> = p
        .blocks()
        .iter()
        .flat_map(|b| b.windows(2))
        .map(|w| {
            let mut r = vec![0; m];
            r[w[0] - 1] = 1;
            r[w[1] - 1] = -1;
            r
        })
        .collect();
    TorusSubgroup::from_characters(m, &rows).expect("well-formed characters")
}

/// The block tori of `GL(m)` ordered by containment, with the partition that
/// labels each element.
#[derive(Clone, Debug)]
pub struct QLattice {
    partitions: Vec<SetPartition>,
    poset: SubgroupPoset,
}

impl QLattice {
    pub fn m(&self) -> usize {
        self.poset.ambient_rank()
    }

    pub fn partitions(&self) -> &[SetPartition] {
        &self.partitions
    }

    /// Element `i` of the poset is the block torus of `partitions()[i]`.
    pub fn poset(&self) -> &SubgroupPoset {
        &self.poset
    }

    pub fn index_of(&self, p: &SetPartition) -> Option<usize> {
        self.poset.index_of(&partition_to_subgroup(p))
    }
}

pub fn q_lattice_gl(m: usize) -> Result<QLattice> {
    if m > Q_LATTICE_LIMIT {
        return Err(Error::TooLarge {
            what: "Q-lattice of GL(m)",
            limit: Q_LATTICE_LIMIT,
            got: m,
        });
    }
    let partitions = enumerate_partitions(m)?;
    let elements: Vec<TorusSubgroup> = partitions.iter().map(partition_to_subgroup).collect();
    let top = partitions.len() - 1;
    // Block tori are closed under intersection: the meet is the block torus
    // of the join of the two partitions.
    let poset = SubgroupPoset::from_closed_family(elements, top);
    Ok(QLattice { partitions, poset })
}

/// `C_G(Q) = ∏_b GL(|b|)` for the block torus `Q` of `p`.
pub fn centralizer_gl(p: &SetPartition) -> GroupDesc {
    let factors = p
        .blocks()
        .iter()
        .map(|b| GroupDesc::GeneralLinear(b.len()))
        .collect();
    GroupDesc::product(factors).expect("partitions have a block")
}

/// `|N_G(T) / (C_G(Q) ∩ N_G(T))| = m! / ∏_b |b|!` for `G = GL(m)`.
pub fn weyl_index_gl(p: &SetPartition) -> BigUint {
    let fact = |n: usize| (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k);
    let den = p
        .blocks()
        .iter()
        .fold(BigUint::from(1u32), |acc, b| acc * fact(b.len()));
    fact(p.m()) / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn upsilon_examples() {
        assert_eq!(
            upsilon_group(&GroupDesc::GeneralLinear(1)),
            RatFunc::from_poly(Polynomial::from_ints(&[-1, 1]))
        );
        // ℓ(ℓ-1)(ℓ²-1) = ℓ⁴ - ℓ³ - ℓ² + ℓ
        assert_eq!(
            upsilon_group(&GroupDesc::GeneralLinear(2)),
            RatFunc::from_poly(Polynomial::from_ints(&[0, 1, -1, -1, 1]))
        );
        assert_eq!(
            upsilon_group(&GroupDesc::torus(2)),
            RatFunc::from_poly(Polynomial::from_ints(&[1, -2, 1]))
        );
        let twisted = GroupDesc::Torus(AbelianGroupClass::new(1, &[2, 3]).unwrap());
        assert_eq!(
            upsilon_group(&twisted),
            RatFunc::from_poly(Polynomial::from_ints(&[-6, 6]))
        );
    }

    #[test]
    fn partition_counts() {
        let bell = [1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for m in 1..=9 {
            assert_eq!(enumerate_partitions(m).unwrap().len(), bell[m - 1]);
        }
        assert!(matches!(
            enumerate_partitions(10),
            Err(Error::TooLarge { .. })
        ));
        let ps = enumerate_partitions(3).unwrap();
        assert_eq!(ps[0], SetPartition::one_block(3));
        assert_eq!(ps[4], SetPartition::singletons(3));
    }

    #[test]
    fn partition_canonical_form() {
        assert_eq!(part(&[&[3], &[2, 1]]).blocks(), &[vec![1, 2], vec![3]]);
        assert!(SetPartition::new(vec![vec![1], vec![3]]).is_err());
        assert!(SetPartition::new(vec![vec![1, 2], vec![2]]).is_err());
        let js = serde_json::to_string(&part(&[&[1, 2], &[3]])).unwrap();
        assert_eq!(js, "[[1,2],[3]]");
    }

    #[test]
    fn subgroup_examples() {
        assert_eq!(
            partition_to_subgroup(&SetPartition::singletons(4)),
            TorusSubgroup::full(4)
        );
        assert_eq!(
            partition_to_subgroup(&SetPartition::one_block(4)),
            TorusSubgroup::scalars(4)
        );
        assert_eq!(
            partition_to_subgroup(&SetPartition::one_block(4)).iso_class(),
            AbelianGroupClass::torus(1)
        );
        let s = partition_to_subgroup(&part(&[&[1, 2], &[3]]));
        assert_eq!(s.lattice(), &[vec![1, -1, 0]]);
        assert_eq!(s.iso_class(), AbelianGroupClass::torus(2));
    }

    #[test]
    fn q_lattice_examples() {
        assert_eq!(q_lattice_gl(2).unwrap().poset().len(), 2);
        let q = q_lattice_gl(3).unwrap();
        assert_eq!(q.poset().len(), 5);
        assert_eq!(q.poset().top_element(), &TorusSubgroup::full(3));
        let a = partition_to_subgroup(&part(&[&[1, 2], &[3]]));
        let b = partition_to_subgroup(&SetPartition::one_block(3));
        assert!(a.contains(&b).unwrap());
        assert!(matches!(q_lattice_gl(8), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn centralizer_examples() {
        let gl = GroupDesc::GeneralLinear;
        assert_eq!(
            centralizer_gl(&SetPartition::singletons(3)),
            GroupDesc::Product(vec![gl(1), gl(1), gl(1)])
        );
        assert_eq!(centralizer_gl(&SetPartition::one_block(3)), gl(3));
        assert_eq!(
            centralizer_gl(&part(&[&[1, 2], &[3]])),
            GroupDesc::Product(vec![gl(2), gl(1)])
        );
    }

    #[test]
    fn weyl_index_examples() {
        assert_eq!(
            weyl_index_gl(&SetPartition::singletons(4)),
            BigUint::from(24u32)
        );
        assert_eq!(
            weyl_index_gl(&SetPartition::one_block(4)),
            BigUint::from(1u32)
        );
        assert_eq!(weyl_index_gl(&part(&[&[1, 2], &[3]])), BigUint::from(3u32));
    }

    #[test]
    fn group_json() {
        let g = GroupDesc::product(vec![GroupDesc::GeneralLinear(2), GroupDesc::torus(1)]).unwrap();
        let js = serde_json::to_string(&g).unwrap();
        assert_eq!(
            js,
            r#"{"kind":"Product","value":[{"kind":"GeneralLinear","value":2},{"kind":"Torus","value":{"rank":1,"torsion":[]}}]}"#
        );
        assert_eq!(serde_json::from_str::<GroupDesc>(&js).unwrap(), g);
        assert!(
            serde_json::from_str::<GroupDesc>(r#"{"kind":"GeneralLinear","value":0}"#).is_err()
        );
        assert!(serde_json::from_str::<GroupDesc>(r#"{"kind":"Product","value":[]}"#).is_err());
    }
}
