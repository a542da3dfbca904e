//! Stack functions over a point after abelianization: the ring Λ̄ with basis
//! the classes `[G_m^k × K]`, its quotient Ω̄ at ℓ = 1, the weight operators
//! `Π^μ`, and `Υ' ∘ Π^μ` of a quotient `[X/G]` given by stratum data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coefficients::e_coeffs_gl_all;
use crate::error::{Error, Result};
use crate::groups::{q_lattice_gl, upsilon_group, GroupDesc};
use crate::ratfield::{parse_rational, rational_to_string, RatFunc, Rational};
use crate::subgroups::{AbelianGroupClass, SubgroupPoset, TorusSubgroup};

/// Largest `m` accepted by [`abelianize_bgl`].
pub const ABELIANIZE_LIMIT: usize = 6;
/// Largest `GL(m)` accepted by [`upsilon_pi_mu`].
pub const MODEL_GL_LIMIT: usize = 5;
/// Largest torus rank accepted by [`upsilon_pi_mu`].
pub const MODEL_TORUS_LIMIT: usize = 6;

/// Coefficient ring of a formal sum of classes.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_coeff() -> Self;
    fn is_zero_coeff(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    /// The value as a rational number, when it is one.
    fn as_rational(&self) -> Option<Rational>;
    /// Canonical string used in JSON.
    fn to_canonical(&self) -> String;
    fn from_canonical(s: &str) -> Result<Self>;
}

impl Coeff for RatFunc {
    fn zero_coeff() -> Self {
        RatFunc::zero()
    }
    fn is_zero_coeff(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, q: &Rational) -> Self {
        RatFunc::scale(self, q)
    }
    fn as_rational(&self) -> Option<Rational> {
        self.as_constant()
    }
    fn to_canonical(&self) -> String {
        self.to_string()
    }
    fn from_canonical(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl Coeff for Rational {
    fn zero_coeff() -> Self {
        Zero::zero()
    }
    fn is_zero_coeff(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn to_canonical(&self) -> String {
        rational_to_string(self)
    }
    fn from_canonical(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

/// Finite sum `Σ c_T [T]` over isomorphism classes `T = G_m^k × K`.
///
/// Zero coefficients are never stored, so `==` is equality of elements.
#[derive(Clone, PartialEq, Debug)]
pub struct FormalSum<C: Coeff> {
    terms: BTreeMap<AbelianGroupClass, C>,
}

/// Element of Λ̄.
pub type LambdaBarElem = FormalSum<RatFunc>;
/// Element of Ω̄.
pub type OmegaBarElem = FormalSum<Rational>;

impl<C: Coeff> Default for FormalSum<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> FormalSum<C> {
    pub fn zero() -> Self {
        FormalSum {
            terms: BTreeMap::new(),
        }
    }

    /// `c · [class]`.
    pub fn term(class: AbelianGroupClass, c: C) -> Self {
        let mut s = Self::zero();
        s.add_term(class, c);
        s
    }

    /// Sum of the given terms; repeated classes are combined.
    pub fn from_terms<I: IntoIterator<Item = (AbelianGroupClass, C)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    pub fn add_term(&mut self, class: AbelianGroupClass, c: C) {
        let sum = match self.terms.get(&class) {
            Some(old) => old.add(&c),
            None => c,
        };
        if sum.is_zero_coeff() {
            self.terms.remove(&class);
        } else {
            self.terms.insert(class, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, class: &AbelianGroupClass) -> C {
        self.terms.get(class).cloned().unwrap_or_else(C::zero_coeff)
    }

    /// Terms by class, largest class first.
    pub fn iter(&self) -> impl Iterator<Item = (&AbelianGroupClass, &C)> {
        self.terms.iter().rev()
    }

    pub fn classes(&self) -> impl Iterator<Item = &AbelianGroupClass> {
        self.terms.keys().rev()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (k, c) in &other.terms {
            s.add_term(k.clone(), c.clone());
        }
        s
    }

    /// Bilinear extension of `[T][T'] = [T × T']`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                s.add_term(a.product(b), x.mul(y));
            }
        }
        s
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (k.clone(), c.scale(q))))
    }

    /// Multiply each coefficient by a rational depending on its class.
    pub fn map_weights<F: Fn(&AbelianGroupClass) -> Rational>(&self, w: F) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (k.clone(), c.scale(&w(k)))))
    }
}

impl<C: Coeff> fmt::Display for FormalSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (class, c)) in self.iter().enumerate() {
            // Rational coefficients carry their sign into the separator;
            // other coefficients are parenthesized when compound.
            let (neg, body) = match c.as_rational() {
                Some(q) => (q.is_negative(), q.abs().to_string()),
                None => {
                    let s = c.to_canonical();
                    let compound = s.contains(' ') || s.contains('/');
                    (false, if compound { format!("({s})") } else { s })
                }
            };
            let sep = match (i, neg) {
                (0, false) => "",
                (0, true) => "\u{2212}",
                (_, false) => " + ",
                (_, true) => " \u{2212} ",
            };
            write!(f, "{sep}{body}·[{class}]")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    class: AbelianGroupClass,
    coeff: String,
}

impl<C: Coeff> Serialize for FormalSum<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<TermJson> = self
            .iter()
            .map(|(k, c)| TermJson {
                class: k.clone(),
                coeff: c.to_canonical(),
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de, C: Coeff> Deserialize<'de> for FormalSum<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<TermJson>::deserialize(d)?;
        let mut terms = Vec::with_capacity(rows.len());
        for r in rows {
            terms.push((
                r.class,
                C::from_canonical(&r.coeff).map_err(D::Error::custom)?,
            ));
        }
        Ok(Self::from_terms(terms))
    }
}

pub fn lbar_mul(a: &LambdaBarElem, b: &LambdaBarElem) -> LambdaBarElem {
    a.mul(b)
}

/// `[pt / GL(m)] = Σ_Q E(GL(m), T, Q) [G_m^{#blocks}]`.
pub fn abelianize_bgl(m: usize) -> Result<LambdaBarElem> {
    if m > ABELIANIZE_LIMIT {
        return Err(Error::TooLarge {
            what: "abelianization of BGL(m)",
            limit: ABELIANIZE_LIMIT,
            got: m,
        });
    }
    Ok(LambdaBarElem::from_terms(
        e_coeffs_gl_all(m)?
            .into_iter()
            .map(|(q, e)| (AbelianGroupClass::torus(q.num_blocks()), e)),
    ))
}

/// Coefficient-wise `π`: the generalized Euler characteristic.
pub fn gen_euler(x: &LambdaBarElem) -> Result<OmegaBarElem> {
    let mut out = Vec::with_capacity(x.len());
    for (k, c) in x.iter() {
        let v = c
            .pi_eval()
            .map_err(|_| Error::PoleAtOne(format!("coefficient {c} of [{k}]")))?;
        out.push((k.clone(), v));
    }
    Ok(OmegaBarElem::from_terms(out))
}

/// Weight function on isomorphism classes `G_m^k × K`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum WeightFn {
    ConstOne,
    /// `1` on classes of dimension `n`, else `0`.
    VirtualRank {
        n: usize,
    },
    /// `1` on exactly one class, else `0`.
    IsoIndicator {
        target: AbelianGroupClass,
    },
    /// Value from `classes` if listed, else from `ranks` by dimension, else
    /// `default`.
    Table {
        #[serde(with = "class_table")]
        classes: BTreeMap<AbelianGroupClass, Rational>,
        #[serde(with = "rank_table")]
        ranks: BTreeMap<usize, Rational>,
        #[serde(with = "rational_str")]
        default: Rational,
    },
}

impl WeightFn {
    pub fn eval(&self, c: &AbelianGroupClass) -> Rational {
        let one = || Rational::one();
        let zero = || Rational::zero();
        match self {
            WeightFn::ConstOne => one(),
            WeightFn::VirtualRank { n } => {
                if c.rank() == *n {
                    one()
                } else {
                    zero()
                }
            }
            WeightFn::IsoIndicator { target } => {
                if c == target {
                    one()
                } else {
                    zero()
                }
            }
            WeightFn::Table {
                classes,
                ranks,
                default,
            } => classes
                .get(c)
                .or_else(|| ranks.get(&c.rank()))
                .unwrap_or(default)
                .clone(),
        }
    }

    /// Value on every class of dimension `k` that is not listed by class.
    fn rank_level(&self, k: usize) -> Rational {
        match self {
            WeightFn::ConstOne => Rational::one(),
            WeightFn::VirtualRank { n } => {
                if k == *n {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            WeightFn::IsoIndicator { .. } => Rational::zero(),
            WeightFn::Table { ranks, default, .. } => ranks.get(&k).unwrap_or(default).clone(),
        }
    }

    fn listed_classes(&self) -> Vec<AbelianGroupClass> {
        match self {
            WeightFn::IsoIndicator { target } => vec![target.clone()],
            WeightFn::Table { classes, .. } => classes.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    fn listed_ranks(&self) -> Vec<usize> {
        match self {
            WeightFn::VirtualRank { n } => vec![*n],
            WeightFn::Table { ranks, .. } => ranks.keys().copied().collect(),
            _ => Vec::new(),
        }
    }

    fn default_value(&self) -> Rational {
        match self {
            WeightFn::ConstOne => Rational::one(),
            WeightFn::Table { default, .. } => default.clone(),
            _ => Rational::zero(),
        }
    }

    /// The same function as a `Table` with no redundant entries. Two weight
    /// functions agree on every class iff their canonical tables are equal.
    pub fn to_canonical_table(&self) -> WeightFn {
        let default = self.default_value();
        let ranks: BTreeMap<usize, Rational> = self
            .listed_ranks()
            .into_iter()
            .map(|k| (k, self.rank_level(k)))
            .filter(|(_, v)| *v != default)
            .collect();
        let classes = self
            .listed_classes()
            .into_iter()
            .map(|c| {
                let v = self.eval(&c);
                (c, v)
            })
            .filter(|(c, v)| *v != ranks.get(&c.rank()).unwrap_or(&default).clone())
            .collect();
        WeightFn::Table {
            classes,
            ranks,
            default,
        }
    }

    pub fn same_function(&self, other: &WeightFn) -> bool {
        self.to_canonical_table() == other.to_canonical_table()
    }
}

/// Pointwise product `μ₁μ₂`, as a canonical `Table`.
pub fn weight_mul(a: &WeightFn, b: &WeightFn) -> WeightFn {
    let classes: BTreeSet<AbelianGroupClass> = a
        .listed_classes()
        .into_iter()
        .chain(b.listed_classes())
        .collect();
    let ranks: BTreeSet<usize> = a
        .listed_ranks()
        .into_iter()
        .chain(b.listed_ranks())
        .collect();
    WeightFn::Table {
        classes: classes
            .into_iter()
            .map(|c| {
                let v = a.eval(&c) * b.eval(&c);
                (c, v)
            })
            .collect(),
        ranks: ranks
            .into_iter()
            .map(|k| (k, a.rank_level(k) * b.rank_level(k)))
            .collect(),
        default: a.default_value() * b.default_value(),
    }
    .to_canonical_table()
}

/// `Π^μ` on Λ̄: `c[T] ↦ μ(T) c[T]`.
pub fn pi_mu_lbar(mu: &WeightFn, x: &LambdaBarElem) -> LambdaBarElem {
    x.map_weights(|k| mu.eval(k))
}

/// `Π^vi_n = Π^{μ_n}`.
pub fn pi_vi(n: usize, x: &LambdaBarElem) -> LambdaBarElem {
    pi_mu_lbar(&WeightFn::VirtualRank { n }, x)
}

mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_to_string(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        parse_rational(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

mod class_table {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Row {
        class: AbelianGroupClass,
        #[serde(with = "rational_str")]
        value: Rational,
    }

    pub fn serialize<S: Serializer>(
        t: &BTreeMap<AbelianGroupClass, Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Row> = t
            .iter()
            .map(|(c, v)| Row {
                class: c.clone(),
                value: v.clone(),
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<AbelianGroupClass, Rational>, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?
            .into_iter()
            .map(|r| (r.class, r.value))
            .collect())
    }
}

mod rank_table {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Row {
        rank: usize,
        #[serde(with = "rational_str")]
        value: Rational,
    }

    pub fn serialize<S: Serializer>(
        t: &BTreeMap<usize, Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Row> = t
            .iter()
            .map(|(&rank, v)| Row {
                rank,
                value: v.clone(),
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<usize, Rational>, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?
            .into_iter()
            .map(|r| (r.rank, r.value))
            .collect())
    }
}

/// A `G`-variety `X` seen through its maximal-torus stabilizers: each
/// stratum is the locus of points whose stabilizer in `T` is exactly the
/// given subgroup, with its class `Υ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratifiedModel {
    ambient: usize,
    group: GroupDesc,
    strata: Vec<Stratum>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub stabilizer: TorusSubgroup,
    pub class: RatFunc,
}

impl StratifiedModel {
    /// `group` must be `GL(m)` or the split torus of rank `m`.
    pub fn new(group: GroupDesc, strata: Vec<(TorusSubgroup, RatFunc)>) -> Result<Self> {
        let ambient = match &group {
            GroupDesc::GeneralLinear(m) => *m,
            GroupDesc::Torus(c) if c.torsion().is_empty() && c.rank() > 0 => c.rank(),
            other => {
                return Err(Error::InvalidInput(format!(
                    "stratified models need GL(m) or a split torus, not {other}"
                )))
            }
        };
        let mut seen = BTreeSet::new();
        for (s, _) in &strata {
            if s.ambient_rank() != ambient {
                return Err(Error::AmbientMismatch {
                    left: ambient,
                    right: s.ambient_rank(),
                });
            }
            if !seen.insert(s.lattice().to_vec()) {
                return Err(Error::InvalidInput(format!("stabilizer {s} appears twice")));
            }
        }
        Ok(StratifiedModel {
            ambient,
            group,
            strata: strata
                .into_iter()
                .map(|(stabilizer, class)| Stratum { stabilizer, class })
                .collect(),
        })
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn group(&self) -> &GroupDesc {
        &self.group
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }
}

/// `Υ(X)`: the sum of the stratum classes.
pub fn model_total_upsilon(x: &StratifiedModel) -> RatFunc {
    x.strata.iter().map(|s| &s.class).sum()
}

/// Intersection closure of the realized stabilizers together with `T`.
pub fn p_lattice(x: &StratifiedModel) -> Result<SubgroupPoset> {
    let seed: Vec<TorusSubgroup> = x.strata.iter().map(|s| s.stabilizer.clone()).collect();
    SubgroupPoset::close(&seed, &TorusSubgroup::full(x.ambient))
}

/// `Υ' ∘ Π^μ([X/G]) = Σ_{P', Q'} Υ(X^{P'}_T) μ(P' ∩ Q') Υ(Q')^{-1} E(G, T, Q')`
/// with `P'` over the strata and `Q'` over the block tori of `G`.
pub fn upsilon_pi_mu(x: &StratifiedModel, mu: &WeightFn) -> Result<RatFunc> {
    let m = x.ambient;
    // (Q', Υ(Q')^{-1} E(G, T, Q'))
    let q_terms: Vec<(TorusSubgroup, RatFunc)> = match &x.group {
        GroupDesc::GeneralLinear(_) => {
            if m > MODEL_GL_LIMIT {
                return Err(Error::TooLarge {
                    what: "GL(m) model",
                    limit: MODEL_GL_LIMIT,
                    got: m,
                });
            }
            let lat = q_lattice_gl(m)?;
            e_coeffs_gl_all(m)?
                .into_iter()
                .map(|(q, e)| {
                    let i = lat.index_of(&q).expect("lattice is labelled by partitions");
                    let sub = lat.poset().element(i).clone();
                    let inv = upsilon_group(&GroupDesc::torus(q.num_blocks())).inv()?;
                    Ok((sub, &inv * &e))
                })
                .collect::<Result<_>>()?
        }
        _ => {
            if m > MODEL_TORUS_LIMIT {
                return Err(Error::TooLarge {
                    what: "torus model",
                    limit: MODEL_TORUS_LIMIT,
                    got: m,
                });
            }
            vec![(TorusSubgroup::full(m), upsilon_group(&x.group).inv()?)]
        }
    };
    let mut total = RatFunc::zero();
    for s in &x.strata {
        // Σ_{Q'} μ(P' ∩ Q') Υ(Q')^{-1} E(Q') for this stratum.
        let mut inner = RatFunc::zero();
        for (q, c) in &q_terms {
            let w = mu.eval(&s.stabilizer.intersect(q)?.iso_class());
            if !w.is_zero() {
                inner = &inner + &c.scale(&w);
            }
        }
        total = &total + &(&s.class * &inner);
    }
    Ok(total)
}

/// Strata whose stabilizer has dimension `n`; torus groups only.
pub fn pi_re_n(x: &StratifiedModel, n: usize) -> Result<StratifiedModel> {
    if !x.group.is_torus() {
        return Err(Error::NotAbelian);
    }
    Ok(StratifiedModel {
        ambient: x.ambient,
        group: x.group.clone(),
        strata: x
            .strata
            .iter()
            .filter(|s| s.stabilizer.dim() == n)
            .cloned()
            .collect(),
    })
}
