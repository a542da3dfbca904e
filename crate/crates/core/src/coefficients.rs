//! The `E`/`F` coefficients of `GL(m)` and the `M` coefficients built from
//! two Möbius functions, plus residuals of the identities they satisfy.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::groups::{q_lattice_gl, upsilon_gl, weyl_index_gl, QLattice, SetPartition};
use crate::ratfield::{RatFunc, Rational};
use crate::subgroups::{SubgroupPoset, TorusSubgroup};

/// Largest `m` for which the recursion residuals are evaluated.
pub const RECURSION_LIMIT: usize = 8;
/// Largest `m` accepted by [`consistency_residual`].
pub const CONSISTENCY_LIMIT: usize = 6;

/// Scalar coefficients `E(m) = E(GL(m), T, scalars)` and `F(m) = π(E(m))`
/// for `1 ≤ m ≤ max_m`.
#[derive(Clone, Debug)]
pub struct ECoeffTable {
    max_m: usize,
    scalar_e: BTreeMap<usize, RatFunc>,
    scalar_f: BTreeMap<usize, Rational>,
}

impl ECoeffTable {
    /// Fill the table by increasing `m`, each entry from the direct
    /// lattice sum.
    pub fn build(max_m: usize) -> Result<Self> {
        let mut scalar_e = BTreeMap::new();
        let mut scalar_f = BTreeMap::new();
        for m in 1..=max_m {
            let e = e_coeff_gl(m, &SetPartition::one_block(m))?;
            scalar_f.insert(m, e.pi_eval()?);
            scalar_e.insert(m, e);
        }
        Ok(ECoeffTable {
            max_m,
            scalar_e,
            scalar_f,
        })
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    pub fn e(&self, m: usize) -> Result<&RatFunc> {
        self.scalar_e.get(&m).ok_or_else(|| missing(m))
    }

    pub fn f(&self, m: usize) -> Result<&Rational> {
        self.scalar_f.get(&m).ok_or_else(|| missing(m))
    }
}

fn missing(m: usize) -> Error {
    Error::InvalidInput(format!("E({m}) is not in the coefficient table"))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `E` for every element of an already built lattice.
struct ESummer<'a> {
    lat: &'a QLattice,
    /// `1 / Υ(C_G(Q'))` keyed by the block type of `Q'`.
    inv_centralizer: HashMap<Vec<usize>, RatFunc>,
}

impl<'a> ESummer<'a> {
    fn new(lat: &'a QLattice) -> Self {
        ESummer {
            lat,
            inv_centralizer: HashMap::new(),
        }
    }

    fn e(&mut self, qi: usize) -> Result<RatFunc> {
        let poset = self.lat.poset();
        let parts = self.lat.partitions();
        // Σ μ(Q, Q') / weyl(Q') collected by the block type of Q', so the
        // rational-function work is one product per type.
        let mut by_type: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for qj in poset.above(qi) {
            let mu = poset.mobius_idx(qi, qj);
            if mu == 0 {
                continue;
            }
            let w = Rational::new(BigInt::from(mu), BigInt::from(weyl_index_gl(&parts[qj])));
            *by_type
                .entry(parts[qj].block_type())
                .or_insert_with(Rational::zero) += w;
        }
        let mut sum = RatFunc::zero();
        for (ty, c) in by_type {
            if c.is_zero() {
                continue;
            }
            let inv = match self.inv_centralizer.get(&ty) {
                Some(v) => v.clone(),
                None => {
                    let v = ty
                        .iter()
                        .map(|&k| upsilon_gl(k))
                        .product::<RatFunc>()
                        .inv()?;
                    self.inv_centralizer.insert(ty.clone(), v.clone());
                    v
                }
            };
            sum = &sum + &inv.scale(&c);
        }
        let q = &parts[qi];
        let upsilon_q = RatFunc::ell_pow_minus_one(1).pow(q.num_blocks() as i32)?;
        let e = &upsilon_q * &sum;
        if !e.in_lambda_circ() {
            return Err(Error::InternalInvariant(format!(
                "E(GL({}), T, {q}) = {e} has a pole at l = 1",
                q.m()
            )));
        }
        Ok(e)
    }
}

/// `E(GL(m), T, Q)` for the block torus `Q` of `q`, from the direct sum
/// `Υ(Q) Σ_{Q' ⊇ Q} μ(Q, Q') / (weyl(Q') Υ(C_G(Q')))`.
pub fn e_coeff_gl(m: usize, q: &SetPartition) -> Result<RatFunc> {
    check_partition(m, q)?;
    let lat = q_lattice_gl(m)?;
    let qi = lat.index_of(q).expect("every partition labels an element");
    ESummer::new(&lat).e(qi)
}

/// `E(GL(m), T, Q)` for every partition of `m`, sharing one lattice.
pub fn e_coeffs_gl_all(m: usize) -> Result<Vec<(SetPartition, RatFunc)>> {
    let lat = q_lattice_gl(m)?;
    let mut summer = ESummer::new(&lat);
    (0..lat.partitions().len())
        .map(|i| Ok((lat.partitions()[i].clone(), summer.e(i)?)))
        .collect()
}

fn check_partition(m: usize, q: &SetPartition) -> Result<()> {
    if q.m() != m {
        return Err(Error::InvalidInput(format!(
            "{q} is not a partition of {{1..{m}}}"
        )));
    }
    Ok(())
}

/// `(1/m!) ∏_b |b|! E(|b|)` with the scalar values taken from `table`.
pub fn e_product_formula(m: usize, q: &SetPartition, table: &ECoeffTable) -> Result<RatFunc> {
    check_partition(m, q)?;
    let mut out = RatFunc::constant(Rational::new(BigInt::one(), factorial(m)));
    for b in q.blocks() {
        let k = b.len();
        out = &out * &table.e(k)?.scale(&Rational::from_integer(factorial(k)));
    }
    Ok(out)
}

/// `F(GL(m), T, Q) = π(E(GL(m), T, Q))`.
pub fn f_coeff_gl(m: usize, q: &SetPartition) -> Result<Rational> {
    e_coeff_gl(m, q)?.pi_eval()
}

/// Ordered compositions of `n` into positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn check_recursion(m: usize, table: &ECoeffTable) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidInput("recursion residual needs m ≥ 1".into()));
    }
    if m > RECURSION_LIMIT {
        return Err(Error::TooLarge {
            what: "composition sum",
            limit: RECURSION_LIMIT,
            got: m,
        });
    }
    if table.max_m() < m + 1 {
        return Err(missing(m + 1));
    }
    Ok(())
}

/// `(sign(n)/n!, (m_1, …, m_n))` for every ordered composition of `total`;
/// the sign is `(-1)^n` when `alternating`.
fn weighted_compositions(total: usize, alternating: bool) -> Vec<(Rational, Vec<usize>)> {
    compositions(total)
        .into_iter()
        .map(|c| {
            let n = c.len();
            let sign = if alternating && n % 2 == 1 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            (Rational::new(sign, factorial(n)), c)
        })
        .collect()
}

/// Left side minus right side of the `E` recursion obtained from the two
/// presentations of `[P^m / GL(m+1)]`.
pub fn e_recursion_residual(m: usize, table: &ECoeffTable) -> Result<RatFunc> {
    check_recursion(m, table)?;
    let term = |k: usize| -> RatFunc {
        // (ℓ^k - 1)/(ℓ - 1) · E(k)
        let q = RatFunc::ell_pow_minus_one(k)
            .checked_div(&RatFunc::ell_pow_minus_one(1))
            .expect("ℓ - 1 is nonzero");
        &q * table.e(k).expect("checked above")
    };
    let side = |total: usize, alternating: bool| -> RatFunc {
        weighted_compositions(total, alternating)
            .into_iter()
            .map(|(w, c)| c.iter().map(|&k| term(k)).product::<RatFunc>().scale(&w))
            .sum()
    };
    let lhs = side(m + 1, false);
    let rhs = &side(m, true) * &RatFunc::ell().pow(-(m as i32))?;
    Ok(&lhs - &rhs)
}

/// The same identity after `π`: factors `m_k F(m_k)` and no power of `ℓ`.
pub fn f_recursion_residual(m: usize, table: &ECoeffTable) -> Result<Rational> {
    check_recursion(m, table)?;
    let term = |k: usize| -> Rational {
        Rational::from_integer(k.into()) * table.f(k).expect("checked above")
    };
    let side = |total: usize, alternating: bool| -> Rational {
        weighted_compositions(total, alternating)
            .into_iter()
            .map(|(w, c)| c.iter().map(|&k| term(k)).product::<Rational>() * w)
            .sum()
    };
    let lhs = side(m + 1, false);
    let rhs = side(m, true);
    Ok(lhs - rhs)
}

/// `Υ(GL(m))^{-1} - Σ_Q Υ(Q)^{-1} E(GL(m), T, Q)`.
pub fn consistency_residual(m: usize) -> Result<RatFunc> {
    if m > CONSISTENCY_LIMIT {
        return Err(Error::TooLarge {
            what: "consistency sum",
            limit: CONSISTENCY_LIMIT,
            got: m,
        });
    }
    let lm1 = RatFunc::ell_pow_minus_one(1);
    let mut sum = RatFunc::zero();
    for (q, e) in e_coeffs_gl_all(m)? {
        sum = &sum + &(&e * &lm1.pow(-(q.num_blocks() as i32))?);
    }
    Ok(&upsilon_gl(m).inv()? - &sum)
}

/// `weyl_inverse · Σ μ_P(P', P) μ_Q(Q', Q)` over `P' ⊆ P` in `p_poset` and
/// `Q' ⊆ Q` in `q_poset` with `P' ∩ Q' = R`.
#[allow(clippy::too_many_arguments)]
pub fn m_big_coeff(
    p_poset: &SubgroupPoset,
    q_poset: &SubgroupPoset,
    r_poset: &SubgroupPoset,
    p: &TorusSubgroup,
    q: &TorusSubgroup,
    r: &TorusSubgroup,
    weyl_inverse: &Rational,
) -> Result<Rational> {
    let pi = p_poset.index_of(p).ok_or(Error::NotInPoset)?;
    let qi = q_poset.index_of(q).ok_or(Error::NotInPoset)?;
    r_poset.index_of(r).ok_or(Error::NotInPoset)?;
    if !p.intersect(q)?.contains(r)? {
        return Err(Error::InvalidInput(format!(
            "{r} is not contained in P ∩ Q"
        )));
    }
    let mut total: i64 = 0;
    for pj in p_poset.below(pi) {
        let mp = p_poset.mobius_idx(pj, pi);
        if mp == 0 || !p_poset.element(pj).contains(r)? {
            continue;
        }
        for qj in q_poset.below(qi) {
            let mq = q_poset.mobius_idx(qj, qi);
            if mq == 0 {
                continue;
            }
            if &p_poset.element(pj).intersect(q_poset.element(qj))? == r {
                total += mp * mq;
            }
        }
    }
    Ok(weyl_inverse * Rational::from_integer(total.into()))
}

/// `1 / weyl_index_gl(q)` as an exact rational.
pub fn weyl_inverse_gl(q: &SetPartition) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(weyl_index_gl(q)))
}

/// All partitions of `m` with their `F` values.
pub fn f_coeffs_gl_all(m: usize) -> Result<Vec<(SetPartition, Rational)>> {
    e_coeffs_gl_all(m)?
        .into_iter()
        .map(|(q, e)| Ok((q, e.pi_eval()?)))
        .collect()
}
