//! Self-check suites run by `motivic check`.
//!
//! Each suite walks a family of instances up to a size bound, records every
//! identity that fails, and reports how many instances it looked at.

use std::collections::BTreeMap;

use motivic_core::coefficients::{
    consistency_residual, e_recursion_residual, f_recursion_residual, ECoeffTable,
};
use motivic_core::groups::{q_lattice_gl, upsilon_gl, weyl_index_gl, GroupDesc, SetPartition};
use motivic_core::ratfield::{Polynomial, RatFunc, Rational};
use motivic_core::stackcalc::{
    gen_euler, model_total_upsilon, pi_mu_lbar, pi_vi, upsilon_pi_mu, weight_mul, LambdaBarElem,
    StratifiedModel, WeightFn,
};
use motivic_core::subgroups::{AbelianGroupClass, SubgroupPoset, TorusSubgroup};
use motivic_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const SUITES: &[&str] = &[
    "eff-recursion",
    "consistency",
    "mobius-crosscut",
    "operator-algebra",
    "model-pi1",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub max: usize,
    pub instances: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

struct Tally {
    instances: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            instances: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn guard(what: &'static str, limit: usize, got: usize) -> Result<()> {
    if got > limit {
        return Err(Error::TooLarge { what, limit, got });
    }
    if got == 0 {
        return Err(Error::InvalidInput("--max must be at least 1".into()));
    }
    Ok(())
}

pub fn run_suite(name: &str, max: usize) -> Result<SuiteReport> {
    let mut t = Tally::new();
    match name {
        "eff-recursion" => eff_recursion(max, &mut t)?,
        "consistency" => consistency(max, &mut t)?,
        "mobius-crosscut" => mobius_crosscut(max, &mut t)?,
        "operator-algebra" => operator_algebra(max, &mut t)?,
        "model-pi1" => model_pi1(max, &mut t)?,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite {other:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        max,
        passed: t.failures.is_empty() && t.instances > 0,
        instances: t.instances,
        failures: t.failures,
    })
}

fn eff_recursion(max: usize, t: &mut Tally) -> Result<()> {
    guard("eff-recursion bound", 6, max)?;
    let table = ECoeffTable::build(max + 1)?;
    for m in 1..=max {
        let r = e_recursion_residual(m, &table)?;
        t.check(r.is_zero(), || {
            format!("E recursion at m = {m}: residual {r}")
        });
        let r = f_recursion_residual(m, &table)?;
        t.check(r == Rational::from_integer(0.into()), || {
            format!("F recursion at m = {m}: residual {r}")
        });
    }
    Ok(())
}

fn consistency(max: usize, t: &mut Tally) -> Result<()> {
    guard("consistency bound", 6, max)?;
    for m in 1..=max {
        let r = consistency_residual(m)?;
        t.check(r.is_zero(), || format!("m = {m}: residual {r}"));
    }
    Ok(())
}

/// Every comparable pair of `p`, skipping upper elements whose down-set is
/// too large for the subset sum.
pub fn compare_mobius_crosscut(p: &SubgroupPoset) -> Vec<(usize, usize, i64, i64)> {
    let mut out = Vec::new();
    for up in 0..p.len() {
        if p.below(up).len() > motivic_core::subgroups::CROSSCUT_LIMIT {
            continue;
        }
        for lo in p.below(up) {
            let c = p.crosscut_idx(lo, up).expect("down-set within the guard");
            out.push((lo, up, p.mobius_idx(lo, up), c));
        }
    }
    out
}

/// Random subgroup of `G_m^r` cut out by up to `r` characters with small
/// entries.
pub fn random_subgroup(rng: &mut impl Rng, r: usize) -> TorusSubgroup {
    let rows = rng.gen_range(0..=r);
    let chars: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..r).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    TorusSubgroup::from_characters(r, &chars).expect("well-formed characters")
}

/// Closed poset with at most `cap` elements from random seeds. Posets with
/// fewer than three elements are redrawn unless `cap` forces them.
pub fn random_poset(rng: &mut impl Rng, cap: usize) -> SubgroupPoset {
    let floor = cap.min(3);
    loop {
        let r = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=6);
        let seed: Vec<TorusSubgroup> = (0..k).map(|_| random_subgroup(rng, r)).collect();
        let p = SubgroupPoset::close(&seed, &TorusSubgroup::full(r))
            .expect("seed lies in the full torus");
        if p.len() <= cap && p.len() >= floor {
            return p;
        }
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn mobius_crosscut(max: usize, t: &mut Tally) -> Result<()> {
    guard("mobius-crosscut bound", 5, max)?;
    for m in 1..=max {
        let lat = q_lattice_gl(m)?;
        let p = lat.poset();
        let top = p.top_element().clone();
        let bottom = TorusSubgroup::scalars(m);
        let corner = p.mobius(&bottom, &top)?;
        let expect = if m % 2 == 1 { 1 } else { -1 } * factorial(m - 1);
        t.check(corner == expect, || {
            format!("partition lattice m = {m}: μ(bottom, top) = {corner}, expected {expect}")
        });
        if m <= 4 {
            for (lo, up, mu, c) in compare_mobius_crosscut(p) {
                t.check(mu == c, || {
                    format!("partition lattice m = {m}: pair ({lo}, {up}) μ = {mu}, crosscut = {c}")
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for i in 0..40 * max {
        let p = random_poset(&mut rng, 12);
        for (lo, up, mu, c) in compare_mobius_crosscut(&p) {
            t.check(mu == c, || {
                format!("random poset {i}: pair ({lo}, {up}) μ = {mu}, crosscut = {c}")
            });
        }
    }
    Ok(())
}

pub fn random_class(rng: &mut impl Rng, max_rank: usize) -> AbelianGroupClass {
    let rank = rng.gen_range(0..=max_rank);
    let torsion: Vec<u64> = (0..rng.gen_range(0..=1))
        .map(|_| rng.gen_range(2..=4))
        .collect();
    AbelianGroupClass::new(rank, &torsion).expect("positive orders")
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into())
}

pub fn random_coeff(rng: &mut impl Rng) -> RatFunc {
    let poly = |rng: &mut ChaCha8Rng| {
        let deg = rng.gen_range(0..=2);
        Polynomial::from_ints(
            &(0..=deg)
                .map(|_| rng.gen_range(-3..=3))
                .collect::<Vec<i64>>(),
        )
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let num = poly(&mut local);
    let den = match local.gen_range(0..3) {
        0 => Polynomial::one(),
        1 => Polynomial::from_ints(&[-1, 1]),
        _ => Polynomial::from_ints(&[0, 1, 1]),
    };
    RatFunc::new(num, den).expect("nonzero denominator")
}

pub fn random_lbar(rng: &mut impl Rng, max_rank: usize) -> LambdaBarElem {
    let n = rng.gen_range(0..=4);
    LambdaBarElem::from_terms((0..n).map(|_| (random_class(rng, max_rank), random_coeff(rng))))
}

pub fn random_weight(rng: &mut impl Rng, max_rank: usize) -> WeightFn {
    match rng.gen_range(0..4) {
        0 => WeightFn::ConstOne,
        1 => WeightFn::VirtualRank {
            n: rng.gen_range(0..=max_rank),
        },
        2 => WeightFn::IsoIndicator {
            target: random_class(rng, max_rank),
        },
        _ => {
            let classes: BTreeMap<_, _> = (0..rng.gen_range(0..=3))
                .map(|_| (random_class(rng, max_rank), random_rational(rng)))
                .collect();
            let ranks: BTreeMap<_, _> = (0..rng.gen_range(0..=2))
                .map(|_| (rng.gen_range(0..=max_rank), random_rational(rng)))
                .collect();
            WeightFn::Table {
                classes,
                ranks,
                default: random_rational(rng),
            }
        }
    }
}

/// Largest torus rank appearing in `x`.
fn max_rank(x: &LambdaBarElem) -> usize {
    x.classes().map(AbelianGroupClass::rank).max().unwrap_or(0)
}

/// All operator identities on one random instance.
pub fn operator_identities(
    x: &LambdaBarElem,
    y: &LambdaBarElem,
    mu1: &WeightFn,
    mu2: &WeightFn,
) -> Vec<String> {
    let mut bad = Vec::new();
    if pi_mu_lbar(&WeightFn::ConstOne, x) != *x {
        bad.push(format!("Π^1 is not the identity on {x}"));
    }
    let prod = weight_mul(mu1, mu2);
    if pi_mu_lbar(mu1, &pi_mu_lbar(mu2, x)) != pi_mu_lbar(&prod, x) {
        bad.push(format!("Π^μ1 Π^μ2 ≠ Π^(μ1μ2) on {x}"));
    }
    if pi_mu_lbar(mu2, &pi_mu_lbar(mu1, x)) != pi_mu_lbar(&prod, x) {
        bad.push(format!("Π^μ2 Π^μ1 ≠ Π^(μ1μ2) on {x}"));
    }
    let top = max_rank(x);
    let mut sum = LambdaBarElem::zero();
    for n in 0..=top {
        let p = pi_vi(n, x);
        if pi_vi(n, &p) != p {
            bad.push(format!("Π^vi_{n} is not idempotent on {x}"));
        }
        for k in 0..=top {
            if k != n && !pi_vi(k, &p).is_zero() {
                bad.push(format!("Π^vi_{k} Π^vi_{n} ≠ 0 on {x}"));
            }
        }
        sum = sum.add(&p);
    }
    if sum != *x {
        bad.push(format!("Σ Π^vi_n ≠ id on {x}"));
    }
    let xy = x.mul(y);
    for n in 0..=top + max_rank(y) {
        let mut conv = LambdaBarElem::zero();
        for j in 0..=n {
            conv = conv.add(&pi_vi(j, x).mul(&pi_vi(n - j, y)));
        }
        if pi_vi(n, &xy) != conv {
            bad.push(format!(
                "Π^vi_{n}(xy) ≠ Σ Π^vi_j(x) Π^vi_(n-j)(y) for x = {x}, y = {y}"
            ));
        }
    }
    if let (Ok(ex), Ok(ey)) = (gen_euler(x), gen_euler(y)) {
        if let Ok(exy) = gen_euler(&xy) {
            if exy != ex.mul(&ey) {
                bad.push(format!(
                    "generalized Euler characteristic is not multiplicative on {x}, {y}"
                ));
            }
        }
    }
    bad
}

fn operator_algebra(max: usize, t: &mut Tally) -> Result<()> {
    guard("operator-algebra bound", 6, max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for i in 0..100 * max {
        let x = random_lbar(&mut rng, max);
        let y = random_lbar(&mut rng, max);
        let mu1 = random_weight(&mut rng, max);
        let mu2 = random_weight(&mut rng, max);
        let bad = operator_identities(&x, &y, &mu1, &mu2);
        t.check(bad.is_empty(), || {
            format!("instance {i}: {}", bad.join("; "))
        });
    }
    Ok(())
}

/// Turn `Υ(X^Q)` for every block torus `Q` into exact strata by Möbius
/// inversion over the partition lattice.
fn exact_strata_from_fixed_loci(
    m: usize,
    fixed: impl Fn(&SetPartition) -> RatFunc,
) -> Result<StratifiedModel> {
    let lat = q_lattice_gl(m)?;
    let p = lat.poset();
    let fixed: Vec<RatFunc> = lat.partitions().iter().map(&fixed).collect();
    let mut strata = Vec::new();
    for i in 0..p.len() {
        let mut cls = RatFunc::zero();
        for j in p.above(i) {
            let mu = p.mobius_idx(i, j);
            if mu != 0 {
                cls = &cls + &fixed[j].scale(&Rational::from_integer(mu.into()));
            }
        }
        if !cls.is_zero() {
            strata.push((p.element(i).clone(), cls));
        }
    }
    StratifiedModel::new(GroupDesc::GeneralLinear(m), strata)
}

/// `GL(m)/T`: the fixed locus of a block torus `Q` is
/// `W / W_{C(Q)} × C_G(Q)/T`.
pub fn flag_model(m: usize) -> Result<StratifiedModel> {
    let lm1 = RatFunc::ell_pow_minus_one(1);
    exact_strata_from_fixed_loci(m, |q| {
        let w = Rational::from_integer(weyl_index_gl(q).into());
        let c: RatFunc = q.blocks().iter().map(|b| upsilon_gl(b.len())).product();
        (&c * &lm1.pow(-(m as i32)).expect("nonzero")).scale(&w)
    })
}

/// `GL(m)/(GL(m-1) × GL(1))`, the space of splittings `V = H ⊕ L`: the
/// fixed locus of a block torus is a disjoint union over its blocks.
pub fn levi_model(m: usize) -> Result<StratifiedModel> {
    let lm1 = RatFunc::ell_pow_minus_one(1);
    exact_strata_from_fixed_loci(m, |q| {
        q.blocks()
            .iter()
            .map(|b| {
                let k = b.len();
                upsilon_gl(k)
                    .checked_div(&(&upsilon_gl(k - 1) * &lm1))
                    .expect("nonzero")
            })
            .sum()
    })
}

/// A point with trivial action.
pub fn point_model(m: usize) -> Result<StratifiedModel> {
    StratifiedModel::new(
        GroupDesc::GeneralLinear(m),
        vec![(TorusSubgroup::full(m), RatFunc::one())],
    )
}

/// `G_m^r` scaling the coordinates of `A^r`.
pub fn coordinate_torus_model(r: usize) -> Result<StratifiedModel> {
    let lm1 = RatFunc::ell_pow_minus_one(1);
    let mut strata = Vec::new();
    for mask in 0u32..(1 << r) {
        let chars: Vec<Vec<i64>> = (0..r)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| {
                let mut row = vec![0; r];
                row[i] = 1;
                row
            })
            .collect();
        let s = TorusSubgroup::from_characters(r, &chars)?;
        strata.push((s, lm1.pow(mask.count_ones() as i32)?));
    }
    StratifiedModel::new(GroupDesc::torus(r), strata)
}

fn model_pi1(max: usize, t: &mut Tally) -> Result<()> {
    guard("model-pi1 bound", 5, max)?;
    for m in 1..=max.min(4) {
        for (name, x) in [
            ("flag", flag_model(m)?),
            ("levi", levi_model(m)?),
            ("point", point_model(m)?),
        ] {
            let all = upsilon_pi_mu(&x, &WeightFn::ConstOne)?;
            let expect = model_total_upsilon(&x).checked_div(&upsilon_gl(m))?;
            t.check(all == expect, || {
                format!("{name} model m = {m}: Π^1 gives {all}, expected {expect}")
            });
            let split: RatFunc = (0..=m)
                .map(|n| upsilon_pi_mu(&x, &WeightFn::VirtualRank { n }))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum();
            t.check(split == all, || {
                format!("{name} model m = {m}: Σ Π^vi_n ≠ Π^1")
            });
        }
    }
    for r in 1..=max {
        let x = coordinate_torus_model(r)?;
        let all = upsilon_pi_mu(&x, &WeightFn::ConstOne)?;
        let expect =
            model_total_upsilon(&x).checked_div(&RatFunc::ell_pow_minus_one(1).pow(r as i32)?)?;
        t.check(all == expect, || {
            format!("torus model r = {r}: Π^1 gives {all}, expected {expect}")
        });
    }
    Ok(())
}
