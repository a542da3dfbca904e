//! Acceptance run: one PASS/FAIL line per criterion, each under its time
//! budget. Runs without the libtest harness so the lines always print.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use motivic_cli::expr::{eval_class, parse, render, ParseError};
use motivic_cli::suites::{operator_identities, random_lbar, random_poset, random_weight};
use motivic_core::coefficients::{
    consistency_residual, e_coeff_gl, e_coeffs_gl_all, e_product_formula, e_recursion_residual,
    f_recursion_residual, m_big_coeff, weyl_inverse_gl, ECoeffTable,
};
use motivic_core::groups::{q_lattice_gl, upsilon_gl, GroupDesc, SetPartition};
use motivic_core::ratfield::{Polynomial, RatFunc, Rational};
use motivic_core::stackcalc::{
    model_total_upsilon, pi_mu_lbar, upsilon_pi_mu, weight_mul, StratifiedModel, WeightFn,
};
use motivic_core::subgroups::{AbelianGroupClass, SubgroupPoset, TorusSubgroup};
use motivic_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn poly(c: &[i64]) -> RatFunc {
    RatFunc::from_poly(Polynomial::from_ints(c))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn ell() -> RatFunc {
    RatFunc::ell()
}

fn lm1() -> RatFunc {
    poly(&[-1, 1])
}

fn inv(x: &RatFunc) -> RatFunc {
    x.inv().expect("nonzero")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motivic"))
}

// Coefficients of ℓ^{m(m-1)/2} ∏ (ℓ^k - 1), multiplied out over i128.
fn gl_class_coeffs(m: usize) -> Vec<i128> {
    let mut c = vec![0i128; m * (m - 1) / 2 + 1];
    c[m * (m - 1) / 2] = 1;
    for k in 1..=m {
        let mut next = vec![0i128; c.len() + k];
        for (i, a) in c.iter().enumerate() {
            next[i + k] += a;
            next[i] -= a;
        }
        c = next;
    }
    c
}

fn c1_upsilon_gl() -> Check {
    for m in 1..=8 {
        let want = gl_class_coeffs(m);
        let got = upsilon_gl(m);
        ensure!(
            got.denominator().is_one(),
            "Υ(GL({m})) is not a polynomial: {got}"
        );
        let coeffs = got.numerator().coeffs();
        ensure!(
            coeffs.len() == want.len(),
            "Υ(GL({m})) has degree {}",
            coeffs.len() - 1
        );
        for (i, (a, b)) in coeffs.iter().zip(&want).enumerate() {
            ensure!(
                *a == Rational::from_integer((*b).into()),
                "Υ(GL({m})): coefficient of ℓ^{i} is {a}, expected {b}"
            );
        }
    }
    Ok("m = 1..8".into())
}

fn c2_e_f_values() -> Check {
    let table = ECoeffTable::build(3).map_err(|e| e.to_string())?;
    let l = ell();
    // (ℓ+1)^{-1}(−ℓ^{-1} − 1/2)
    let e2 = &inv(&(&l + &RatFunc::one())) * &(&(-&inv(&l)) - &RatFunc::from_ratio(1, 2));
    // (ℓ²+ℓ+1)^{-1}(ℓ^{-3} + ℓ^{-2} + ℓ^{-1} + 1/3)
    let e3 = &inv(&poly(&[1, 1, 1]))
        * &(&(&(&l.pow(-3).unwrap() + &l.pow(-2).unwrap()) + &inv(&l))
            + &RatFunc::from_ratio(1, 3));
    let want_e = [RatFunc::one(), e2, e3];
    let want_f = [q(1, 1), q(-3, 4), q(10, 9)];
    for m in 1..=3 {
        let e = table.e(m).unwrap();
        ensure!(
            *e == want_e[m - 1],
            "E({m}) = {e}, expected {}",
            want_e[m - 1]
        );
        let f = e.pi_eval().map_err(|e| e.to_string())?;
        ensure!(
            f == want_f[m - 1],
            "F({m}) = {f}, expected {}",
            want_f[m - 1]
        );
        ensure!(
            *table.f(m).unwrap() == f,
            "stored F({m}) differs from π(E({m}))"
        );
        let direct = e_coeff_gl(m, &SetPartition::one_block(m)).map_err(|e| e.to_string())?;
        ensure!(direct == *e, "E({m}) from the direct sum is {direct}");
    }
    Ok("E(1..3), F(1..3)".into())
}

fn c3_recursions() -> Check {
    let table = ECoeffTable::build(7).map_err(|e| e.to_string())?;
    for m in 1..=6 {
        let r = e_recursion_residual(m, &table).map_err(|e| e.to_string())?;
        ensure!(r.is_zero(), "E recursion residual at m = {m} is {r}");
        let r = f_recursion_residual(m, &table).map_err(|e| e.to_string())?;
        ensure!(r == q(0, 1), "F recursion residual at m = {m} is {r}");
    }
    Ok("m = 1..6".into())
}

fn c4_consistency() -> Check {
    for m in 1..=5 {
        let r = consistency_residual(m).map_err(|e| e.to_string())?;
        ensure!(r.is_zero(), "consistency residual at m = {m} is {r}");
        // Rebuild the sum here as well.
        let mut sum = RatFunc::zero();
        for (p, e) in e_coeffs_gl_all(m).map_err(|e| e.to_string())? {
            sum = &sum + &(&e * &lm1().pow(-(p.num_blocks() as i32)).unwrap());
        }
        ensure!(
            sum == inv(&upsilon_gl(m)),
            "Σ Υ(Q)^-1 E(Q) ≠ Υ(GL({m}))^-1 at m = {m}"
        );
    }
    Ok("m = 1..5".into())
}

fn c5_product_form() -> Check {
    let table = ECoeffTable::build(5).map_err(|e| e.to_string())?;
    let mut n = 0;
    for m in 1..=5 {
        for (p, e) in e_coeffs_gl_all(m).map_err(|e| e.to_string())? {
            let pf = e_product_formula(m, &p, &table).map_err(|e| e.to_string())?;
            ensure!(pf == e, "product form differs at {p}: {pf} vs {e}");
            ensure!(e.in_lambda_circ(), "E at {p} has a pole at ℓ = 1: {e}");
            n += 1;
        }
    }
    Ok(format!("{n} partitions, m = 1..5"))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

// Möbius value on the partition lattice: for `fine` refining `coarse`,
// ∏ over blocks of `coarse` of (-1)^{k-1}(k-1)!, k = number of blocks of
// `fine` inside it.
fn partition_mobius(fine: &SetPartition, coarse: &SetPartition) -> i64 {
    coarse
        .blocks()
        .iter()
        .map(|b| {
            let k = fine.blocks().iter().filter(|f| b.contains(&f[0])).count();
            let sign = if k % 2 == 1 { 1 } else { -1 };
            sign * factorial(k - 1)
        })
        .product()
}

fn all_pairs_agree(p: &SubgroupPoset) -> std::result::Result<usize, String> {
    let mut n = 0;
    for up in 0..p.len() {
        for lo in p.below(up) {
            let c = p.crosscut_idx(lo, up).map_err(|e| e.to_string())?;
            let mu = p.mobius_idx(lo, up);
            ensure!(c == mu, "pair ({lo}, {up}): crosscut {c}, Möbius {mu}");
            n += 1;
        }
    }
    Ok(n)
}

fn c6_mobius_crosscut() -> Check {
    let mut pairs = 0;
    for m in 1..=5 {
        let lat = q_lattice_gl(m).map_err(|e| e.to_string())?;
        let p = lat.poset();
        let parts = lat.partitions();
        if m <= 4 {
            pairs += all_pairs_agree(p)?;
            for up in 0..p.len() {
                for lo in p.below(up) {
                    // Larger subgroup = finer partition.
                    let want = partition_mobius(&parts[up], &parts[lo]);
                    ensure!(
                        p.mobius_idx(lo, up) == want,
                        "m = {m}: μ({}, {}) ≠ {want}",
                        parts[lo],
                        parts[up]
                    );
                }
            }
        }
        let corner = p
            .mobius(&TorusSubgroup::scalars(m), &TorusSubgroup::full(m))
            .map_err(|e| e.to_string())?;
        let want = if m % 2 == 1 { 1 } else { -1 } * factorial(m - 1);
        ensure!(
            corner == want,
            "m = {m}: μ(bottom, top) = {corner}, expected {want}"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sizes = 0;
    for _ in 0..200 {
        let p = random_poset(&mut rng, 12);
        ensure!(p.len() <= 12, "random poset too large");
        sizes += p.len();
        pairs += all_pairs_agree(&p)?;
    }
    Ok(format!(
        "{pairs} comparable pairs, 200 random posets (mean size {:.1})",
        sizes as f64 / 200.0
    ))
}

fn sample_classes(rng: &mut impl Rng) -> Vec<AbelianGroupClass> {
    (0..8)
        .map(|_| {
            let tors: Vec<u64> = (0..rng.gen_range(0..=1))
                .map(|_| rng.gen_range(2..=4))
                .collect();
            AbelianGroupClass::new(rng.gen_range(0..=5), &tors).unwrap()
        })
        .collect()
}

fn c7_operator_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let x = random_lbar(&mut rng, 4);
        let y = random_lbar(&mut rng, 4);
        let mu1 = random_weight(&mut rng, 4);
        let mu2 = random_weight(&mut rng, 4);
        let bad = operator_identities(&x, &y, &mu1, &mu2);
        ensure!(bad.is_empty(), "instance {i}: {}", bad.join("; "));
        // Termwise: Π^μ scales the coefficient of [T] by μ(T).
        let px = pi_mu_lbar(&mu1, &x);
        for (c, v) in x.iter() {
            ensure!(
                px.coeff(c) == v.scale(&mu1.eval(c)),
                "instance {i}: Π^μ is not termwise on {c}"
            );
        }
        let prod = weight_mul(&mu1, &mu2);
        for c in sample_classes(&mut rng).iter().chain(x.classes()) {
            ensure!(
                prod.eval(c) == mu1.eval(c) * mu2.eval(c),
                "instance {i}: μ1μ2 is not pointwise at {c}"
            );
        }
    }
    Ok("500 instances".into())
}

fn block_torus(m: usize, blocks: &[&[usize]]) -> TorusSubgroup {
    let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
    let mut chars = Vec::new();
    for b in &blocks {
        for w in b.windows(2) {
            let mut row = vec![0i64; m];
            row[w[0] - 1] = 1;
            row[w[1] - 1] = -1;
            chars.push(row);
        }
    }
    TorusSubgroup::from_characters(m, &chars).unwrap()
}

fn model(m: usize, strata: Vec<(TorusSubgroup, RatFunc)>) -> StratifiedModel {
    StratifiedModel::new(GroupDesc::GeneralLinear(m), strata).unwrap()
}

/// GL(3) strata with one value per stabilizer type: full torus, each of the
/// three rank-2 block tori, scalars.
fn gl3_model(t: RatFunc, rank2: RatFunc, scalars: RatFunc) -> StratifiedModel {
    let mut strata = vec![(TorusSubgroup::full(3), t)];
    for b in [
        [[1usize, 2].as_slice(), &[3]],
        [&[1, 3], &[2]],
        [&[2, 3], &[1]],
    ] {
        strata.push((block_torus(3, &b), rank2.clone()));
    }
    strata.push((TorusSubgroup::scalars(3), scalars));
    model(3, strata)
}

fn check_model(
    name: &str,
    x: &StratifiedModel,
    m: usize,
    want: &[RatFunc],
) -> std::result::Result<(), String> {
    let all = upsilon_pi_mu(x, &WeightFn::ConstOne).map_err(|e| e.to_string())?;
    let total = &model_total_upsilon(x) * &inv(&upsilon_gl(m));
    ensure!(
        all == total,
        "{name}: Π^1 gives {all}, Υ(X)/Υ(G) is {total}"
    );
    for (n, w) in want.iter().enumerate().skip(1) {
        let v = upsilon_pi_mu(x, &WeightFn::VirtualRank { n }).map_err(|e| e.to_string())?;
        ensure!(v == *w, "{name}: Π^vi_{n} gives {v}, expected {w}");
    }
    Ok(())
}

fn c8_models() -> Check {
    let l = ell();
    let e2 = &inv(&(&l + &RatFunc::one())) * &(&(-&inv(&l)) - &RatFunc::from_ratio(1, 2));
    let e3 = &inv(&poly(&[1, 1, 1]))
        * &(&(&(&l.pow(-3).unwrap() + &l.pow(-2).unwrap()) + &inv(&l))
            + &RatFunc::from_ratio(1, 3));
    let zero = RatFunc::zero();
    let lm = |k: i32| lm1().pow(-k).unwrap();

    // GL(2)/T: two T-fixed points, the rest has scalar stabilizers.
    let flag2 = model(
        2,
        vec![
            (TorusSubgroup::full(2), RatFunc::from_int(2)),
            (TorusSubgroup::scalars(2), poly(&[-2, 1, 1])),
        ],
    );
    let all = upsilon_pi_mu(&flag2, &WeightFn::ConstOne).map_err(|e| e.to_string())?;
    ensure!(all == lm(2), "GL(2)/T: Π^1 gives {all}");
    ensure!(
        all == &model_total_upsilon(&flag2) * &inv(&upsilon_gl(2)),
        "GL(2)/T: Π^1 ≠ Υ(X)/Υ(GL(2))"
    );
    check_model("GL(2)/T", &flag2, 2, &[zero.clone(), zero.clone(), lm(2)])?;

    // GL(3)/T: 6 fixed points; each rank-2 block torus fixes 3ℓ(ℓ+1)
    // points; the whole space is ℓ³(ℓ+1)(ℓ²+ℓ+1).
    let whole = poly(&[0, 0, 0, 1, 2, 2, 1]);
    let flag3 = gl3_model(
        RatFunc::from_int(6),
        poly(&[-6, 3, 3]),
        &(&whole - &RatFunc::from_int(6)) - &poly(&[-18, 9, 9]),
    );
    check_model(
        "GL(3)/T",
        &flag3,
        3,
        &[zero.clone(), zero.clone(), zero.clone(), lm(3)],
    )?;

    // GL(3)/(GL(2)×GL(1)), pairs (plane, line) with V = plane ⊕ line: 3 torus
    // fixed points, ℓ²+ℓ+1 fixed by each rank-2 block torus, ℓ²(ℓ²+ℓ+1) in all.
    let levi3 = gl3_model(
        RatFunc::from_int(3),
        poly(&[-2, 1, 1]),
        poly(&[3, -3, -2, 1, 1]),
    );
    ensure!(
        model_total_upsilon(&levi3) == poly(&[0, 0, 1, 1, 1]),
        "GL(3)/(GL(2)×GL(1)) strata do not add up"
    );
    check_model(
        "GL(3)/(GL(2)×GL(1))",
        &levi3,
        3,
        &[
            zero.clone(),
            zero.clone(),
            &e2 * &lm(2),
            lm(3).scale(&q(1, 2)),
        ],
    )?;

    // A point with trivial GL(3) action: [pt/GL(3)].
    let pt3 = model(3, vec![(TorusSubgroup::full(3), RatFunc::one())]);
    check_model(
        "[pt/GL(3)]",
        &pt3,
        3,
        &[
            zero.clone(),
            &e3 * &lm(1),
            &e2 * &lm(2),
            lm(3).scale(&q(1, 6)),
        ],
    )?;

    Ok("GL(2)/T, GL(3)/T, GL(3)/(GL(2)×GL(1)), [pt/GL(3)]".into())
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn c9_euler() -> Check {
    for (m, file) in [(2, "euler2.txt"), (3, "euler3.txt")] {
        let out = bin()
            .args(["euler", &m.to_string()])
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "euler {m} exited with {}", out.status);
        let got = String::from_utf8_lossy(&out.stdout);
        let want = golden(file);
        ensure!(got == want, "euler {m}: got {got:?}, golden {want:?}");
    }
    Ok("euler 2, euler 3".into())
}

fn c10_m_vanishing() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut hits = 0;
    let mut draws = 0;
    while hits < 200 {
        draws += 1;
        ensure!(draws < 200_000, "could not draw 200 non-minimal instances");
        let pp = random_poset(&mut rng, 12);
        let r = pp.ambient_rank();
        let ql = q_lattice_gl(r).map_err(|e| e.to_string())?;
        let qp = ql.poset();
        let seed: Vec<TorusSubgroup> = pp
            .elements()
            .iter()
            .flat_map(|a| qp.elements().iter().map(move |b| a.intersect(b).unwrap()))
            .collect();
        let rp = SubgroupPoset::close(&seed, &TorusSubgroup::full(r)).map_err(|e| e.to_string())?;
        let pi = rng.gen_range(0..pp.len());
        let qi = rng.gen_range(0..qp.len());
        let p = pp.element(pi);
        let qq = qp.element(qi);
        let meet = p.intersect(qq).unwrap();
        let p_min = pp
            .elements()
            .iter()
            .all(|x| !(x.contains(&meet).unwrap() && p.contains(x).unwrap()) || x == p);
        let q_min = qp
            .elements()
            .iter()
            .all(|x| !(x.contains(&meet).unwrap() && qq.contains(x).unwrap()) || x == qq);
        if p_min && q_min {
            continue;
        }
        let below: Vec<&TorusSubgroup> = rp
            .elements()
            .iter()
            .filter(|x| meet.contains(x).unwrap())
            .collect();
        let rr = below[rng.gen_range(0..below.len())];
        let w = weyl_inverse_gl(&ql.partitions()[qi]);
        let v = m_big_coeff(&pp, qp, &rp, p, qq, rr, &w).map_err(|e| e.to_string())?;
        ensure!(
            v == q(0, 1),
            "M(P, Q, R) = {v} with P = {p}, Q = {qq}, R = {rr}"
        );
        hits += 1;
    }
    Ok(format!("200 instances from {draws} draws"))
}

fn c11_parser() -> Check {
    let table = golden("expressions.tsv");
    let mut n = 0;
    for line in table.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        ensure!(cols.len() == 3, "bad golden line {line:?}");
        let (src, canon, value) = (cols[0], cols[1], cols[2]);
        let e = parse(src).map_err(|e| format!("{src:?}: {e}"))?;
        ensure!(
            render(&e) == canon,
            "{src:?} renders as {:?}, golden {canon:?}",
            render(&e)
        );
        let again = parse(canon).map_err(|e| format!("{canon:?}: {e}"))?;
        ensure!(
            again == e,
            "{canon:?} does not parse back to the tree of {src:?}"
        );
        let v = eval_class(&e).map_err(|e| e.to_string())?;
        ensure!(
            v.to_string() == value,
            "{src:?} evaluates to {v}, golden {value}"
        );
        n += 1;
    }
    ensure!(n == 50, "expected 50 golden expressions, found {n}");

    let bad: &[(&str, usize)] = &[
        ("", 0),
        ("A^", 2),
        ("A^1 +", 5),
        ("GL(2", 4),
        ("GL 2)", 3),
        ("P^2 * * Gm", 6),
        ("[pt / GL(1)", 11),
        ("[pt GL(1)]", 4),
        ("(Gm + pt", 8),
        ("Gm)", 2),
        ("pt ^ x", 5),
        ("Foo", 0),
        ("A^1 ? 2", 4),
        ("[pt / pt]", 6),
        ("B pt", 2),
    ];
    for (src, pos) in bad {
        match parse(src) {
            Err(ParseError::Syntax { position, .. }) => {
                ensure!(
                    position == *pos,
                    "{src:?}: error at byte {position}, expected {pos}"
                )
            }
            other => return Err(format!("{src:?}: expected a syntax error, got {other:?}")),
        }
    }
    // Offsets are in bytes, so a multi-byte character shifts them.
    match parse("ℓ + pt") {
        Err(ParseError::Syntax { position: 0, .. }) => {}
        other => return Err(format!("non-ASCII input: {other:?}")),
    }
    match parse("pt + ℓ") {
        Err(ParseError::Syntax { position: 5, .. }) => {}
        other => return Err(format!("non-ASCII input: {other:?}")),
    }

    let out = bin()
        .args(["eval", "[pt/GL(1)]", "--at-one"])
        .output()
        .map_err(|e| e.to_string())?;
    let err = String::from_utf8_lossy(&out.stderr);
    ensure!(
        !out.status.success(),
        "eval --at-one on [pt/GL(1)] succeeded"
    );
    ensure!(
        err.contains("PoleAtOne"),
        "eval --at-one on [pt/GL(1)] reported {err:?}"
    );
    let direct = eval_class(&parse("[pt/GL(1)]").unwrap()).unwrap().pi_eval();
    ensure!(
        matches!(direct, Err(Error::PoleAtOne(_))),
        "library π on 1/(ℓ-1): {direct:?}"
    );
    Ok(format!("50 goldens, {} malformed inputs", bad.len() + 2))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "1 Υ(GL(m)) closed form",
            Duration::from_secs(1),
            c1_upsilon_gl,
        ),
        ("2 E and F values", Duration::from_secs(1), c2_e_f_values),
        ("3 E/F recursions", Duration::from_secs(30), c3_recursions),
        (
            "4 consistency identity",
            Duration::from_secs(10),
            c4_consistency,
        ),
        (
            "5 product form and Λ°",
            Duration::from_secs(10),
            c5_product_form,
        ),
        (
            "6 Möbius vs crosscut",
            Duration::from_secs(30),
            c6_mobius_crosscut,
        ),
        (
            "7 operator algebra",
            Duration::from_secs(5),
            c7_operator_algebra,
        ),
        ("8 model evaluation", Duration::from_secs(5), c8_models),
        (
            "9 generalized Euler characteristic",
            Duration::from_secs(1),
            c9_euler,
        ),
        ("10 M vanishing", Duration::from_secs(5), c10_m_vanishing),
        ("11 parser", Duration::from_secs(1), c11_parser),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let res = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let res = match res {
            Ok(detail) if took > budget => {
                Err(format!("{detail}; took {took:.2?}, budget {budget:?}"))
            }
            other => other,
        };
        match res {
            Ok(detail) => println!("PASS  {name}  [{took:.2?}]  {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}  [{took:.2?}]  {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
