use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{Polynomial, Rational};
use crate::error::{Error, Result};

/// Element of ℚ(ℓ) in canonical form: reduced, with a monic denominator.
///
/// Equality of values is structural equality of the canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Polynomial,
    den: Polynomial,
}

impl RatFunc {
    /// Reduce `num / den` to canonical form.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        Self::from_coprime(num, den)
    }

    /// Caller guarantees `gcd(num, den) = 1` and `den != 0`.
    fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The Tate class ℓ.
    pub fn ell() -> Self {
        Self::from_poly(Polynomial::x())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::constant(Rational::new(n.into(), d.into()))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RatFunc {
            num: p,
            den: Polynomial::one(),
        }
    }

    /// `ℓ^k`.
    pub fn ell_pow(k: usize) -> Self {
        Self::from_poly(Polynomial::monomial(Rational::one(), k))
    }

    /// `ℓ^k - 1`.
    pub fn ell_pow_minus_one(k: usize) -> Self {
        Self::from_poly(&Polynomial::monomial(Rational::one(), k) - &Polynomial::one())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational number, if the function is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        (self.den.is_one() && self.num.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(RatFunc {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// Membership in the subring of functions regular at ℓ = 1.
    pub fn in_lambda_circ(&self) -> bool {
        !self.den.eval(&Rational::one()).is_zero()
    }

    /// Evaluation at ℓ = 1.
    pub fn pi_eval(&self) -> Result<Rational> {
        let one = Rational::one();
        let d = self.den.eval(&one);
        if d.is_zero() {
            return Err(Error::PoleAtOne(self.to_string()));
        }
        Ok(self.num.eval(&one) / d)
    }

    /// Evaluation at an arbitrary rational point.
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }

    /// Unique integer representative `(N, D)`: integer coefficients, `D` with
    /// positive leading coefficient, joint content one.
    pub fn integer_normalized(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let (dn, n) = self.num.clear_denominators();
        let (dd, d) = self.den.clear_denominators();
        let l = dn.lcm(&dd);
        let (sn, sd) = (&l / &dn, &l / &dd);
        let mut n: Vec<BigInt> = n.into_iter().map(|c| c * &sn).collect();
        let mut d: Vec<BigInt> = d.into_iter().map(|c| c * &sd).collect();
        let content = n
            .iter()
            .chain(d.iter())
            .fold(BigInt::zero(), |g, c| g.gcd(c));
        if !content.is_one() && !content.is_zero() {
            n.iter_mut().for_each(|c| *c = &*c / &content);
            d.iter_mut().for_each(|c| *c = &*c / &content);
        }
        (n, d)
    }

    pub fn fmt_with_var(&self, var: &str) -> String {
        let (n, d) = self.integer_normalized();
        let to_poly =
            |v: Vec<BigInt>| Polynomial::new(v.into_iter().map(Rational::from_integer).collect());
        let (n, d) = (to_poly(n), to_poly(d));
        let ns = n.fmt_with_var(var);
        if d.is_one() {
            return ns;
        }
        let wrap = |p: &Polynomial, s: String| {
            let single_term = p.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1;
            if single_term {
                s
            } else {
                format!("({s})")
            }
        };
        let ds = d.fmt_with_var(var);
        format!("{}/{}", wrap(&n, ns), wrap(&d, ds))
    }

    /// True when the canonical string needs parentheses to act as a factor.
    pub fn is_compound(&self) -> bool {
        if self.as_constant().is_some() {
            return false;
        }
        let terms = self.num.coeffs().iter().filter(|c| !c.is_zero()).count();
        !(self.den.is_one() && terms == 1)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with_var("ℓ"))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::normalize(&self.num + &rhs.num, self.den.clone());
        }
        // With g = gcd(b, d): a/b + c/d = (a·d' + c·b') / (b'·d), and only g
        // can share a factor with the new numerator.
        let g = self.den.gcd(&rhs.den);
        let (b1, d1) = if g.is_one() {
            (self.den.clone(), rhs.den.clone())
        } else {
            (self.den.exact_div(&g), rhs.den.exact_div(&g))
        };
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return RatFunc::zero();
        }
        let h = if g.is_one() { g.clone() } else { num.gcd(&g) };
        if h.is_one() {
            RatFunc::from_coprime(num, &b1 * &rhs.den)
        } else {
            RatFunc::from_coprime(num.exact_div(&h), &b1 * &rhs.den.exact_div(&h))
        }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        // Cross-cancel: gcd(a, d) and gcd(c, b).
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let div = |p: &Polynomial, g: &Polynomial| {
            if g.is_one() {
                p.clone()
            } else {
                p.exact_div(g)
            }
        };
        let num = &div(&self.num, &g1) * &div(&rhs.num, &g2);
        let den = &div(&self.den, &g2) * &div(&rhs.den, &g1);
        RatFunc::from_coprime(num, den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Sum for RatFunc {
    fn sum<I: Iterator<Item = RatFunc>>(iter: I) -> RatFunc {
        iter.fold(RatFunc::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a RatFunc> for RatFunc {
    fn sum<I: Iterator<Item = &'a RatFunc>>(iter: I) -> RatFunc {
        iter.fold(RatFunc::zero(), |acc, x| acc + x)
    }
}

impl Product for RatFunc {
    fn product<I: Iterator<Item = RatFunc>>(iter: I) -> RatFunc {
        iter.fold(RatFunc::one(), |acc, x| acc * x)
    }
}

impl From<Polynomial> for RatFunc {
    fn from(p: Polynomial) -> Self {
        RatFunc::from_poly(p)
    }
}

impl From<Rational> for RatFunc {
    fn from(c: Rational) -> Self {
        RatFunc::constant(c)
    }
}

/// `"a/b"` rendering used by every JSON surface.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Parse a polynomial written the way [`Polynomial::fmt_with_var`] writes
/// it, e.g. `"-2ℓ^3 + ℓ - 5"`.
fn parse_poly(s: &str, var: &str) -> Option<Polynomial> {
    let s = s.trim();
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut rest = s;
    let mut sign = BigInt::one();
    if let Some(r) = rest.strip_prefix('-') {
        sign = -sign;
        rest = r.trim_start();
    }
    loop {
        let end = [" + ", " - "]
            .iter()
            .filter_map(|d| rest.find(d))
            .min()
            .unwrap_or(rest.len());
        let term = rest[..end].trim();
        let digits = term
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(term.len());
        let (num, mono) = term.split_at(digits);
        let c: BigInt = if num.is_empty() {
            BigInt::one()
        } else {
            num.parse().ok()?
        };
        let k: usize = if mono.is_empty() {
            if num.is_empty() {
                return None;
            }
            0
        } else {
            let after = mono.strip_prefix(var)?;
            if after.is_empty() {
                1
            } else {
                after.strip_prefix('^')?.parse().ok()?
            }
        };
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rational::zero());
        }
        coeffs[k] += Rational::from_integer(sign * c);
        if end == rest.len() {
            break;
        }
        sign = if &rest[end..end + 3] == " - " {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        rest = &rest[end + 3..];
    }
    Some(Polynomial::new(coeffs))
}

impl RatFunc {
    /// Inverse of [`RatFunc::fmt_with_var`].
    pub fn parse_with_var(s: &str, var: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("not a canonical rational function: {s:?}"));
        let unwrap = |p: &str| {
            let p = p.trim();
            p.strip_prefix('(')
                .and_then(|q| q.strip_suffix(')'))
                .unwrap_or(p)
                .to_string()
        };
        // The fraction bar is the only '/' outside parentheses.
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => split = Some(i),
                _ => {}
            }
        }
        let (n, d) = match split {
            Some(i) => (unwrap(&s[..i]), unwrap(&s[i + 1..])),
            None => (s.trim().to_string(), "1".to_string()),
        };
        let n = parse_poly(&n, var).ok_or_else(bad)?;
        let d = parse_poly(&d, var).ok_or_else(bad)?;
        RatFunc::new(n, d).map_err(|_| bad())
    }
}

impl std::str::FromStr for RatFunc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RatFunc::parse_with_var(s, "ℓ")
    }
}

#[derive(Serialize, Deserialize)]
struct RatFuncJson {
    num: Vec<String>,
    den: Vec<String>,
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncJson {
            num: self.num.coeffs().iter().map(rational_to_string).collect(),
            den: self.den.coeffs().iter().map(rational_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RatFuncJson::deserialize(d)?;
        let parse = |v: &[String]| -> std::result::Result<Polynomial, D::Error> {
            v.iter()
                .map(|s| parse_rational(s).map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Polynomial::new)
        };
        RatFunc::new(parse(&raw.num)?, parse(&raw.den)?).map_err(D::Error::custom)
    }
}
