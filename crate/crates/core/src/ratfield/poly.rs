//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Polynomial in one variable with exact rational coefficients.
///
/// `coeffs[i]` is the coefficient of `x^i`. Trailing zeros are always
/// stripped, so the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The variable itself.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute `x -> x^k`.
    pub fn inflate(&self, k: usize) -> Self {
        assert!(k >= 1);
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        Self::new(coeffs)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lc_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = &rem[i + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient; panics (debug) when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one();
        }
        let mut a = IntPoly::primitive_of(self);
        let mut b = IntPoly::primitive_of(other);
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.to_rational().monic()
    }

    /// Smallest positive integer `d` with `d * self` integral, together with
    /// that integral polynomial.
    pub fn clear_denominators(&self) -> (BigInt, Vec<BigInt>) {
        let d = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(d.clone())).to_integer())
            .collect();
        (d, ints)
    }

    pub fn fmt_with_var(&self, var: &str) -> String {
        render_terms(
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (c.clone(), i)),
            |k| match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            },
        )
    }
}

/// Render `Σ c_i · mono(k_i)` with ASCII signs, leading term first.
pub(crate) fn render_terms<I, F>(terms: I, mono: F) -> String
where
    I: Iterator<Item = (Rational, usize)>,
    F: Fn(usize) -> String,
{
    let mut out = String::new();
    for (c, k) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let m = mono(k);
        if m.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&m);
        } else {
            out.push_str(&abs.to_string());
            out.push_str(&m);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with_var("ℓ"))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Integer polynomial used only inside the gcd.
#[derive(Clone, Debug)]
struct IntPoly(Vec<BigInt>);

impl IntPoly {
    fn primitive_of(p: &Polynomial) -> Self {
        let (_, ints) = p.clear_denominators();
        IntPoly(ints).primitive()
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn primitive(self) -> Self {
        let mut s = self.trim();
        let content = s.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if content.is_zero() {
            return s;
        }
        let content = if s.0.last().is_some_and(Signed::is_negative) {
            -content
        } else {
            content
        };
        if !content.is_one() {
            for c in &mut s.0 {
                *c = &*c / &content;
            }
        }
        s
    }

    /// Remainder of `lc(b)^k * self` by `b`, reduced to primitive form as it
    /// goes to keep coefficient growth in check.
    fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree();
        let lb = b.0[db].clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= db {
            let dr = r.degree();
            let lr = r.0[dr].clone();
            let g = lr.gcd(&lb);
            let (sr, sb) = (&lb / &g, &lr / &g);
            let shift = dr - db;
            for c in r.0.iter_mut() {
                *c *= &sr;
            }
            for (j, c) in b.0.iter().enumerate() {
                r.0[j + shift] -= &sb * c;
            }
            r = r.trim().primitive();
        }
        r
    }

    fn to_rational(&self) -> Polynomial {
        Polynomial::new(
            self.0
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    #[test]
    fn zero_has_no_degree() {
        assert_eq!(Polynomial::zero().degree(), None);
        assert_eq!(p(&[0, 0, 0]), Polynomial::zero());
        assert_eq!(p(&[1, 2, 0]).degree(), Some(1));
    }

    #[test]
    fn division_with_remainder() {
        // (x^3 + 2x + 5) = (x^2 - x + 3)(x + 1) + 2
        let (q, r) = p(&[5, 2, 0, 1]).div_rem(&p(&[1, 1]));
        assert_eq!(q, p(&[3, -1, 1]));
        assert_eq!(r, p(&[2]));
    }

    #[test]
    fn gcd_of_cyclotomic_products() {
        // gcd(x^6 - 1, x^4 - 1) = x^2 - 1
        let g = p(&[-1, 0, 0, 0, 0, 0, 1]).gcd(&p(&[-1, 0, 0, 0, 1]));
        assert_eq!(g, p(&[-1, 0, 1]));
        assert_eq!(p(&[2, 2]).gcd(&p(&[3])), Polynomial::one());
        assert_eq!(p(&[0, 4]).gcd(&Polynomial::zero()), p(&[0, 1]));
    }

    #[test]
    fn gcd_with_rational_coefficients() {
        let half = Rational::new(1.into(), 2.into());
        let a = Polynomial::new(vec![-half.clone(), Rational::one()]); // x - 1/2
        let b = &a * &p(&[3, 7]);
        assert_eq!(a.gcd(&b), a);
    }

    #[test]
    fn display_is_leading_first() {
        assert_eq!(p(&[-1, 0, 1]).to_string(), "ℓ^2 - 1");
        assert_eq!(p(&[0, -2]).to_string(), "-2ℓ");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(p(&[-1, 0, 1]).inflate(2).fmt_with_var("z"), "z^4 - 1");
    }
}
