//! Exact arithmetic in Λ = ℚ(ℓ).
//!
//! `ℓ` is the class of the affine line. Every value is kept as a reduced
//! fraction with a monic denominator, so `==` decides equality in Λ.
//! The subring Λ° is modelled as "regular at ℓ = 1", and `π` is evaluation
//! at ℓ = 1.

mod poly;
mod ratfunc;

use std::fmt;

pub use poly::{Polynomial, Rational};
pub use ratfunc::{parse_rational, rational_to_string, RatFunc};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field operations of Λ. Only division can fail.
pub fn rf_arith(a: &RatFunc, b: &RatFunc, op: ArithOp) -> Result<RatFunc> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

pub fn in_lambda_circ(f: &RatFunc) -> bool {
    f.in_lambda_circ()
}

pub fn pi_eval(f: &RatFunc) -> Result<Rational> {
    f.pi_eval()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpecializeTarget {
    /// Virtual Poincaré polynomial: ℓ ↦ z².
    PoincareZ,
    /// Hodge–Deligne polynomial: ℓ ↦ xy.
    HodgeXY,
}

/// A class pushed to one of the classical realizations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Specialized {
    /// Reduced rational function in `z`.
    Poincare(RatFunc),
    /// The original function with every ℓ read as the product `xy`.
    Hodge(RatFunc),
}

pub fn specialize(f: &RatFunc, target: SpecializeTarget) -> Specialized {
    match target {
        SpecializeTarget::PoincareZ => {
            // Inflation is an injective ring map, so coprimality survives.
            let num = f.numerator().inflate(2);
            let den = f.denominator().inflate(2);
            Specialized::Poincare(RatFunc::new(num, den).expect("nonzero denominator"))
        }
        SpecializeTarget::HodgeXY => Specialized::Hodge(f.clone()),
    }
}

impl fmt::Display for Specialized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Specialized::Poincare(r) => f.write_str(&r.fmt_with_var("z")),
            Specialized::Hodge(r) => {
                // "xy" is a single token for the renderer; powers become x^ky^k.
                let s = r.fmt_with_var("\u{1}");
                let mut out = String::with_capacity(s.len());
                let mut chars = s.chars().peekable();
                while let Some(c) = chars.next() {
                    if c != '\u{1}' {
                        out.push(c);
                        continue;
                    }
                    if chars.peek() == Some(&'^') {
                        chars.next();
                        let mut k = String::new();
                        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                            k.push(*d);
                            chars.next();
                        }
                        out.push_str(&format!("x^{k}y^{k}"));
                    } else {
                        out.push_str("xy");
                    }
                }
                f.write_str(&out)
            }
        }
    }
}
