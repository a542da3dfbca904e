//! Class expressions: a small grammar for building classes in the
//! Grothendieck ring and quotient stacks by special groups.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' factor) | ('/' gatom))*
//! factor := atom ('^' nat)?
//! atom   := 'A^' nat | 'Gm' | 'P^' nat | 'GL(' nat ')' | 'pt'
//!         | 'B' gatom | '[' expr '/' group ']' | '(' expr ')'
//! group  := gatom ('*' gatom)*
//! gatom  := 'Gm' ('^' nat)? | 'GL(' nat ')' | '(' group ')'
//! ```
//!
//! Finite groups cannot be written down: `{±1}` is not special, so
//! `Υ([X/{±1}])` is not `Υ(X)/2` in general (for `X = G_m` acting by
//! inversion the true answer is `xy - 1`, not `½(xy - 1)`).

use std::fmt;

use motivic_core::groups::{upsilon_gl, upsilon_group, GroupDesc};
use motivic_core::ratfield::{Polynomial, RatFunc};
use motivic_core::Error as CoreError;

/// Largest exponent in `A^n`, `P^n`, `Gm^n` and `x^n`.
pub const MAX_EXPONENT: u32 = 64;
/// Largest `n` in `GL(n)`.
pub const MAX_GL: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassExpr {
    Affine(u32),
    Gm,
    Projective(u32),
    GLClass(u32),
    Point,
    Product(Vec<ClassExpr>),
    Power(Box<ClassExpr>, u32),
    Sum(Vec<ClassExpr>),
    Diff(Box<ClassExpr>, Box<ClassExpr>),
    Quotient(Box<ClassExpr>, GroupDesc),
    BStack(GroupDesc),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: expected {}", expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
    },
    #[error("out of range at byte {position}: {message}")]
    Guard { position: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::Guard { position, .. } => *position,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Sym(char),
    /// Digits that do not fit in a `u64`.
    Huge,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = input[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let tok = input[start..i].parse().map(Tok::Nat).unwrap_or(Tok::Huge);
            out.push((start, tok));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let word = &input[start..i];
            // "BGL(2)" and "BGm" are written without a space.
            if word.len() > 1 && word.starts_with('B') && matches!(&word[1..], "GL" | "Gm") {
                out.push((start, Tok::Ident("B".into())));
                out.push((start + 1, Tok::Ident(word[1..].to_string())));
            } else {
                out.push((start, Tok::Ident(word.to_string())));
            }
        } else if "^()[]/*+-".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                position: i,
                expected: vec!["a class expression token".into()],
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    /// False directly inside `[ … ]`, where '/' separates the group.
    slash_ok: bool,
}

fn q(s: &str) -> String {
    format!("'{s}'")
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.fail(&[&q(&c.to_string())])
        }
    }

    fn nat(&mut self, lo: u32, hi: u32, what: &str) -> Result<u32, ParseError> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.pos += 1;
                if n < lo as u64 || n > hi as u64 {
                    return Err(ParseError::Guard {
                        position: at,
                        message: format!("{what} must lie in {lo}..={hi}, got {n}"),
                    });
                }
                Ok(n as u32)
            }
            Some(Tok::Huge) => Err(ParseError::Guard {
                position: at,
                message: format!("{what} must lie in {lo}..={hi}"),
            }),
            _ => self.fail(&["a natural number"]),
        }
    }

    fn expr(&mut self) -> Result<ClassExpr, ParseError> {
        let mut cur = self.term()?;
        loop {
            if self.eat_sym('+') {
                let t = self.term()?;
                cur = match cur {
                    ClassExpr::Sum(mut v) => {
                        v.push(t);
                        ClassExpr::Sum(v)
                    }
                    other => ClassExpr::Sum(vec![other, t]),
                };
            } else if self.eat_sym('-') {
                let t = self.term()?;
                cur = ClassExpr::Diff(Box::new(cur), Box::new(t));
            } else {
                return Ok(cur);
            }
        }
    }

    fn term(&mut self) -> Result<ClassExpr, ParseError> {
        let mut cur = self.factor()?;
        loop {
            if self.eat_sym('*') {
                let f = self.factor()?;
                cur = match cur {
                    ClassExpr::Product(mut v) => {
                        v.push(f);
                        ClassExpr::Product(v)
                    }
                    other => ClassExpr::Product(vec![other, f]),
                };
            } else if self.slash_ok && self.peek() == Some(&Tok::Sym('/')) {
                self.pos += 1;
                let g = self.group_atom(true)?;
                cur = ClassExpr::Quotient(Box::new(cur), g);
            } else {
                return Ok(cur);
            }
        }
    }

    fn factor(&mut self) -> Result<ClassExpr, ParseError> {
        let a = self.atom()?;
        if self.eat_sym('^') {
            let k = self.nat(0, MAX_EXPONENT, "exponent")?;
            return Ok(ClassExpr::Power(Box::new(a), k));
        }
        Ok(a)
    }

    fn ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s),
            _ => None,
        }
    }

    fn gl_arg(&mut self) -> Result<u32, ParseError> {
        self.expect_sym('(')?;
        let n = self.nat(1, MAX_GL, "GL rank")?;
        self.expect_sym(')')?;
        Ok(n)
    }

    fn atom(&mut self) -> Result<ClassExpr, ParseError> {
        const EXPECTED: &[&str] = &["'A^'", "'Gm'", "'P^'", "'GL('", "'pt'", "'B'", "'['", "'('"];
        match self.ident() {
            Some("A") | Some("P") => {
                let affine = self.ident() == Some("A");
                self.pos += 1;
                self.expect_sym('^')?;
                let n = self.nat(0, MAX_EXPONENT, "dimension")?;
                Ok(if affine {
                    ClassExpr::Affine(n)
                } else {
                    ClassExpr::Projective(n)
                })
            }
            Some("Gm") => {
                self.pos += 1;
                Ok(ClassExpr::Gm)
            }
            Some("GL") => {
                self.pos += 1;
                Ok(ClassExpr::GLClass(self.gl_arg()?))
            }
            Some("pt") => {
                self.pos += 1;
                Ok(ClassExpr::Point)
            }
            Some("B") => {
                self.pos += 1;
                Ok(ClassExpr::BStack(self.group_atom(false)?))
            }
            Some(_) => self.fail(EXPECTED),
            None => {
                if self.eat_sym('[') {
                    let saved = std::mem::replace(&mut self.slash_ok, false);
                    let x = self.expr()?;
                    self.slash_ok = saved;
                    self.expect_sym('/')?;
                    let g = self.group()?;
                    self.expect_sym(']')?;
                    Ok(ClassExpr::Quotient(Box::new(x), g))
                } else if self.eat_sym('(') {
                    let saved = std::mem::replace(&mut self.slash_ok, true);
                    let x = self.expr()?;
                    self.slash_ok = saved;
                    self.expect_sym(')')?;
                    Ok(x)
                } else {
                    self.fail(EXPECTED)
                }
            }
        }
    }

    fn group(&mut self) -> Result<GroupDesc, ParseError> {
        let mut fs = vec![self.group_atom(true)?];
        while self.eat_sym('*') {
            fs.push(self.group_atom(true)?);
        }
        Ok(GroupDesc::product(fs).expect("nonempty"))
    }

    fn group_atom(&mut self, allow_power: bool) -> Result<GroupDesc, ParseError> {
        match self.ident() {
            Some("Gm") => {
                self.pos += 1;
                let k = if allow_power && self.eat_sym('^') {
                    self.nat(1, MAX_EXPONENT, "torus rank")?
                } else {
                    1
                };
                Ok(GroupDesc::torus(k as usize))
            }
            Some("GL") => {
                self.pos += 1;
                Ok(GroupDesc::GeneralLinear(self.gl_arg()? as usize))
            }
            Some(_) => self.fail(&["'Gm'", "'GL('", "'('"]),
            None => {
                if self.eat_sym('(') {
                    let g = self.group()?;
                    self.expect_sym(')')?;
                    Ok(g)
                } else {
                    self.fail(&["'Gm'", "'GL('", "'('"])
                }
            }
        }
    }
}

pub fn parse(input: &str) -> Result<ClassExpr, ParseError> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: input.len(),
        slash_ok: true,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.fail(&["'+'", "'-'", "'*'", "'/'", "end of input"]);
    }
    Ok(e)
}

/// Binding strength, used to decide where the renderer needs parentheses.
fn prec(e: &ClassExpr) -> u8 {
    match e {
        ClassExpr::Sum(_) | ClassExpr::Diff(..) => 1,
        ClassExpr::Product(_) => 2,
        ClassExpr::Power(..) => 3,
        _ => 4,
    }
}

fn render_group(g: &GroupDesc) -> String {
    match g {
        GroupDesc::Torus(c) if c.rank() == 1 => "Gm".into(),
        GroupDesc::Torus(c) => format!("Gm^{}", c.rank()),
        GroupDesc::GeneralLinear(n) => format!("GL({n})"),
        GroupDesc::Product(fs) => fs.iter().map(render_group).collect::<Vec<_>>().join(" * "),
    }
}

fn render_at(e: &ClassExpr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        render_at(e, 0, out);
        out.push(')');
        return;
    }
    match e {
        ClassExpr::Affine(n) => out.push_str(&format!("A^{n}")),
        ClassExpr::Gm => out.push_str("Gm"),
        ClassExpr::Projective(n) => out.push_str(&format!("P^{n}")),
        ClassExpr::GLClass(n) => out.push_str(&format!("GL({n})")),
        ClassExpr::Point => out.push_str("pt"),
        ClassExpr::Sum(items) => {
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                render_at(x, if i == 0 { 1 } else { 2 }, out);
            }
        }
        ClassExpr::Diff(a, b) => {
            render_at(a, 1, out);
            out.push_str(" - ");
            render_at(b, 2, out);
        }
        ClassExpr::Product(items) => {
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" * ");
                }
                render_at(x, if i == 0 { 2 } else { 3 }, out);
            }
        }
        ClassExpr::Power(b, k) => {
            // "BGm^2" would read as B(Gm^2).
            let min = if matches!(**b, ClassExpr::BStack(_)) {
                5
            } else {
                4
            };
            render_at(b, min, out);
            out.push_str(&format!("^{k}"));
        }
        ClassExpr::Quotient(x, g) => {
            out.push('[');
            render_at(x, 0, out);
            out.push_str(" / ");
            out.push_str(&render_group(g));
            out.push(']');
        }
        ClassExpr::BStack(g) => match g {
            GroupDesc::Torus(c) if c.rank() == 1 => out.push_str("BGm"),
            GroupDesc::GeneralLinear(n) => out.push_str(&format!("BGL({n})")),
            other => out.push_str(&format!("B({})", render_group(other))),
        },
    }
}

/// Canonical text; parsing it gives back the same tree.
pub fn render(e: &ClassExpr) -> String {
    let mut s = String::new();
    render_at(e, 0, &mut s);
    s
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// `Υ'` of the expression.
pub fn eval_class(e: &ClassExpr) -> Result<RatFunc, CoreError> {
    Ok(match e {
        ClassExpr::Affine(n) => RatFunc::ell_pow(*n as usize),
        ClassExpr::Gm => RatFunc::ell_pow_minus_one(1),
        ClassExpr::Projective(n) => {
            // 1 + ℓ + … + ℓ^n
            RatFunc::from_poly(Polynomial::from_ints(&vec![1; *n as usize + 1]))
        }
        ClassExpr::GLClass(n) => upsilon_gl(*n as usize),
        ClassExpr::Point => RatFunc::one(),
        ClassExpr::Product(items) => items
            .iter()
            .map(eval_class)
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .product(),
        ClassExpr::Power(b, k) => eval_class(b)?.pow(*k as i32)?,
        ClassExpr::Sum(items) => items
            .iter()
            .map(eval_class)
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .sum(),
        ClassExpr::Diff(a, b) => &eval_class(a)? - &eval_class(b)?,
        ClassExpr::Quotient(x, g) => eval_class(x)?.checked_div(&upsilon_group(g))?,
        ClassExpr::BStack(g) => upsilon_group(g).inv()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse("GL(2)").unwrap(), ClassExpr::GLClass(2));
        assert_eq!(
            parse("[pt / GL(2)]").unwrap(),
            ClassExpr::Quotient(Box::new(ClassExpr::Point), GroupDesc::GeneralLinear(2))
        );
        assert_eq!(
            parse("P^2 * Gm - A^1").unwrap(),
            ClassExpr::Diff(
                Box::new(ClassExpr::Product(vec![
                    ClassExpr::Projective(2),
                    ClassExpr::Gm
                ])),
                Box::new(ClassExpr::Affine(1))
            )
        );
        assert_eq!(
            parse("BGL(3)").unwrap(),
            ClassExpr::BStack(GroupDesc::GeneralLinear(3))
        );
        assert_eq!(
            parse("B GL ( 3 )").unwrap(),
            ClassExpr::BStack(GroupDesc::GeneralLinear(3))
        );
    }

    #[test]
    fn eval_examples() {
        let v = |s: &str| eval_class(&parse(s).unwrap()).unwrap().to_string();
        assert_eq!(v("GL(2) / (Gm^2)"), "ℓ^2 + ℓ");
        assert_eq!(v("P^2"), "ℓ^2 + ℓ + 1");
        assert_eq!(v("[pt / GL(1)]"), "1/(ℓ - 1)");
        assert_eq!(v("BGL(1)"), "1/(ℓ - 1)");
        assert_eq!(v("A^0"), "1");
        assert_eq!(v("Gm^0"), "1");
    }

    #[test]
    fn error_offsets() {
        assert_eq!(
            parse("GL(2"),
            Err(ParseError::Syntax {
                position: 4,
                expected: vec!["')'".into()]
            })
        );
        assert_eq!(parse("").unwrap_err().position(), 0);
        assert_eq!(parse("A^1 +").unwrap_err().position(), 5);
        assert_eq!(parse("A^1 ? 2").unwrap_err().position(), 4);
        assert_eq!(parse("Foo").unwrap_err().position(), 0);
        assert!(matches!(
            parse("GL(0)"),
            Err(ParseError::Guard { position: 3, .. })
        ));
        assert!(matches!(
            parse("A^999"),
            Err(ParseError::Guard { position: 2, .. })
        ));
        assert!(matches!(
            parse("A^99999999999999999999999"),
            Err(ParseError::Guard { position: 2, .. })
        ));
        assert_eq!(parse("pt pt").unwrap_err().position(), 3);
    }

    #[test]
    fn render_examples() {
        for s in [
            "A^1 - (A^1 - pt)",
            "(Gm + pt) * P^2",
            "GL(2)^3",
            "(A^1^2)^3",
            "[Gm / Gm]",
            "B(GL(2) * Gm)",
            "BGm",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(render(&e), s);
        }
        assert_eq!(render(&parse("GL(2)/(Gm^2)").unwrap()), "[GL(2) / Gm^2]");
    }
}
