//! Parser for the infix text form.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := number | name | '(' expr ')'
//! ```
//!
//! Names are the generators `z tau wp wp1 zeta E2 E4 E6`, the constants
//! `pi` and `I`, and the abbreviations `g2 g3 Delta`. Numbers are integers or
//! decimals, read exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;

use super::coeff::Coeff;
use super::expr::Expr;
use super::Generator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Name(String),
    Op(char),
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push((start, Tok::Num(parse_decimal(&src[start..i], start)?)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Name(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(err(i, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn parse_decimal(text: &str, pos: usize) -> Result<BigRational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(err(pos, format!("malformed number {text:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str_radix(&digits, 10).map_err(|_| err(pos, format!("malformed number {text:?}")))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let pos = self.pos();
                let rhs = self.unary()?;
                acc = acc.div(&rhs).map_err(|_| err(pos, "division by zero"))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let pos = self.pos();
        let n = match self.peek() {
            Some(Tok::Num(r)) if r.is_integer() => r.to_integer(),
            _ => return Err(err(pos, "expected an integer exponent")),
        };
        self.at += 1;
        let n: i64 = n.try_into().map_err(|_| err(pos, "exponent out of range"))?;
        let n = if negative { -n } else { n };
        base.pow(n).map_err(|_| err(pos, "zero raised to a negative power"))
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.at += 1;
                Ok(Expr::constant(Coeff::real(r)))
            }
            Some(Tok::Name(name)) => {
                self.at += 1;
                named(&name).ok_or_else(|| err(pos, format!("unknown name {name:?}")))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.pos(), "expected ')'"));
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => Err(err(pos, format!("unexpected {c:?}"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

fn named(name: &str) -> Option<Expr> {
    if let Some(g) = Generator::from_name(name) {
        return Some(Expr::gen(g));
    }
    match name {
        "pi" => Some(Expr::pi_power(1)),
        "I" => Some(Expr::i()),
        "g2" => Some(Expr::g2()),
        "g3" => Some(Expr::g3()),
        "Delta" => Some(Expr::delta()),
        _ => None,
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(err(p.pos(), "trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse_expr("-wp^2 + 3*zeta/2").unwrap();
        let wp = Expr::gen(Generator::Wp);
        let zeta = Expr::gen(Generator::Zeta);
        let expected = wp.powi(2).neg().add(&zeta.scale(&Coeff::ratio(3, 2)));
        assert_eq!(e, expected);
        assert_eq!(parse_expr("2^-1").unwrap(), Expr::rational(1, 2));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_expr("0.25").unwrap(), Expr::rational(1, 4));
        assert_eq!(parse_expr("1.5*I").unwrap(), Expr::constant(Coeff::i()).scale(&Coeff::ratio(3, 2)));
        assert!(parse_expr("1.2.3").is_err());
    }

    #[test]
    fn abbreviations_expand() {
        assert_eq!(parse_expr("g2^3 - 27*g3^2").unwrap(), Expr::delta());
        assert_eq!(parse_expr("Delta").unwrap(), Expr::delta());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_expr("wp + foo"),
            Err(Error::Parse { pos: 5, msg: "unknown name \"foo\"".into() })
        );
        assert!(matches!(parse_expr("(wp"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_expr("wp $"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_expr("wp/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("wp^zeta"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr("wp wp"), Err(Error::Parse { .. })));
    }

    #[test]
    fn printed_form_round_trips() {
        for src in [
            "zeta",
            "-zeta",
            "wp1^2 - 4*wp^3 + g2*wp + g3",
            "(wp + z*I/3)/(E4^3 - E6^2)",
            "pi^-2*E2 - 1/7*tau",
            "(1 + 2*I)*wp/zeta^2",
            "1",
            "0",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = e.to_string();
            let back = parse_expr(&printed).unwrap();
            assert_eq!(back, e, "{src} -> {printed}");
            assert_eq!(back.to_string(), printed);
        }
        assert!(BigRational::one().is_integer());
    }
}
