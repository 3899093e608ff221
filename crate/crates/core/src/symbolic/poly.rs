use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::coeff::Coeff;
use super::Generator;

/// `π^pi · Π gᵢ^{exps[i]}`; the power of `π` may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub exps: [u32; Generator::COUNT],
    pub pi: i32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn generator(g: Generator) -> Self {
        let mut m = Monomial::one();
        m.exps[g.index()] = 1;
        m
    }

    pub fn pi_power(k: i32) -> Self {
        Monomial { pi: k, ..Monomial::one() }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        *self == Monomial::one()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (e, o) in out.exps.iter_mut().zip(other.exps) {
            *e += o;
        }
        out.pi += other.pi;
        out
    }

    /// `self / other`, when every generator exponent of `other` is no larger.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = *self;
        for (e, o) in out.exps.iter_mut().zip(other.exps) {
            *e = e.checked_sub(o)?;
        }
        out.pi -= other.pi;
        Some(out)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (e, o) in out.exps.iter_mut().zip(other.exps) {
            *e = (*e).min(o);
        }
        out.pi = self.pi.min(other.pi);
        out
    }

    pub fn eval(&self, values: &[Complex64; Generator::COUNT]) -> Complex64 {
        let mut acc = Complex64::new(PI.powi(self.pi), 0.0);
        for (g, &e) in Generator::ALL.iter().zip(&self.exps) {
            if e > 0 {
                acc *= values[g.index()].powu(e);
            }
        }
        acc
    }
}

/// `pi^2*wp^3*E4`; empty for the unit monomial.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.pi == 1 {
            parts.push("pi".to_string());
        } else if self.pi != 0 {
            parts.push(format!("pi^{}", self.pi));
        }
        for g in Generator::ALL {
            match self.exps[g.index()] {
                0 => {}
                1 => parts.push(g.name().to_string()),
                e => parts.push(format!("{}^{e}", g.name())),
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// A Laurent polynomial in `π` and a polynomial in the generators, with
/// exact Gaussian-rational coefficients. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn generator(g: Generator) -> Self {
        Poly::term(Monomial::generator(g), Coeff::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The coefficient, if this is a constant (no generators, no `π`).
    pub fn as_constant(&self) -> Option<&Coeff> {
        match self.terms.len() {
            0 => None,
            1 => self.terms.get(&Monomial::one()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// The term with the largest monomial in the fixed order.
    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    /// Exact division by a monomial dividing every term.
    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.terms {
            out.insert(k.div(m)?, c.clone());
        }
        Some(Poly { terms: out })
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Largest monomial dividing every term (`π` exponent the minimum).
    pub fn monomial_content(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |acc, m| acc.gcd(m)))
    }

    /// Partial derivative with respect to one generator, treating the others as independent.
    pub fn partial(&self, g: Generator) -> Poly {
        let idx = g.index();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exps[idx];
            if e == 0 {
                continue;
            }
            let mut lowered = *m;
            lowered.exps[idx] -= 1;
            out.add_term(lowered, c * &Coeff::from_int(e as i64));
        }
        out
    }

    /// Generators that occur in some term.
    pub fn generators(&self) -> Vec<Generator> {
        Generator::ALL
            .into_iter()
            .filter(|g| self.terms.keys().any(|m| m.exps[g.index()] > 0))
            .collect()
    }

    /// Value and the sum of absolute term values (for cancellation estimates).
    pub fn eval(&self, values: &[Complex64; Generator::COUNT]) -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for (m, c) in &self.terms {
            let t = c.to_complex() * m.eval(values);
            magnitude += t.norm();
            sum += t;
        }
        (sum, magnitude)
    }
}

/// One signed, parenthesized term: `(wp)`, `-(3*pi^2*E4)`, `(1/2 + I)`.
fn fmt_term(m: &Monomial, c: &Coeff, first: bool) -> String {
    let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
    let mono = m.to_string();
    let body = match (mag.is_one(), mono.is_empty()) {
        (true, true) => "1".to_string(),
        (true, false) => mono,
        (false, true) => mag.to_string(),
        (false, false) => format!("{mag}*{mono}"),
    };
    match (first, sign) {
        (true, "+") => format!("({body})"),
        (true, _) => format!("-({body})"),
        (false, s) => format!(" {s} ({body})"),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest monomials first
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            write!(f, "{}", fmt_term(m, c, i == 0))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(x: Generator) -> Poly {
        Poly::generator(x)
    }

    #[test]
    fn arithmetic_cancels_exactly() {
        let a = g(Generator::Wp).add(&g(Generator::E4).scale(&Coeff::ratio(1, 3)));
        let sq = a.mul(&a);
        let back = sq.sub(&a.mul(&a));
        assert!(back.is_zero());
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn partial_derivative_of_power() {
        let p = g(Generator::Wp).pow(3).scale(&Coeff::from_int(4));
        let d = p.partial(Generator::Wp);
        assert_eq!(d, g(Generator::Wp).pow(2).scale(&Coeff::from_int(12)));
        assert!(p.partial(Generator::Zeta).is_zero());
    }

    #[test]
    fn monomial_content_and_division() {
        let p = g(Generator::Wp)
            .pow(2)
            .mul(&g(Generator::Z))
            .add(&g(Generator::Wp).mul_monomial(&Monomial::pi_power(-2)));
        let content = p.monomial_content().unwrap();
        assert_eq!(content.exps[Generator::Wp.index()], 1);
        assert_eq!(content.pi, -2);
        let q = p.div_monomial(&content).unwrap();
        assert_eq!(q.mul_monomial(&content), p);
    }

    #[test]
    fn display() {
        let p = g(Generator::Wp).neg();
        assert_eq!(p.to_string(), "-(wp)");
        let q = g(Generator::E4)
            .pow(3)
            .sub(&g(Generator::E6).pow(2))
            .mul_monomial(&Monomial::pi_power(2));
        assert_eq!(q.to_string(), "(pi^2*E4^3) - (pi^2*E6^2)");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::one().to_string(), "(1)");
    }

    #[test]
    fn evaluation() {
        let mut vals = [Complex64::new(0.0, 0.0); Generator::COUNT];
        vals[Generator::Wp.index()] = Complex64::new(2.0, 0.0);
        let p = g(Generator::Wp).pow(2).mul_monomial(&Monomial::pi_power(1)).add(&Poly::one());
        let (v, mag) = p.eval(&vals);
        assert!((v.re - (4.0 * PI + 1.0)).abs() < 1e-12);
        assert!((mag - (4.0 * PI + 1.0)).abs() < 1e-12);
    }
}
