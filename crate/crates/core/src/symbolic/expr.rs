use std::fmt;

use num_complex::Complex64;

use super::coeff::Coeff;
use super::poly::{Monomial, Poly};
use super::Generator;
use crate::error::{Error, Result};

/// Denominators smaller than this in magnitude refuse to evaluate.
pub const SINGULAR_DENOMINATOR: f64 = 1e-12;

/// A rational function `num/den` over the generators.
///
/// Kept in a light normal form: the common monomial factor of numerator and
/// denominator is cancelled, the lowest power of `π` in the denominator is
/// `π⁰`, the denominator's leading coefficient is 1, and
/// a numerator that is a constant multiple of the denominator collapses to
/// that constant. Equal normal forms imply equal functions; the converse
/// does not hold, since no polynomial gcd is taken.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    pub fn from_poly(p: Poly) -> Expr {
        Expr::normalized(p, Poly::one())
    }

    /// `num/den`; fails when `den` is the zero polynomial.
    pub fn ratio(num: Poly, den: Poly) -> Result<Expr> {
        if den.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(Expr::normalized(num, den))
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Expr {
        Expr::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Coeff::from_int(n))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::constant(Coeff::ratio(num, den))
    }

    pub fn i() -> Expr {
        Expr::constant(Coeff::i())
    }

    pub fn pi_power(k: i32) -> Expr {
        Expr::from_poly(Poly::term(Monomial::pi_power(k), Coeff::one()))
    }

    pub fn gen(g: Generator) -> Expr {
        Expr::from_poly(Poly::generator(g))
    }

    /// `g₂ = (4π⁴/3)·E₄`.
    pub fn g2() -> Expr {
        Expr::from_poly(Poly::term(
            Monomial::generator(Generator::E4).mul(&Monomial::pi_power(4)),
            Coeff::ratio(4, 3),
        ))
    }

    /// `g₃ = (8π⁶/27)·E₆`.
    pub fn g3() -> Expr {
        Expr::from_poly(Poly::term(
            Monomial::generator(Generator::E6).mul(&Monomial::pi_power(6)),
            Coeff::ratio(8, 27),
        ))
    }

    /// `Δ = g₂³ − 27g₃²`.
    pub fn delta() -> Expr {
        Expr::g2().powi(3).sub(&Expr::g3().powi(2).scale(&Coeff::from_int(27)))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Total number of stored terms, a rough size measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    /// Generators occurring in numerator or denominator.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = self.num.generators();
        for g in self.den.generators() {
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out.sort();
        out
    }

    fn normalized(mut num: Poly, mut den: Poly) -> Expr {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Expr { num, den: Poly::one() };
        }
        // common generator factor, and all powers of π moved to the numerator
        let den_content = den.monomial_content().unwrap_or_default();
        let mut content = num.monomial_content().unwrap_or_default().gcd(&den_content);
        content.pi = den_content.pi;
        if !content.is_one() {
            num = num.div_monomial(&content).expect("content divides numerator");
            den = den.div_monomial(&content).expect("content divides denominator");
        }
        let (lead_m, lead_c) = den.leading().map(|(m, c)| (*m, c.clone())).expect("nonzero denominator");
        if !lead_c.is_one() {
            let inv = lead_c.inv().expect("nonzero leading coefficient");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if !den.is_one() {
            if let Some((&num_m, num_c)) = num.leading() {
                if num_m == lead_m && num.len() == den.len() {
                    let k = num_c.clone();
                    if den.scale(&k) == num {
                        return Expr { num: Poly::constant(k), den: Poly::one() };
                    }
                }
            }
        }
        Expr { num, den }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.den == other.den {
            return Expr::normalized(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Expr::normalized(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Expr {
        Expr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        Expr::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        Expr::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn recip(&self) -> Result<Expr> {
        Expr::ratio(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        Ok(self.mul(&other.recip()?))
    }

    /// Nonnegative integer power.
    pub fn powi(&self, n: u32) -> Expr {
        Expr::normalized(self.num.pow(n), self.den.pow(n))
    }

    /// Integer power; negative exponents fail on the zero expression.
    pub fn pow(&self, n: i64) -> Result<Expr> {
        let e = u32::try_from(n.unsigned_abs()).map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("exponent {n} too large"),
        })?;
        if n >= 0 {
            Ok(self.powi(e))
        } else {
            self.recip().map(|r| r.powi(e))
        }
    }

    /// Numeric value given the value of every generator.
    pub fn eval(&self, values: &[Complex64; Generator::COUNT]) -> Result<Complex64> {
        let (d, _) = self.den.eval(values);
        if d.norm() < SINGULAR_DENOMINATOR {
            return Err(Error::NearSingular { magnitude: d.norm() });
        }
        let (n, _) = self.num.eval(values);
        crate::numerics::ensure_finite(n / d, "eval_expr")
    }
}

/// Fully parenthesized infix: `-(wp)`, `(6*wp^2) - (2/3*pi^4*E4)`,
/// `((wp) + (z))/((E4^3) - (E6^2))`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| if p.len() > 1 { format!("({p})") } else { p.to_string() };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp() -> Expr {
        Expr::gen(Generator::Wp)
    }

    #[test]
    fn normal_form_cancels_common_monomials_and_constants() {
        let e = wp().powi(2).div(&wp()).unwrap();
        assert_eq!(e, wp());
        let e = wp().scale(&Coeff::from_int(3)).div(&wp()).unwrap();
        assert_eq!(e, Expr::int(3));
        let s = wp().add(&Expr::gen(Generator::Z));
        assert_eq!(s.scale(&Coeff::from_int(2)).div(&s).unwrap(), Expr::int(2));
        assert!(wp().sub(&wp()).is_zero());
    }

    #[test]
    fn denominator_is_monic() {
        let e = Expr::one().div(&Expr::delta()).unwrap();
        assert_eq!(e.denominator().leading().unwrap().1, &Coeff::one());
        assert_eq!(e.denominator().len(), 2);
        assert!(e.denominator().terms().all(|(m, _)| m.pi == 0));
    }

    #[test]
    fn delta_in_terms_of_e4_e6() {
        // Δ = (64π¹²/27)(E₄³ − E₆²)
        let e4 = Expr::gen(Generator::E4);
        let e6 = Expr::gen(Generator::E6);
        let expected = e4.powi(3).sub(&e6.powi(2)).mul(&Expr::pi_power(12)).scale(&Coeff::ratio(64, 27));
        assert_eq!(Expr::delta(), expected);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(wp().div(&Expr::zero()), Err(Error::ZeroArgument));
        assert!(Expr::zero().pow(-1).is_err());
    }

    #[test]
    fn display_forms() {
        assert_eq!(wp().neg().to_string(), "-(wp)");
        let q = wp().add(&Expr::gen(Generator::Z)).div(&Expr::gen(Generator::E4)).unwrap();
        assert_eq!(q.to_string(), "((z) + (wp))/(E4)");
        assert_eq!(Expr::zero().to_string(), "0");
    }

    #[test]
    fn evaluation_refuses_small_denominators() {
        let mut vals = [Complex64::new(1.0, 0.0); Generator::COUNT];
        vals[Generator::Wp.index()] = Complex64::new(1e-13, 0.0);
        let e = Expr::one().div(&wp()).unwrap();
        assert!(matches!(e.eval(&vals), Err(Error::NearSingular { .. })));
        vals[Generator::Wp.index()] = Complex64::new(0.5, 0.0);
        assert!((e.eval(&vals).unwrap().re - 2.0).abs() < 1e-15);
    }
}
