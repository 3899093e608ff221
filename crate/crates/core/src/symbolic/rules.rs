//! The derivative table of the generators and the differentiation of
//! arbitrary expressions by the chain and quotient rules.
//!
//! ```text
//! ∂z/∂z = 1,  ∂℘/∂z = ℘′,  ∂℘′/∂z = 6℘² − g₂/2,  ∂ζ/∂z = −℘
//! ∂E₂/∂τ = 2πi (E₂² − E₄)/12
//! ∂E₄/∂τ = 2πi (E₂E₄ − E₆)/3
//! ∂E₆/∂τ = 2πi (E₂E₆ − E₄²)/2
//! ∂F/∂τ  = ∂F/∂g₂ · ∂g₂/∂τ + ∂F/∂g₃ · ∂g₃/∂τ      (F = ℘, ζ)
//! ∂℘′/∂τ = ∂/∂z (∂℘/∂τ)
//! ```
//!
//! with, writing `Δ = g₂³ − 27g₃²`,
//!
//! ```text
//! Δ ∂℘/∂g₃ = (3g₂ζ − 9g₃z/2)℘′ + 6g₂℘² − 9g₃℘ − g₂²
//! Δ ∂℘/∂g₂ = (−9g₃ζ/2 + g₂²z/4)℘′ − 9g₃℘² + g₂²℘/2 + 3g₂g₃/2
//! Δ ∂ζ/∂g₃ = −3ζ(g₂℘ + 3g₃/2) + (z/2)(9g₃℘ + g₂²/2) − 3g₂℘′/2
//! Δ ∂ζ/∂g₂ = (ζ/2)(9g₃℘ + g₂²/2) − (g₂z/2)(g₂℘/2 + 3g₃/4) + 9g₃℘′/4
//! ```
//!
//! Every rational constant above is an entry of [`RuleTable`], so a test can
//! perturb one and watch the verification suite catch it.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::coeff::Coeff;
use super::expr::Expr;
use super::{DiffVar, Generator};
use crate::error::{Error, Result};

const DEFAULT_RULES: &[(&str, i64, i64)] = &[
    ("wp1_z.wp2", 6, 1),
    ("wp1_z.g2", -1, 2),
    ("zeta_z", -1, 1),
    ("ramanujan.e2", 1, 12),
    ("ramanujan.e4", 1, 3),
    ("ramanujan.e6", 1, 2),
    ("wp_g3.zeta", 3, 1),
    ("wp_g3.z", -9, 2),
    ("wp_g3.wp2", 6, 1),
    ("wp_g3.wp", -9, 1),
    ("wp_g3.const", -1, 1),
    ("wp_g2.zeta", -9, 2),
    ("wp_g2.z", 1, 4),
    ("wp_g2.wp2", -9, 1),
    ("wp_g2.wp", 1, 2),
    ("wp_g2.const", 3, 2),
    ("zeta_g3.zeta_wp", -3, 1),
    ("zeta_g3.zeta", -9, 2),
    ("zeta_g3.z_wp", 9, 2),
    ("zeta_g3.z", 1, 4),
    ("zeta_g3.wp1", -3, 2),
    ("zeta_g2.zeta_wp", 9, 2),
    ("zeta_g2.zeta", 1, 4),
    ("zeta_g2.z_wp", -1, 4),
    ("zeta_g2.z", -3, 8),
    ("zeta_g2.wp1", 9, 4),
];

/// Named rational constants of the derivative table.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    coeffs: BTreeMap<&'static str, BigRational>,
}

impl Default for RuleTable {
    fn default() -> Self {
        RuleTable {
            coeffs: DEFAULT_RULES
                .iter()
                .map(|&(name, p, q)| (name, BigRational::new(BigInt::from(p), BigInt::from(q))))
                .collect(),
        }
    }
}

impl RuleTable {
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn get(&self, name: &str) -> Option<&BigRational> {
        self.coeffs.get(name)
    }

    /// Replaces one constant; unknown names are rejected.
    pub fn set(&mut self, name: &str, value: BigRational) -> Result<()> {
        match self.coeffs.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Config(format!("no rule coefficient named {name:?}"))),
        }
    }

    fn c(&self, name: &str) -> Coeff {
        Coeff::real(self.coeffs[name].clone())
    }
}

/// Derivatives of the eight generators with respect to `z` and `τ`, fixed
/// at construction from a [`RuleTable`].
#[derive(Debug, Clone)]
pub struct Differentiator {
    rules: HashMap<(Generator, DiffVar), Expr>,
}

impl Default for Differentiator {
    fn default() -> Self {
        Differentiator::new(&RuleTable::default())
    }
}

impl Differentiator {
    pub fn new(table: &RuleTable) -> Self {
        use Generator::*;
        let g = Expr::gen;
        let mut d = Differentiator { rules: HashMap::new() };
        for gen in Generator::ALL {
            d.rules.insert((gen, DiffVar::Z), Expr::zero());
            d.rules.insert((gen, DiffVar::Tau), Expr::zero());
        }
        d.rules.insert((Z, DiffVar::Z), Expr::one());
        d.rules.insert((Tau, DiffVar::Tau), Expr::one());

        d.rules.insert((Wp, DiffVar::Z), g(Wp1));
        let wp1_z = g(Wp).powi(2).scale(&table.c("wp1_z.wp2")).add(&Expr::g2().scale(&table.c("wp1_z.g2")));
        d.rules.insert((Wp1, DiffVar::Z), wp1_z);
        d.rules.insert((Zeta, DiffVar::Z), g(Wp).scale(&table.c("zeta_z")));

        let two_pi_i = Expr::pi_power(1).mul(&Expr::i()).scale(&Coeff::from_int(2));
        let ramanujan = |name: &str, body: Expr| two_pi_i.mul(&body).scale(&table.c(name));
        d.rules.insert((E2, DiffVar::Tau), ramanujan("ramanujan.e2", g(E2).powi(2).sub(&g(E4))));
        d.rules.insert((E4, DiffVar::Tau), ramanujan("ramanujan.e4", g(E2).mul(&g(E4)).sub(&g(E6))));
        d.rules.insert((E6, DiffVar::Tau), ramanujan("ramanujan.e6", g(E2).mul(&g(E6)).sub(&g(E4).powi(2))));

        let (g2, g3) = (Expr::g2(), Expr::g3());
        let dg2 = d.differentiate(&g2, DiffVar::Tau);
        let dg3 = d.differentiate(&g3, DiffVar::Tau);
        let delta = Expr::delta();
        let (wp, wp1, zeta, z) = (g(Wp), g(Wp1), g(Zeta), g(Z));
        let sum = |terms: Vec<(&str, Expr)>| {
            terms
                .into_iter()
                .fold(Expr::zero(), |acc, (name, e)| acc.add(&e.scale(&table.c(name))))
        };

        let wp_g3 = sum(vec![
            ("wp_g3.zeta", g2.mul(&zeta).mul(&wp1)),
            ("wp_g3.z", g3.mul(&z).mul(&wp1)),
            ("wp_g3.wp2", g2.mul(&wp.powi(2))),
            ("wp_g3.wp", g3.mul(&wp)),
            ("wp_g3.const", g2.powi(2)),
        ]);
        let wp_g2 = sum(vec![
            ("wp_g2.zeta", g3.mul(&zeta).mul(&wp1)),
            ("wp_g2.z", g2.powi(2).mul(&z).mul(&wp1)),
            ("wp_g2.wp2", g3.mul(&wp.powi(2))),
            ("wp_g2.wp", g2.powi(2).mul(&wp)),
            ("wp_g2.const", g2.mul(&g3)),
        ]);
        let zeta_g3 = sum(vec![
            ("zeta_g3.zeta_wp", g2.mul(&zeta).mul(&wp)),
            ("zeta_g3.zeta", g3.mul(&zeta)),
            ("zeta_g3.z_wp", g3.mul(&z).mul(&wp)),
            ("zeta_g3.z", g2.powi(2).mul(&z)),
            ("zeta_g3.wp1", g2.mul(&wp1)),
        ]);
        let zeta_g2 = sum(vec![
            ("zeta_g2.zeta_wp", g3.mul(&zeta).mul(&wp)),
            ("zeta_g2.zeta", g2.powi(2).mul(&zeta)),
            ("zeta_g2.z_wp", g2.powi(2).mul(&z).mul(&wp)),
            ("zeta_g2.z", g2.mul(&g3).mul(&z)),
            ("zeta_g2.wp1", g3.mul(&wp1)),
        ]);
        let chain = |by_g2: Expr, by_g3: Expr| {
            by_g2
                .mul(&dg2)
                .add(&by_g3.mul(&dg3))
                .div(&delta)
                .expect("the discriminant is a nonzero polynomial")
        };
        let wp_tau = chain(wp_g2, wp_g3);
        let zeta_tau = chain(zeta_g2, zeta_g3);
        let wp1_tau = d.differentiate(&wp_tau, DiffVar::Z);
        d.rules.insert((Wp, DiffVar::Tau), wp_tau);
        d.rules.insert((Zeta, DiffVar::Tau), zeta_tau);
        d.rules.insert((Wp1, DiffVar::Tau), wp1_tau);
        d
    }

    /// The derivative of a single generator.
    pub fn rule(&self, g: Generator, v: DiffVar) -> &Expr {
        &self.rules[&(g, v)]
    }

    /// Exact derivative of `e`; the result is again a rational function of the generators.
    pub fn differentiate(&self, e: &Expr, v: DiffVar) -> Expr {
        let num = e.numerator();
        let den = e.denominator();
        let d_num = self.differentiate_poly(num, v);
        if den.is_one() {
            return d_num;
        }
        let den_expr = Expr::from_poly(den.clone());
        let d_den = self.differentiate_poly(den, v);
        if d_den.is_zero() {
            return d_num.div(&den_expr).expect("denominator is nonzero");
        }
        let num_expr = Expr::from_poly(num.clone());
        d_num
            .mul(&den_expr)
            .sub(&num_expr.mul(&d_den))
            .div(&den_expr.powi(2))
            .expect("denominator is nonzero")
    }

    fn differentiate_poly(&self, p: &super::poly::Poly, v: DiffVar) -> Expr {
        let mut acc = Expr::zero();
        for g in p.generators() {
            let rule = self.rule(g, v);
            if rule.is_zero() {
                continue;
            }
            acc = acc.add(&Expr::from_poly(p.partial(g)).mul(rule));
        }
        acc
    }
}

fn default_differentiator() -> &'static Differentiator {
    static CELL: OnceLock<Differentiator> = OnceLock::new();
    CELL.get_or_init(Differentiator::default)
}

/// Derivative with the standard table.
pub fn differentiate(e: &Expr, v: DiffVar) -> Expr {
    default_differentiator().differentiate(e, v)
}
