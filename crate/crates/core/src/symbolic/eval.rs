use num_complex::Complex64;

use super::expr::Expr;
use super::rules::Differentiator;
use super::{DiffVar, Generator};
use crate::error::{Error, Result};
use crate::numerics::UpperHalfPoint;
use crate::weierstrass::Engine;

/// Values of the generators that occur in `needed`; the others are left as NaN.
pub fn generator_values(
    engine: &Engine,
    needed: &[Generator],
    tau: UpperHalfPoint,
    z: Complex64,
) -> Result<[Complex64; Generator::COUNT]> {
    let mut vals = [Complex64::new(f64::NAN, f64::NAN); Generator::COUNT];
    let wants = |g: Generator| needed.contains(&g);
    if wants(Generator::Z) {
        vals[Generator::Z.index()] = z;
    }
    if wants(Generator::Tau) {
        vals[Generator::Tau.index()] = tau.value();
    }
    if wants(Generator::Wp) {
        vals[Generator::Wp.index()] = engine.wp_anywhere(tau, z)?.value;
    }
    if wants(Generator::Wp1) {
        vals[Generator::Wp1.index()] = engine.wp_prime_anywhere(tau, z)?.value;
    }
    if wants(Generator::Zeta) {
        vals[Generator::Zeta.index()] = engine.zeta_anywhere(tau, z)?.value;
    }
    if [Generator::E2, Generator::E4, Generator::E6].iter().any(|&g| wants(g)) {
        let e = engine.eisenstein_anywhere(tau)?;
        vals[Generator::E2.index()] = e.e2;
        vals[Generator::E4.index()] = e.e4;
        vals[Generator::E6.index()] = e.e6;
    }
    Ok(vals)
}

/// Numeric value of `e` at `(τ, z)`.
pub fn eval_expr(engine: &Engine, e: &Expr, tau: UpperHalfPoint, z: Complex64) -> Result<Complex64> {
    let vals = generator_values(engine, &e.generators(), tau, z)?;
    e.eval(&vals)
}

/// Relative gap between the symbolic derivative and a Richardson-extrapolated
/// central difference with step `h ∈ [1e-6, 1e-3]`:
/// `|fd − exact| / max(1, |exact|)`.
pub fn fd_check(
    engine: &Engine,
    diff: &Differentiator,
    e: &Expr,
    v: DiffVar,
    tau: UpperHalfPoint,
    z: Complex64,
    h: f64,
) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidPolicy(format!("finite-difference step {h} outside [1e-6, 1e-3]")));
    }
    let exact = eval_expr(engine, &diff.differentiate(e, v), tau, z)?;
    let at = |delta: f64| -> Result<Complex64> {
        match v {
            DiffVar::Z => eval_expr(engine, e, tau, z + delta),
            DiffVar::Tau => eval_expr(engine, e, UpperHalfPoint::new(tau.value() + delta)?, z),
        }
    };
    let central = |step: f64| -> Result<Complex64> { Ok((at(step)? - at(-step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    let richardson = (fine * 4.0 - coarse) / 3.0;
    Ok((richardson - exact).norm() / exact.norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse_expr;

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn generator_binding_is_exact() {
        let e = Engine::default();
        let t = UpperHalfPoint::i();
        let z = Complex64::new(0.3, 0.2);
        assert_eq!(eval_expr(&e, &p("wp"), t, z).unwrap(), e.wp_anywhere(t, z).unwrap().value);
    }

    #[test]
    fn ode_evaluates_to_zero() {
        let e = Engine::default();
        let ode = p("4*wp^3 - g2*wp - g3 - wp1^2");
        for (t, z) in [(UpperHalfPoint::i(), Complex64::new(0.3, 0.2)), (UpperHalfPoint::rho(), Complex64::new(0.1, 0.4))] {
            assert!(eval_expr(&e, &ode, t, z).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn discriminant_at_i() {
        let e = Engine::default();
        let t = UpperHalfPoint::i();
        let z = Complex64::new(0.3, 0.0);
        let delta = eval_expr(&e, &p("Delta"), t, z).unwrap();
        let g2 = eval_expr(&e, &p("g2"), t, z).unwrap();
        assert!((delta - g2.powi(3)).norm() < 1e-9 * delta.norm());
    }

    #[test]
    fn finite_differences() {
        let e = Engine::default();
        let d = Differentiator::default();
        let t = UpperHalfPoint::i();
        let z = Complex64::new(0.4, 0.3);
        assert!(fd_check(&e, &d, &p("wp"), DiffVar::Z, t, z, 1e-4).unwrap() < 1e-6);
        assert!(fd_check(&e, &d, &p("wp"), DiffVar::Tau, t, z, 1e-4).unwrap() < 1e-5);
        let t = UpperHalfPoint::from_parts(0.0, 1.1).unwrap();
        assert!(fd_check(&e, &d, &p("E2"), DiffVar::Tau, t, z, 1e-4).unwrap() < 1e-6);
        assert!(fd_check(&e, &d, &p("wp"), DiffVar::Z, t, z, 1.0).is_err());
    }
}
