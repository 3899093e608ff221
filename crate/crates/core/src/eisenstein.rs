//! Normalized Eisenstein series `E₂, E₄, E₆` from their divisor-sum
//! q-expansions, the lattice invariants derived from them, and the direct
//! lattice-sum oracles.
//!
//! Conventions: `E_{2k}` here is normalized to constant term 1. The full
//! lattice sums `Σ' (m + nτ)^{-2k}` equal `2ζ(2k)·E_{2k}`, so
//! `g₂ = 60·Σ' ω⁻⁴ = (4π⁴/3)·E₄` and `g₃ = 140·Σ' ω⁻⁶ = (8π⁶/27)·E₆`.
//! `G₂ = ζ(2)·E₂` is the quasimodular weight-2 form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_sum::{shell_sum, LatticeSum};
use crate::numerics::{ensure_finite, UpperHalfPoint};

/// Leading coefficients of the divisor-sum expansions
/// `E_{2k} = 1 + c_{2k}·Σ σ_{2k−1}(n) qⁿ`.
pub const E2_COEFF: i64 = -24;
pub const E4_COEFF: i64 = 240;
pub const E6_COEFF: i64 = -504;

/// Smallest `Im τ` accepted by the q-expansions.
pub const MIN_IM_TAU: f64 = 0.1;

pub(crate) const ZETA2: f64 = PI * PI / 6.0;

pub fn g2_scale() -> f64 {
    4.0 * PI.powi(4) / 3.0
}

pub fn g3_scale() -> f64 {
    8.0 * PI.powi(6) / 27.0
}

/// `σ_k(n)` for `n = 0..=order` by divisor enumeration (entry 0 is unused).
pub fn divisor_sums(k: u32, order: usize) -> Vec<i128> {
    let mut table = vec![0i128; order + 1];
    for d in 1..=order {
        let power = (d as i128).pow(k);
        for multiple in (d..=order).step_by(d) {
            table[multiple] += power;
        }
    }
    table
}

/// Integer q-expansion coefficients `[1, c·σ(1), …, c·σ(order)]` of a normalized Eisenstein series.
pub fn eisenstein_coefficients(weight: EisensteinWeight, order: usize) -> Vec<i128> {
    let (k, c) = weight.divisor_params();
    let sigma = divisor_sums(k, order);
    let mut out = Vec::with_capacity(order + 1);
    out.push(1);
    out.extend(sigma[1..].iter().map(|s| c as i128 * s));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EisensteinWeight {
    Two,
    Four,
    Six,
}

impl EisensteinWeight {
    pub fn weight(self) -> i32 {
        match self {
            EisensteinWeight::Two => 2,
            EisensteinWeight::Four => 4,
            EisensteinWeight::Six => 6,
        }
    }

    fn divisor_params(self) -> (u32, i64) {
        match self {
            EisensteinWeight::Two => (1, E2_COEFF),
            EisensteinWeight::Four => (3, E4_COEFF),
            EisensteinWeight::Six => (5, E6_COEFF),
        }
    }

    /// `2ζ(2k)`: full lattice sum divided by the normalized series.
    pub fn full_sum_scale(self) -> f64 {
        match self {
            EisensteinWeight::Two => PI * PI / 3.0,
            EisensteinWeight::Four => PI.powi(4) / 45.0,
            EisensteinWeight::Six => 2.0 * PI.powi(6) / 945.0,
        }
    }
}

/// Truncation order of the q-expansions with a tail estimate.
///
/// The divisor sums satisfy `|c_{2k}|·σ_{2k−1}(n) ≤ 504·n⁶`, so for `|q| = r`
/// the tail past `N` is at most `504(N+1)⁶ r^{N+1} / (1 − ρ)` with
/// `ρ = ((N+2)/(N+1))⁶ r`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTruncation {
    order: usize,
    tail_bound: f64,
    sigma1: Vec<f64>,
    sigma3: Vec<f64>,
    sigma5: Vec<f64>,
}

impl Default for QTruncation {
    fn default() -> Self {
        QTruncation::new(Self::DEFAULT_ORDER)
    }
}

impl QTruncation {
    pub const DEFAULT_ORDER: usize = 40;

    pub fn new(order: usize) -> Self {
        let order = order.max(1);
        let to_f64 = |v: Vec<i128>| v.into_iter().map(|s| s as f64).collect::<Vec<_>>();
        let mut t = QTruncation {
            order,
            tail_bound: 0.0,
            sigma1: to_f64(divisor_sums(1, order)),
            sigma3: to_f64(divisor_sums(3, order)),
            sigma5: to_f64(divisor_sums(5, order)),
        };
        t.tail_bound = t.tail_bound_at(crate::numerics::delta());
        t
    }

    /// Smallest order whose tail bound at `|q| = q_abs` is below `target`.
    pub fn for_nome(q_abs: f64, target: f64) -> Self {
        let mut order = Self::DEFAULT_ORDER;
        let probe = |n: usize| tail_estimate(n, q_abs);
        while probe(order) > target && order < 20_000 {
            order += order / 2;
        }
        QTruncation::new(order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Tail bound valid throughout `|q| ≤ e^{−2π√3/2}`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tail_bound_at(&self, q_abs: f64) -> f64 {
        tail_estimate(self.order, q_abs)
    }
}

fn tail_estimate(order: usize, r: f64) -> f64 {
    let n1 = order as f64 + 1.0;
    let rho = ((n1 + 1.0) / n1).powi(6) * r;
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    504.0 * (6.0 * n1.ln() + (n1 * r.ln())).exp() / (1.0 - rho)
}

/// Normalized `E₂, E₄, E₆` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EisensteinValues {
    pub e2: Complex64,
    pub e4: Complex64,
    pub e6: Complex64,
}

/// `g₂, g₃, Δ = g₂³ − 27g₃²` and the quasi-period `η₁ = η(1) = (π²/3)·E₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeInvariants {
    pub g2: Complex64,
    pub g3: Complex64,
    pub delta: Complex64,
    pub eta1: Complex64,
}

impl LatticeInvariants {
    pub fn from_eisenstein(e: &EisensteinValues) -> Self {
        let g2 = e.e4 * g2_scale();
        let g3 = e.e6 * g3_scale();
        LatticeInvariants {
            g2,
            g3,
            delta: g2 * g2 * g2 - g3 * g3 * 27.0,
            eta1: e.e2 * (PI * PI / 3.0),
        }
    }
}

fn check_convergence(tau: UpperHalfPoint) -> Result<()> {
    if tau.im() < MIN_IM_TAU {
        Err(Error::ConvergenceDomain(format!(
            "Im(tau) = {} is below {MIN_IM_TAU}; reduce tau first",
            tau.im()
        )))
    } else {
        Ok(())
    }
}

/// Horner evaluation of `Σ_{n=1}^{N} c_n qⁿ`.
fn lambert_tail(coeffs: &[f64], q: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        acc = (acc + c) * q;
    }
    acc
}

pub fn eisenstein_at(tau: UpperHalfPoint, trunc: &QTruncation) -> Result<EisensteinValues> {
    check_convergence(tau)?;
    let q = tau.nome();
    let values = EisensteinValues {
        e2: lambert_tail(&trunc.sigma1, q) * E2_COEFF as f64 + 1.0,
        e4: lambert_tail(&trunc.sigma3, q) * E4_COEFF as f64 + 1.0,
        e6: lambert_tail(&trunc.sigma5, q) * E6_COEFF as f64 + 1.0,
    };
    ensure_finite(values.e2 + values.e4 + values.e6, "eisenstein_at")?;
    Ok(values)
}

pub fn invariants_at(tau: UpperHalfPoint, trunc: &QTruncation) -> Result<LatticeInvariants> {
    Ok(LatticeInvariants::from_eisenstein(&eisenstein_at(tau, trunc)?))
}

/// `Δ = (2π)¹² q Π (1 − qⁿ)²⁴`, an independent route to the discriminant.
pub fn discriminant_product(tau: UpperHalfPoint, terms: usize) -> Complex64 {
    let q = tau.nome();
    let mut prod = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 0..terms {
        qn *= q;
        prod *= (Complex64::new(1.0, 0.0) - qn).powi(24);
    }
    q * prod * (2.0 * PI).powi(12)
}

/// Full lattice sum `Σ' (m + nτ)^{-2k}`, unnormalized.
///
/// For weight 4 and 6 the sum runs over square shells up to `radius` and is
/// extrapolated in the radius. Weight 2 is only conditionally convergent: the
/// sum over `n` is taken first, in closed form
/// `Σ_n (mτ + n)^{-2} = π²/sin²(πmτ)`, then over `|m| ≤ radius`. Radii below
/// 10 are raised to 10.
pub fn lattice_sum_e(tau: UpperHalfPoint, weight: EisensteinWeight, radius: u32) -> Complex64 {
    lattice_sum_e_detailed(tau, weight, radius).accelerated
}

pub fn lattice_sum_e_detailed(tau: UpperHalfPoint, weight: EisensteinWeight, radius: u32) -> LatticeSum {
    let radius = radius.max(10);
    match weight {
        EisensteinWeight::Two => {
            let t = tau.value();
            let mut total = Complex64::new(PI * PI / 3.0, 0.0);
            for m in 1..=radius {
                // beyond this the terms are below e^{-700}
                if m as f64 * PI * tau.im() > 350.0 {
                    break;
                }
                let s = (t * (PI * m as f64)).sin();
                total += 2.0 * PI * PI / (s * s);
            }
            LatticeSum {
                radius,
                raw: total,
                accelerated: total,
            }
        }
        EisensteinWeight::Four => shell_sum(tau, radius, |w| w.powi(-4)),
        EisensteinWeight::Six => shell_sum(tau, radius, |w| w.powi(-6)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::from_parts(re, im).unwrap()
    }

    fn ev(t: UpperHalfPoint) -> EisensteinValues {
        eisenstein_at(t, &QTruncation::default()).unwrap()
    }

    #[test]
    fn divisor_sums_by_enumeration() {
        assert_eq!(divisor_sums(1, 10)[1..], [1, 3, 4, 7, 6, 12, 8, 15, 13, 18]);
        assert_eq!(divisor_sums(3, 4)[1..], [1, 9, 28, 73]);
        assert_eq!(divisor_sums(5, 3)[1..], [1, 33, 244]);
    }

    #[test]
    fn e2_series_coefficients() {
        assert_eq!(eisenstein_coefficients(EisensteinWeight::Two, 5), vec![1, -24, -72, -96, -168, -144]);
        assert_eq!(eisenstein_coefficients(EisensteinWeight::Four, 2), vec![1, 240, 2160]);
        assert_eq!(eisenstein_coefficients(EisensteinWeight::Six, 2), vec![1, -504, -16632]);
    }

    #[test]
    fn constant_terms_at_cusp() {
        let e = ev(tau(0.0, 40.0));
        for v in [e.e2, e.e4, e.e6] {
            assert!((v - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn special_values_at_elliptic_points() {
        let e = ev(UpperHalfPoint::i());
        assert!(e.e6.norm() < 1e-10, "E6(i) = {}", e.e6);
        assert!((e.e2 - 3.0 / PI).norm() < 1e-10, "E2(i) = {}", e.e2);
        let e = ev(UpperHalfPoint::rho());
        assert!(e.e4.norm() < 1e-10, "E4(rho) = {}", e.e4);
    }

    #[test]
    fn invariants_at_i() {
        let inv = invariants_at(UpperHalfPoint::i(), &QTruncation::default()).unwrap();
        assert!(inv.g3.norm() < 1e-10);
        assert!((inv.eta1 - PI).norm() < 1e-10);
        assert!((inv.delta - inv.g2.powi(3)).norm() < 1e-9 * inv.delta.norm());
    }

    #[test]
    fn discriminant_agrees_with_product_formula() {
        for t in [tau(0.0, 1.0), tau(-0.3, 0.97), tau(0.41, 1.7), tau(0.1, 3.0)] {
            let inv = invariants_at(t, &QTruncation::default()).unwrap();
            let prod = discriminant_product(t, 60);
            // g2³ − 27g3² cancels heavily once Im τ grows
            let err = (inv.delta - prod).norm() / inv.g2.norm().powi(3);
            assert!(err <= 1e-13, "{t:?}: {err:e}");
            assert!(prod.norm() > 0.0);
        }
    }

    #[test]
    fn rejects_tau_near_real_axis() {
        assert!(matches!(
            eisenstein_at(tau(0.0, 0.05), &QTruncation::default()),
            Err(Error::ConvergenceDomain(_))
        ));
    }

    #[test]
    fn tail_bound_is_negligible_on_fundamental_domain() {
        let t = QTruncation::default();
        assert!(t.tail_bound() < 1e-80);
        assert!(QTruncation::new(5).tail_bound_at(0.5) > 1e-3);
        let adaptive = QTruncation::for_nome(0.3, 1e-17);
        assert!(adaptive.tail_bound_at(0.3) <= 1e-17);
    }

    #[test]
    fn periodicity_in_tau() {
        for t in [tau(0.2, 1.0), tau(-0.45, 0.9), tau(0.0, 2.5)] {
            let a = ev(t);
            let b = ev(tau(t.re() + 1.0, t.im()));
            assert!((a.e2 - b.e2).norm() < 1e-14);
            assert!((a.e4 - b.e4).norm() < 1e-13);
            assert!((a.e6 - b.e6).norm() < 1e-13);
        }
    }

    #[test]
    fn lattice_oracle_confirms_weight_four_at_i() {
        let t = UpperHalfPoint::i();
        let oracle = lattice_sum_e(t, EisensteinWeight::Four, 200);
        let series = ev(t).e4 * EisensteinWeight::Four.full_sum_scale();
        assert!((oracle - series).norm() / series.norm() < 1e-6);
    }

    #[test]
    fn lattice_oracle_confirms_weight_two_at_2i() {
        let t = tau(0.0, 2.0);
        let oracle = lattice_sum_e(t, EisensteinWeight::Two, 50);
        // the full sum is 2·G2 = 2ζ(2)·E2
        let series = ev(t).e2 * (2.0 * ZETA2);
        assert!((oracle - series).norm() < 1e-8);
    }

    #[test]
    fn lattice_oracle_confirms_weight_six_at_rho() {
        let t = UpperHalfPoint::rho();
        let oracle = lattice_sum_e(t, EisensteinWeight::Six, 200) / EisensteinWeight::Six.full_sum_scale();
        let series = ev(t).e6;
        assert!((oracle.norm() - series.norm()).abs() < 1e-5);
    }

    #[test]
    fn divisor_coefficients_confirmed_by_oracle() {
        // Before trusting −24, 240, −504: the lattice sums at three points must agree.
        for t in [UpperHalfPoint::i(), tau(0.0, 2.0), UpperHalfPoint::rho()] {
            let e = ev(t);
            for (w, series) in [
                (EisensteinWeight::Two, e.e2),
                (EisensteinWeight::Four, e.e4),
                (EisensteinWeight::Six, e.e6),
            ] {
                let oracle = lattice_sum_e(t, w, 200) / w.full_sum_scale();
                assert!((oracle - series).norm() < 1e-9, "{w:?} at {t:?}: {oracle} vs {series}");
            }
        }
    }
}
