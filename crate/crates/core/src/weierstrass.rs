//! `℘`, `℘′` and `ζ` from their q-series on the reduced domain, the
//! half-period values, and the direct lattice-sum oracles.
//!
//! With `q = e^{2πiτ}` and `u = e^{2πiz}`,
//!
//! ```text
//! ℘(τ;z) = (2πi)² [ Σ_{m∈ℤ} u qᵐ/(1 − u qᵐ)² + 1/12 − 2 Σ_{m≥1} qᵐ/(1 − qᵐ)² ]
//! ζ(τ;z) = 2πi [ Σ_{n≥0} −qⁿu/(1 − qⁿu) + Σ_{n≥1} qⁿu⁻¹/(1 − qⁿu⁻¹) − 1/2 ] + η₁ z
//! η₁     = (2πi)²/12 · [ −1 + 24 Σ_{n≥1} qⁿ/(1 − qⁿ)² ] = (π²/3)·E₂
//! ```
//!
//! Each term of the `m`-sum equals `π²/sin²(π(z + mτ))`, and each pair of
//! `n`-terms `π cot(π(z + nτ)) + π cot(π(z − nτ))`; close to the real axis
//! the trigonometric form is used, elsewhere the exponential one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eisenstein::{eisenstein_at, invariants_at, LatticeInvariants, QTruncation};
use crate::error::{Error, Result};
use crate::lattice_sum::{shell_sum, LatticeSum};
use crate::numerics::{ensure_finite, lattice_distance_local, TolerancePolicy, UpperHalfPoint, TWO_PI_I};

/// A function value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WValue {
    pub value: Complex64,
    pub est_error: f64,
}

/// `e₁ = ℘(1/2)`, `e₂ = ℘(τ/2)`, `e₃ = ℘((1+τ)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPeriodData {
    pub e1: Complex64,
    pub e2: Complex64,
    pub e3: Complex64,
}

impl HalfPeriodData {
    /// `g₂ = −4(e₁e₂ + e₁e₃ + e₂e₃)`.
    pub fn g2(&self) -> Complex64 {
        -(self.e1 * self.e2 + self.e1 * self.e3 + self.e2 * self.e3) * 4.0
    }

    /// `g₃ = 4e₁e₂e₃`.
    pub fn g3(&self) -> Complex64 {
        self.e1 * self.e2 * self.e3 * 4.0
    }
}

/// Evaluation context: tolerance policy and q-series truncation.
#[derive(Debug, Clone, Default)]
pub struct Engine {
    pub(crate) policy: TolerancePolicy,
    pub(crate) trunc: QTruncation,
}

impl Engine {
    pub fn new(policy: TolerancePolicy, trunc: QTruncation) -> Result<Self> {
        policy.validate()?;
        Ok(Engine { policy, trunc })
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    pub fn truncation(&self) -> &QTruncation {
        &self.trunc
    }

    /// `℘(τ; z)` by the q-series. `τ` should already be reduced and `z`
    /// must satisfy `|Im z| < Im τ` (true on the period cell).
    pub fn wp_q(&self, tau: UpperHalfPoint, z: Complex64) -> Result<WValue> {
        self.wp_series(tau, z, self.policy.pole_guard_radius)
    }

    /// `℘′(τ; z)` by the term-wise `z`-derivative of the `℘` series.
    pub fn wp_prime_q(&self, tau: UpperHalfPoint, z: Complex64) -> Result<WValue> {
        self.wp_prime_series(tau, z, self.policy.pole_guard_radius)
    }

    /// `ζ(τ; z)`; the linear term uses the given `z`, never one recovered from `u`.
    pub fn zeta_q(&self, tau: UpperHalfPoint, z: Complex64) -> Result<WValue> {
        self.zeta_series(tau, z, self.policy.pole_guard_radius)
    }

    pub fn half_periods(&self, tau: UpperHalfPoint) -> Result<HalfPeriodData> {
        let t = tau.value();
        let one = Complex64::new(1.0, 0.0);
        Ok(HalfPeriodData {
            e1: self.wp_q(tau, one * 0.5)?.value,
            e2: self.wp_q(tau, t * 0.5)?.value,
            e3: self.wp_q(tau, (t + one) * 0.5)?.value,
        })
    }

    /// `η₁ = (π²/3)·E₂` and the truncation's own tail bound.
    pub(crate) fn eta1(&self, tau: UpperHalfPoint) -> Result<(Complex64, f64)> {
        let e = eisenstein_at(tau, &self.trunc)?;
        let tail = self.trunc.tail_bound_at(tau.nome().norm()) * PI * PI / 3.0;
        Ok((e.e2 * (PI * PI / 3.0), tail))
    }

    pub fn invariants(&self, tau: UpperHalfPoint) -> Result<LatticeInvariants> {
        invariants_at(tau, &self.trunc)
    }

    fn check_domain(&self, tau: UpperHalfPoint, z: Complex64, guard: f64) -> Result<f64> {
        let q_abs = tau.nome().norm();
        if z.im.abs() >= tau.im() || q_abs >= 1.0 {
            return Err(Error::ConvergenceDomain(format!(
                "need |Im z| < Im tau for the q-series (Im z = {}, Im tau = {})",
                z.im,
                tau.im()
            )));
        }
        let dist = lattice_distance_local(tau, z);
        if dist < guard {
            return Err(Error::PoleProximity { distance: dist, radius: guard });
        }
        Ok(dist)
    }

    /// Geometric tail of the two-sided sum past `|m| = N`, for `|Im z| < Im τ`.
    fn two_sided_tail(&self, tau: UpperHalfPoint, z: Complex64, power: i32) -> f64 {
        let q_abs = tau.nome().norm();
        let n = self.trunc.order() as i32;
        let u_abs = (-2.0 * PI * z.im).exp();
        let worst = (u_abs.max(1.0 / u_abs) * q_abs.powi(n + 1)).min(1.0);
        let scale = (2.0 * PI).powi(power);
        2.0 * scale * worst / (1.0 - q_abs).powi(power + 1)
    }

    fn finish(&self, value: Complex64, tail: f64, magnitude: f64, dist: f64, order: i32, what: &'static str) -> Result<WValue> {
        let value = ensure_finite(value, what)?;
        let inflation = dist.powi(-order).max(1.0);
        let rounding = 8.0 * f64::EPSILON * magnitude.max(value.norm());
        Ok(WValue {
            value,
            est_error: ((tail + rounding) * inflation).max(self.policy.series_tail_bound),
        })
    }

    pub(crate) fn wp_series(&self, tau: UpperHalfPoint, z: Complex64, guard: f64) -> Result<WValue> {
        let dist = self.check_domain(tau, z, guard)?;
        let t = tau.value();
        let (eta1, eta_tail) = self.eta1(tau)?;
        let n = self.trunc.order() as i64;
        let mut sum = pi2_csc2(z);
        let mut magnitude = sum.norm();
        for m in 1..=n {
            let shift = t * m as f64;
            let a = pi2_csc2(z + shift);
            let b = pi2_csc2(z - shift);
            magnitude += a.norm() + b.norm();
            sum += a + b;
        }
        let tail = self.two_sided_tail(tau, z, 2) + eta_tail;
        self.finish(sum - eta1, tail, magnitude + eta1.norm(), dist, 2, "wp_q")
    }

    pub(crate) fn wp_prime_series(&self, tau: UpperHalfPoint, z: Complex64, guard: f64) -> Result<WValue> {
        let dist = self.check_domain(tau, z, guard)?;
        let t = tau.value();
        let n = self.trunc.order() as i64;
        let mut sum = d_pi2_csc2(z);
        let mut magnitude = sum.norm();
        for m in 1..=n {
            let shift = t * m as f64;
            let a = d_pi2_csc2(z + shift);
            let b = d_pi2_csc2(z - shift);
            magnitude += a.norm() + b.norm();
            sum += a + b;
        }
        let tail = self.two_sided_tail(tau, z, 3);
        self.finish(sum, tail, magnitude, dist, 3, "wp_prime_q")
    }

    pub(crate) fn zeta_series(&self, tau: UpperHalfPoint, z: Complex64, guard: f64) -> Result<WValue> {
        let dist = self.check_domain(tau, z, guard)?;
        let t = tau.value();
        let (eta1, eta_tail) = self.eta1(tau)?;
        let n = self.trunc.order() as i64;
        let mut sum = pi_cot(z);
        let mut magnitude = sum.norm();
        for k in 1..=n {
            let shift = t * k as f64;
            let pair = pi_cot_pair(z + shift, z - shift);
            magnitude += pair.norm();
            sum += pair;
        }
        let linear = eta1 * z;
        let tail = self.two_sided_tail(tau, z, 1) + eta_tail * z.norm();
        self.finish(sum + linear, tail, magnitude + linear.norm(), dist, 1, "zeta_q")
    }

    /// Slow oracle: `1/z² + Σ' [1/(z−ω)² − 1/ω²]` over `max(|m|,|n|) ≤ radius`
    /// (radius at least 50), extrapolated in the radius.
    pub fn wp_lattice_oracle(&self, tau: UpperHalfPoint, z: Complex64, radius: u32) -> Result<Complex64> {
        Ok(self.wp_lattice_oracle_detailed(tau, z, radius)?.accelerated)
    }

    pub fn wp_lattice_oracle_detailed(&self, tau: UpperHalfPoint, z: Complex64, radius: u32) -> Result<LatticeSum> {
        self.oracle_guard(tau, z)?;
        let mut s = shell_sum(tau, radius.max(50), |w| {
            let d = z - w;
            (d * d).inv() - (w * w).inv()
        });
        let principal = (z * z).inv();
        s.raw += principal;
        s.accelerated += principal;
        Ok(s)
    }

    /// Slow oracle: `1/z + Σ' [1/(z−ω) + 1/ω + z/ω²]`.
    pub fn zeta_lattice_oracle(&self, tau: UpperHalfPoint, z: Complex64, radius: u32) -> Result<Complex64> {
        Ok(self.zeta_lattice_oracle_detailed(tau, z, radius)?.accelerated)
    }

    pub fn zeta_lattice_oracle_detailed(&self, tau: UpperHalfPoint, z: Complex64, radius: u32) -> Result<LatticeSum> {
        self.oracle_guard(tau, z)?;
        let mut s = shell_sum(tau, radius.max(50), |w| {
            let wi = w.inv();
            (z - w).inv() + wi + z * wi * wi
        });
        let principal = z.inv();
        s.raw += principal;
        s.accelerated += principal;
        Ok(s)
    }

    fn oracle_guard(&self, tau: UpperHalfPoint, z: Complex64) -> Result<()> {
        let dist = crate::reduction::lattice_distance(tau, z)?;
        if dist < self.policy.pole_guard_radius {
            Err(Error::PoleProximity {
                distance: dist,
                radius: self.policy.pole_guard_radius,
            })
        } else {
            Ok(())
        }
    }
}

/// `℘₀(q; u)`, the `℘` series written literally in the variables `q`, `u`.
pub fn wp0(q: Complex64, u: Complex64, order: usize) -> Result<Complex64> {
    check_qu(q, u)?;
    let one = Complex64::new(1.0, 0.0);
    let term = |x: Complex64| x / ((one - x) * (one - x));
    let mut bracket = term(u) + 1.0 / 12.0;
    let (mut qm, mut qm_inv_pair) = (one, one);
    for _ in 1..=order {
        qm *= q;
        qm_inv_pair *= q;
        // q^{-m} u = (q^m / u)^{-1} and x/(1−x)² is invariant under x ↦ 1/x
        bracket += term(u * qm) + term(qm_inv_pair / u) - term(qm) * 2.0;
    }
    ensure_finite(bracket * TWO_PI_I * TWO_PI_I, "wp0")
}

/// `ζ₀(q; u)` with the logarithmic term supplied as `z = log(u)/(2πi)`.
pub fn zeta0(q: Complex64, u: Complex64, z: Complex64, order: usize) -> Result<Complex64> {
    check_qu(q, u)?;
    let one = Complex64::new(1.0, 0.0);
    let mut bracket = -u / (one - u) - 0.5;
    let mut eta_series = Complex64::new(0.0, 0.0);
    let mut qn = one;
    for _ in 1..=order {
        qn *= q;
        bracket += -(qn * u) / (one - qn * u) + (qn / u) / (one - qn / u);
        eta_series += qn / ((one - qn) * (one - qn));
    }
    let eta1 = TWO_PI_I * TWO_PI_I / 12.0 * (eta_series * 24.0 - 1.0);
    ensure_finite(bracket * TWO_PI_I + eta1 * z, "zeta0")
}

fn check_qu(q: Complex64, u: Complex64) -> Result<()> {
    let zero = Complex64::new(0.0, 0.0);
    if q == zero || u == zero {
        return Err(Error::ZeroArgument);
    }
    let (qa, ua) = (q.norm(), u.norm());
    if qa * ua >= 1.0 || qa / ua >= 1.0 {
        return Err(Error::ConvergenceDomain("need |q u| < 1 and |q/u| < 1".into()));
    }
    Ok(())
}

// Above this |Im w| the exponential form is used.
const TRIG_CUTOFF: f64 = 1.0;

/// `e^{2πi·s·w}` with `s = sign(Im w)`, so the result has modulus < 1.
fn decaying_exp(w: Complex64) -> (Complex64, f64) {
    let s = if w.im >= 0.0 { 1.0 } else { -1.0 };
    (crate::numerics::nome(w * s), s)
}

/// `π²/sin²(πw)`.
fn pi2_csc2(w: Complex64) -> Complex64 {
    if w.im.abs() <= TRIG_CUTOFF {
        let s = (w * PI).sin();
        Complex64::new(PI * PI, 0.0) / (s * s)
    } else {
        let (x, _) = decaying_exp(w);
        let one_minus = Complex64::new(1.0, 0.0) - x;
        x * (-4.0 * PI * PI) / (one_minus * one_minus)
    }
}

/// `d/dw π²/sin²(πw) = −2π³ cos(πw)/sin³(πw)`.
fn d_pi2_csc2(w: Complex64) -> Complex64 {
    if w.im.abs() <= TRIG_CUTOFF {
        let s = (w * PI).sin();
        let c = (w * PI).cos();
        c * (-2.0 * PI.powi(3)) / (s * s * s)
    } else {
        let (x, sign) = decaying_exp(w);
        let one = Complex64::new(1.0, 0.0);
        let one_minus = one - x;
        // (2πi)³ x(1+x)/(1−x)³ on the upper side, odd continuation below
        TWO_PI_I.powi(3) * x * (one + x) / (one_minus * one_minus * one_minus) * sign
    }
}

/// `π cot(πw)`.
fn pi_cot(w: Complex64) -> Complex64 {
    if w.im.abs() <= TRIG_CUTOFF {
        (w * PI).cos() / (w * PI).sin() * PI
    } else {
        let (x, sign) = decaying_exp(w);
        let one = Complex64::new(1.0, 0.0);
        Complex64::new(0.0, -PI * sign) * (one + x) / (one - x)
    }
}

/// `π cot(πa) + π cot(πb)` for `Im a > 0 > Im b`; the `∓πi` limits cancel analytically.
fn pi_cot_pair(a: Complex64, b: Complex64) -> Complex64 {
    if a.im.abs() <= TRIG_CUTOFF || b.im.abs() <= TRIG_CUTOFF {
        return pi_cot(a) + pi_cot(b);
    }
    let (x, _) = decaying_exp(a);
    let (y, _) = decaying_exp(b);
    let one = Complex64::new(1.0, 0.0);
    // −πi(1+x)/(1−x) + πi(1+y)/(1−y) = 2πi (y/(1−y) − x/(1−x))
    TWO_PI_I * (y / (one - y) - x / (one - x))
}
