//! Reduction of `(τ, z)` to the fundamental domain and the period cell, and
//! transport of function values back to the original point.
//!
//! If `τ* = (aτ + b)/(cτ + d)` and `s = cτ + d`, then `Λ_τ = s·Λ_{τ*}`, so
//!
//! ```text
//! ℘(τ; z)  = s⁻² ℘(τ*; z/s)      ℘′(τ; z) = s⁻³ ℘′(τ*; z/s)
//! ζ(τ; z)  = s⁻¹ ζ(τ*; z/s)      E₄(τ) = s⁻⁴ E₄(τ*),  E₆(τ) = s⁻⁶ E₆(τ*)
//! E₂(τ)    = s⁻² [E₂(τ*) + 6ics/π]
//! ```
//!
//! For `γ = S` the first line reads `℘(−1/τ; z) = τ² ℘(τ; τz)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eisenstein::{eisenstein_at, EisensteinValues, LatticeInvariants};
use crate::error::{Error, Result};
use crate::numerics::{coords_wrt_lattice, lattice_distance_local, UpperHalfPoint};
use crate::weierstrass::{Engine, WValue};

/// Iteration cap for [`reduce_tau`].
pub const MAX_REDUCTION_STEPS: usize = 10_000;

// Points with |τ|² within this of 1 count as lying on the unit arc.
const ARC_TIE: f64 = 4.0 * f64::EPSILON;

/// An element of `SL(2, ℤ)`, acting by `τ ↦ (aτ + b)/(cτ + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub const IDENTITY: UnimodularMatrix = UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 };
    /// `S(τ) = −1/τ`.
    pub const S: UnimodularMatrix = UnimodularMatrix { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = UnimodularMatrix { a, b, c, d };
        if m.det() != Some(1) {
            return Err(Error::DegenerateConfiguration(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] does not have determinant 1"
            )));
        }
        Ok(m)
    }

    /// `Tⁿ(τ) = τ + n`.
    pub fn t(n: i64) -> Self {
        UnimodularMatrix { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn det(&self) -> Option<i64> {
        self.a.checked_mul(self.d)?.checked_sub(self.b.checked_mul(self.c)?)
    }

    /// `self · rhs`, or `None` on integer overflow.
    pub fn checked_mul(&self, rhs: &UnimodularMatrix) -> Option<UnimodularMatrix> {
        let dot = |x: i64, y: i64, u: i64, v: i64| x.checked_mul(y)?.checked_add(u.checked_mul(v)?);
        Some(UnimodularMatrix {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    pub fn inverse(&self) -> UnimodularMatrix {
        UnimodularMatrix { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// The automorphy factor `cτ + d`.
    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    pub fn apply(&self, tau: UpperHalfPoint) -> Result<UpperHalfPoint> {
        let t = tau.value();
        UpperHalfPoint::new((t * self.a as f64 + self.b as f64) / self.automorphy(t))
    }
}

/// Everything needed to move values between `(τ, z)` and `(τ*, z*)`:
/// `τ* = γτ`, `z/s = z* + m + nτ*` with `z*` in the half-open cell of `τ*`,
/// and `s = cτ + d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub gamma: UnimodularMatrix,
    pub tau_star: UpperHalfPoint,
    pub m: i64,
    pub n: i64,
    pub z_star: Complex64,
    pub scale: Complex64,
}

/// Reduces `τ` into `−1/2 ≤ Re τ < 1/2`, `|τ| ≥ 1`, with points of the unit
/// arc taken on the side `Re τ ≤ 0`.
pub fn reduce_tau(tau: UpperHalfPoint) -> Result<(UnimodularMatrix, UpperHalfPoint)> {
    let mut gamma = UnimodularMatrix::IDENTITY;
    let mut w = tau.value();
    let overflow = || Error::Overflow("reduce_tau");
    for _ in 0..MAX_REDUCTION_STEPS {
        let shift = (w.re + 0.5).floor();
        if shift != 0.0 {
            if shift.abs() > 9.0e15 {
                return Err(overflow());
            }
            w -= shift;
            gamma = UnimodularMatrix::t(-(shift as i64)).checked_mul(&gamma).ok_or_else(overflow)?;
        }
        let r2 = w.norm_sqr();
        let on_arc_right = r2 <= 1.0 + ARC_TIE && w.re > 0.0;
        if r2 < 1.0 - ARC_TIE || on_arc_right {
            w = -w.inv();
            gamma = UnimodularMatrix::S.checked_mul(&gamma).ok_or_else(overflow)?;
            continue;
        }
        return finish_reduction(tau, gamma);
    }
    Err(Error::NonTermination { iterations: MAX_REDUCTION_STEPS })
}

/// Recomputes `τ*` from the integer matrix so rounding does not accumulate
/// over the iteration, then snaps the real part back into the strip.
fn finish_reduction(tau: UpperHalfPoint, mut gamma: UnimodularMatrix) -> Result<(UnimodularMatrix, UpperHalfPoint)> {
    let mut star = gamma.apply(tau)?;
    let shift = (star.re() + 0.5).floor();
    if shift != 0.0 {
        let t = UnimodularMatrix::t(-(shift as i64));
        gamma = t.checked_mul(&gamma).ok_or(Error::Overflow("reduce_tau"))?;
        star = UpperHalfPoint::new(star.value() - shift)?;
    }
    Ok((gamma, star))
}

/// `z = z* + m + nτ` with `z*` in the half-open cell.
pub fn reduce_z(tau: UpperHalfPoint, z: Complex64) -> (i64, i64, Complex64) {
    let c = coords_wrt_lattice(tau, z);
    let n = c.a.floor();
    let m = c.b.floor();
    // built from the fractional coordinates so z* cannot round out of the cell
    (m as i64, n as i64, tau.value() * (c.a - n) + (c.b - m))
}

pub fn reduce(tau: UpperHalfPoint, z: Complex64) -> Result<ReductionResult> {
    let (gamma, tau_star) = reduce_tau(tau)?;
    let scale = gamma.automorphy(tau.value());
    let (m, n, z_star) = reduce_z(tau_star, z / scale);
    Ok(ReductionResult { gamma, tau_star, m, n, z_star, scale })
}

/// Euclidean distance from `z` to the nearest point of `Λ_τ`, for any `τ`.
pub fn lattice_distance(tau: UpperHalfPoint, z: Complex64) -> Result<f64> {
    let (gamma, tau_star) = reduce_tau(tau)?;
    let scale = gamma.automorphy(tau.value());
    Ok(lattice_distance_local(tau_star, z / scale) * scale.norm())
}

/// `z/s` re-expressed as `w + m + nτ*` with both cell coordinates of `w` in
/// `[−1/2, 1/2]`, where the q-series converge fastest.
struct Centered {
    red: ReductionResult,
    w: Complex64,
    m: i64,
    n: i64,
    /// Pole guard radius in the reduced coordinates.
    guard: f64,
}

impl Engine {
    fn centered(&self, tau: UpperHalfPoint, z: Complex64) -> Result<Centered> {
        let red = reduce(tau, z)?;
        let ts = red.tau_star;
        let dist = lattice_distance_local(ts, red.z_star) * red.scale.norm();
        let guard = self.policy.pole_guard_radius;
        if dist < guard {
            return Err(Error::PoleProximity { distance: dist, radius: guard });
        }
        let (mut w, mut m, mut n) = (red.z_star, red.m, red.n);
        let c = coords_wrt_lattice(ts, w);
        if c.a > 0.5 {
            w -= ts.value();
            n += 1;
        }
        if c.b > 0.5 {
            w -= 1.0;
            m += 1;
        }
        Ok(Centered { red, w, m, n, guard: guard / red.scale.norm() * (1.0 - 1e-9) })
    }

    fn transport(&self, v: WValue, scale: Complex64, weight: i32) -> WValue {
        WValue {
            value: v.value * scale.powi(-weight),
            est_error: (v.est_error * scale.norm().powi(-weight)).max(self.policy.series_tail_bound),
        }
    }

    pub fn wp_anywhere(&self, tau: UpperHalfPoint, z: Complex64) -> Result<WValue> {
        let c = self.centered(tau, z)?;
        let v = self.wp_series(c.red.tau_star, c.w, c.guard)?;
        Ok(self.transport(v, c.red.scale, 2))
    }

    pub fn wp_prime_anywhere(&self, tau: UpperHalfPoint, z: Complex64) -> Result<WValue> {
        let c = self.centered(tau, z)?;
        let v = self.wp_prime_series(c.red.tau_star, c.w, c.guard)?;
        Ok(self.transport(v, c.red.scale, 3))
    }

    pub fn zeta_anywhere(&self, tau: UpperHalfPoint, z: Complex64) -> Result<WValue> {
        let c = self.centered(tau, z)?;
        let ts = c.red.tau_star;
        let mut v = self.zeta_series(ts, c.w, c.guard)?;
        if c.m != 0 || c.n != 0 {
            let (eta1, eta2) = self.quasi_periods_reduced(ts)?;
            v.value += eta1.value * c.m as f64 + eta2.value * c.n as f64;
            v.est_error += eta1.est_error * c.m.unsigned_abs() as f64 + eta2.est_error * c.n.unsigned_abs() as f64;
        }
        Ok(self.transport(v, c.red.scale, 1))
    }

    /// `η₁ = 2ζ(τ; 1/2)` and `η₂ = 2ζ(τ; τ/2)`, for any `τ`.
    pub fn quasi_periods(&self, tau: UpperHalfPoint) -> Result<(WValue, WValue)> {
        let t = tau.value();
        let half = Complex64::new(0.5, 0.0);
        let double = |v: WValue| WValue { value: v.value * 2.0, est_error: v.est_error * 2.0 };
        Ok((double(self.zeta_anywhere(tau, half)?), double(self.zeta_anywhere(tau, t * 0.5)?)))
    }

    fn quasi_periods_reduced(&self, tau: UpperHalfPoint) -> Result<(WValue, WValue)> {
        let half = Complex64::new(0.5, 0.0);
        let double = |v: WValue| WValue { value: v.value * 2.0, est_error: v.est_error * 2.0 };
        let guard = self.policy.pole_guard_radius;
        Ok((
            double(self.zeta_series(tau, half, guard)?),
            double(self.zeta_series(tau, tau.value() * 0.5, guard)?),
        ))
    }

    /// Normalized `E₂, E₄, E₆` at any `τ`, by reduction and the transformation laws.
    pub fn eisenstein_anywhere(&self, tau: UpperHalfPoint) -> Result<EisensteinValues> {
        let (gamma, tau_star) = reduce_tau(tau)?;
        let e = eisenstein_at(tau_star, &self.trunc)?;
        let s = gamma.automorphy(tau.value());
        let anomaly = Complex64::new(0.0, 6.0 * gamma.c as f64 / PI) * s;
        Ok(EisensteinValues {
            e2: (e.e2 + anomaly) * s.powi(-2),
            e4: e.e4 * s.powi(-4),
            e6: e.e6 * s.powi(-6),
        })
    }

    pub fn e2_anywhere(&self, tau: UpperHalfPoint) -> Result<Complex64> {
        Ok(self.eisenstein_anywhere(tau)?.e2)
    }

    pub fn invariants_anywhere(&self, tau: UpperHalfPoint) -> Result<LatticeInvariants> {
        Ok(LatticeInvariants::from_eisenstein(&self.eisenstein_anywhere(tau)?))
    }

    /// One of `E₂, E₄, E₆, g₂, g₃, Δ` at any `τ`, with the truncation bound of
    /// the reduced series carried through the weight factor plus a rounding term.
    pub fn modular_anywhere(&self, tau: UpperHalfPoint, which: ModularQuantity) -> Result<WValue> {
        let (gamma, tau_star) = reduce_tau(tau)?;
        let tail = self.trunc.tail_bound_at(tau_star.nome().norm());
        let s = gamma.automorphy(tau.value()).norm();
        let inv = self.invariants_anywhere(tau)?;
        let e = self.eisenstein_anywhere(tau)?;
        let (value, weight, terms) = match which {
            ModularQuantity::E2 => (e.e2, 2, 1.0),
            ModularQuantity::E4 => (e.e4, 4, 1.0),
            ModularQuantity::E6 => (e.e6, 6, 1.0),
            ModularQuantity::G2 => (inv.g2, 4, 1.0),
            ModularQuantity::G3 => (inv.g3, 6, 1.0),
            ModularQuantity::Delta => (inv.delta, 12, 3.0),
        };
        let magnitude = match which {
            ModularQuantity::Delta => inv.g2.norm().powi(3) + 27.0 * inv.g3.norm_sqr(),
            _ => value.norm(),
        };
        let reduced = value.norm() * s.powi(weight);
        let est_error = terms * tail * reduced.max(1.0) * s.powi(-weight) + 16.0 * f64::EPSILON * magnitude;
        Ok(WValue { value, est_error })
    }

    /// `℘(u + v)` from values at `u` and `v`, switching to the duplication
    /// formula when `u ≡ v`.
    pub fn wp_add(&self, tau: UpperHalfPoint, u: Complex64, v: Complex64) -> Result<WpAddition> {
        let guard = self.policy.pole_guard_radius;
        let pu = self.wp_anywhere(tau, u)?.value;
        let pv = self.wp_anywhere(tau, v)?.value;
        if lattice_distance(tau, u + v)? < guard {
            return Err(Error::DegenerateConfiguration("u + v lies on the period lattice".into()));
        }
        let dpu = self.wp_prime_anywhere(tau, u)?.value;
        let coincide = (pu - pv).norm() < 1e-8 * pu.norm().max(1.0);
        if coincide && lattice_distance(tau, u - v)? < guard {
            let g2 = self.invariants_anywhere(tau)?.g2;
            let second = pu * pu * 6.0 - g2 * 0.5;
            let ratio = second / (dpu * 2.0);
            return Ok(WpAddition { value: ratio * ratio - pu * 2.0, duplication: true });
        }
        let dpv = self.wp_prime_anywhere(tau, v)?.value;
        let denom = pu - pv;
        if denom.norm() < 1e-12 * pu.norm().max(1.0) {
            return Err(Error::NearSingular { magnitude: denom.norm() });
        }
        let ratio = (dpu - dpv) / denom;
        Ok(WpAddition { value: ratio * ratio * 0.25 - pu - pv, duplication: false })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModularQuantity {
    E2,
    E4,
    E6,
    G2,
    G3,
    Delta,
}

/// Result of [`Engine::wp_add`], recording which formula was used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WpAddition {
    pub value: Complex64,
    pub duplication: bool,
}
