//! Scalar types, tolerance policy and the membership predicates for the
//! domains the evaluators work on.
//!
//! `z = x + iy` is the elliptic variable and `τ = u + iv` the lattice
//! parameter; the period lattice is `Λ_τ = ℤ + τℤ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The universal scalar.
pub type ComplexValue = Complex64;

/// `√3/2`, the height of the lowest corners of the fundamental domain.
pub const D_HEIGHT: f64 = 0.866_025_403_784_438_6;

/// `exp(−2π·√3/2)`, the largest nome modulus reached from the fundamental domain.
pub fn delta() -> f64 {
    (-2.0 * PI * D_HEIGHT).exp()
}

pub(crate) const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

pub(crate) fn ensure_finite(v: Complex64, what: &'static str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(what))
    }
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct UpperHalfPoint(Complex64);

impl UpperHalfPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Overflow("UpperHalfPoint::new"));
        }
        if value.im > 0.0 {
            Ok(UpperHalfPoint(value))
        } else {
            Err(Error::NotInUpperHalfPlane { im: value.im })
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// `τ = i`.
    pub fn i() -> Self {
        UpperHalfPoint(Complex64::i())
    }

    /// `ρ = e^{iπ/3}`, the hexagonal point.
    pub fn rho() -> Self {
        UpperHalfPoint(Complex64::new(0.5, D_HEIGHT))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    /// The nome `q = e^{2πiτ}`.
    pub fn nome(self) -> Complex64 {
        nome(self.0)
    }
}

impl From<UpperHalfPoint> for Complex64 {
    fn from(t: UpperHalfPoint) -> Self {
        t.0
    }
}

impl TryFrom<Complex64> for UpperHalfPoint {
    type Error = Error;

    fn try_from(value: Complex64) -> Result<Self> {
        UpperHalfPoint::new(value)
    }
}

/// `e^{2πiw}` evaluated with the modulus and the phase separated.
pub(crate) fn nome(w: Complex64) -> Complex64 {
    let r = (-2.0 * PI * w.im).exp();
    let phase = 2.0 * PI * w.re;
    Complex64::new(r * phase.cos(), r * phase.sin())
}

/// Real coordinates of `z = aτ + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCoordinates {
    pub a: f64,
    pub b: f64,
}

impl CellCoordinates {
    pub fn recompose(self, tau: UpperHalfPoint) -> Complex64 {
        tau.value() * self.a + self.b
    }
}

/// Numeric tolerances shared by the evaluators and the verification suite.
///
/// Per-case tolerances of the identity suite default to the values pinned in
/// [`crate::verify`]; `case_tolerances` overrides them by case name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub series_tail_bound: f64,
    pub identity_tol: f64,
    pub oracle_tol: f64,
    pub fd_tol: f64,
    pub pole_guard_radius: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub case_tolerances: BTreeMap<String, f64>,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            series_tail_bound: 1e-15,
            identity_tol: 1e-8,
            oracle_tol: 1e-4,
            fd_tol: 1e-5,
            pole_guard_radius: 1e-3,
            case_tolerances: BTreeMap::new(),
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("series_tail_bound", self.series_tail_bound),
            ("identity_tol", self.identity_tol),
            ("oracle_tol", self.oracle_tol),
            ("fd_tol", self.fd_tol),
            ("pole_guard_radius", self.pole_guard_radius),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidPolicy(format!("{name} must be positive, got {v}")));
            }
        }
        if self.series_tail_bound > self.identity_tol || self.identity_tol > self.oracle_tol {
            return Err(Error::InvalidPolicy(
                "need series_tail_bound <= identity_tol <= oracle_tol".into(),
            ));
        }
        for (name, v) in &self.case_tolerances {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(Error::InvalidPolicy(format!("tolerance for case {name} must be >= 0")));
            }
        }
        Ok(())
    }

    /// Parses the `key = value` config format. Blank lines and `#` comments
    /// are ignored; `case.<name> = <tol>` sets a per-case tolerance. Keys not
    /// present keep their defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut policy = TolerancePolicy::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("line {}: bad number {:?}", lineno + 1, value.trim())))?;
            match key {
                "series_tail_bound" => policy.series_tail_bound = value,
                "identity_tol" => policy.identity_tol = value,
                "oracle_tol" => policy.oracle_tol = value,
                "fd_tol" => policy.fd_tol = value,
                "pole_guard_radius" => policy.pole_guard_radius = value,
                other => match other.strip_prefix("case.") {
                    Some(name) if !name.is_empty() => {
                        policy.case_tolerances.insert(name.to_string(), value);
                    }
                    _ => return Err(Error::Config(format!("line {}: unknown key {other:?}", lineno + 1))),
                },
            }
        }
        policy.validate()?;
        Ok(policy)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = format!(
            "series_tail_bound = {:e}\nidentity_tol = {:e}\noracle_tol = {:e}\nfd_tol = {:e}\npole_guard_radius = {:e}\n",
            self.series_tail_bound, self.identity_tol, self.oracle_tol, self.fd_tol, self.pole_guard_radius
        );
        for (name, v) in &self.case_tolerances {
            out.push_str(&format!("case.{name} = {v:e}\n"));
        }
        out
    }
}

/// Membership in the strip `−1/2 ≤ Re τ < 1/2`, `Im τ ≥ √3/2`.
pub fn in_fundamental_domain(tau: UpperHalfPoint) -> bool {
    (-0.5..0.5).contains(&tau.re()) && tau.im() >= D_HEIGHT
}

/// Membership in the classical fundamental domain `−1/2 ≤ Re τ < 1/2`, `|τ| ≥ 1`.
pub fn in_reduced_domain(tau: UpperHalfPoint) -> bool {
    (-0.5..0.5).contains(&tau.re()) && tau.value().norm_sqr() >= 1.0
}

pub fn coords_wrt_lattice(tau: UpperHalfPoint, z: Complex64) -> CellCoordinates {
    let a = z.im / tau.im();
    let b = z.re - a * tau.re();
    CellCoordinates { a, b }
}

/// Membership in the half-open period cell `E_τ`.
pub fn in_cell(tau: UpperHalfPoint, z: Complex64) -> bool {
    let c = coords_wrt_lattice(tau, z);
    (0.0..1.0).contains(&c.a) && (0.0..1.0).contains(&c.b)
}

/// Euclidean distance from `z` to the nearest point of `Λ_τ`, by a local
/// search that is exact once `τ` is reduced. For arbitrary `τ` use
/// [`crate::reduction::lattice_distance`].
pub(crate) fn lattice_distance_local(tau: UpperHalfPoint, z: Complex64) -> f64 {
    let t = tau.value();
    let c = coords_wrt_lattice(tau, z);
    let n0 = c.a.floor() as i64;
    let mut best = f64::INFINITY;
    for n in (n0 - 1)..=(n0 + 2) {
        let w = z - t * n as f64;
        let m0 = w.re.round() as i64;
        for m in (m0 - 1)..=(m0 + 1) {
            best = best.min((w - m as f64).norm());
        }
    }
    best
}

/// `τ = log(q)/(2πi)` on the principal branch, with the real part moved into `[−1/2, 1/2)`.
pub fn tau_from_nome(q: Complex64) -> Result<UpperHalfPoint> {
    if q == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    let modulus = q.norm();
    if modulus >= 1.0 {
        return Err(Error::ConvergenceDomain(format!("|q| = {modulus} is not < 1")));
    }
    let mut re = q.arg() / (2.0 * PI);
    if re >= 0.5 {
        re -= 1.0;
    }
    UpperHalfPoint::from_parts(re, -modulus.ln() / (2.0 * PI))
}

/// Coordinates of `z` relative to the shrunken cell: `z = (1+τ)/8 + (a + bτ)/4`.
fn shrunken_cell_coords(tau: UpperHalfPoint, z: Complex64) -> CellCoordinates {
    let corner = (tau.value() + 1.0) / 8.0;
    let w = (z - corner) * 4.0;
    let c = coords_wrt_lattice(tau, w);
    CellCoordinates { a: c.b, b: c.a }
}

/// Membership of `z` in the closed parallelogram with vertices
/// `(1+τ)/8, (3+τ)/8, (1+3τ)/8, (3+3τ)/8`.
pub fn in_shrunken_cell(tau: UpperHalfPoint, z: Complex64) -> bool {
    let c = shrunken_cell_coords(tau, z);
    (0.0..=1.0).contains(&c.a) && (0.0..=1.0).contains(&c.b)
}

/// Membership of `(q, u)` in the image of the shrunken cells over the
/// fundamental strip: `0 < |q| ≤ e^{−2π√3/2}` and some determination of
/// `log(u)/(2πi)` lies in the shrunken cell of `τ = log(q)/(2πi)`.
pub fn in_m_delta(q: Complex64, u: Complex64) -> Result<bool> {
    let zero = Complex64::new(0.0, 0.0);
    if q == zero || u == zero {
        return Err(Error::ZeroArgument);
    }
    if q.norm() > delta() {
        return Ok(false);
    }
    let tau = tau_from_nome(q)?;
    let z0 = Complex64::new(u.arg() / (2.0 * PI), -u.norm().ln() / (2.0 * PI));
    // log u is only defined up to 2πiℤ, and the cell's real extent straddles ±1/2.
    Ok((-1..=1).any(|k| in_shrunken_cell(tau, z0 + k as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn tau(re: f64, im: f64) -> UpperHalfPoint {
        UpperHalfPoint::from_parts(re, im).unwrap()
    }

    #[test]
    fn fundamental_domain_membership() {
        assert!(in_fundamental_domain(tau(0.0, 1.0)));
        assert!(!in_fundamental_domain(tau(0.6, 2.0)));
        assert!(!in_fundamental_domain(tau(0.25, 0.5)));
        assert!(in_fundamental_domain(tau(-0.5, 1.0)));
        assert!(!in_fundamental_domain(tau(0.5, 1.0)));
        assert!(in_fundamental_domain(tau(0.0, D_HEIGHT)));
    }

    #[test]
    fn upper_half_point_rejects_lower_half() {
        assert!(matches!(
            UpperHalfPoint::from_parts(0.0, 0.0),
            Err(Error::NotInUpperHalfPlane { .. })
        ));
        assert!(UpperHalfPoint::from_parts(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn lattice_coordinates() {
        let c = coords_wrt_lattice(tau(0.0, 1.0), Complex64::new(0.0, 0.0));
        assert_eq!((c.a, c.b), (0.0, 0.0));
        let c = coords_wrt_lattice(tau(0.0, 1.0), Complex64::new(0.5, 0.5));
        assert_eq!((c.a, c.b), (0.5, 0.5));
        // (2i)·1.5 + 1 = 1 + 3i
        let c = coords_wrt_lattice(tau(0.0, 2.0), Complex64::new(1.0, 3.0));
        assert!(close(c.a, 1.5, 1e-15) && close(c.b, 1.0, 1e-15));
    }

    #[test]
    fn cell_membership() {
        let t = tau(0.0, 1.0);
        assert!(in_cell(t, Complex64::new(0.0, 0.0)));
        assert!(!in_cell(t, Complex64::new(-0.1, 0.0)));
        assert!(in_cell(t, Complex64::new(0.999, 0.999)));
        assert!(!in_cell(t, Complex64::new(1.0, 0.5)));
    }

    #[test]
    fn lattice_distance_finds_nearest_period() {
        let t = tau(0.3, 1.1);
        let z = t.value() * 2.0 - 3.0 + Complex64::new(0.01, -0.02);
        assert!(close(lattice_distance_local(t, z), 0.05f64.sqrt() * 0.1, 1e-12));
        assert!(close(lattice_distance_local(tau(0.0, 1.0), Complex64::new(0.5, 0.5)), 0.5f64.sqrt(), 1e-15));
    }

    #[test]
    fn m_delta_membership() {
        let q = nome(Complex64::i());
        let u = nome(Complex64::new(0.25, 0.25));
        assert!(in_m_delta(q, u).unwrap());
        assert!(!in_m_delta(Complex64::new(0.9, 0.0), u).unwrap());
        assert_eq!(in_m_delta(Complex64::new(0.0, 0.0), u), Err(Error::ZeroArgument));
        assert_eq!(in_m_delta(q, Complex64::new(0.0, 0.0)), Err(Error::ZeroArgument));
        // a vertex is in, a point just outside the far edge is not
        let vertex = nome(Complex64::new(0.375, 0.375));
        assert!(in_m_delta(q, vertex).unwrap());
        let outside = nome(Complex64::new(0.25, 0.40));
        assert!(!in_m_delta(q, outside).unwrap());
    }

    #[test]
    fn m_delta_uses_any_log_branch() {
        // Re τ = 0.45 pushes the far vertex past Re z = 1/2, off the principal branch.
        let t = tau(0.45, 1.0);
        let z = (t.value() * 3.0 + 3.0) / 8.0;
        assert!(z.re > 0.5);
        assert!(in_shrunken_cell(t, z));
        assert!(in_m_delta(t.nome(), nome(z)).unwrap());
    }

    #[test]
    fn tau_from_nome_recovers_strip_representative() {
        let t = tau(-0.5, 1.3);
        let back = tau_from_nome(t.nome()).unwrap();
        assert!(close(back.re(), -0.5, 1e-12) && close(back.im(), 1.3, 1e-12));
        let t = tau(0.2, 0.9);
        let back = tau_from_nome(t.nome()).unwrap();
        assert!(close(back.re(), 0.2, 1e-12) && close(back.im(), 0.9, 1e-12));
    }

    #[test]
    fn policy_defaults_are_valid_and_ordered() {
        let p = TolerancePolicy::default();
        p.validate().unwrap();
        let mut bad = p.clone();
        bad.identity_tol = 1.0;
        assert!(bad.validate().is_err());
        bad = p;
        bad.fd_tol = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn policy_config_parsing() {
        let p = TolerancePolicy::from_config_str(
            "# comment\nfd_tol = 2e-5\n\ncase.sine_limit = 1e-11  # tighter\n",
        )
        .unwrap();
        assert_eq!(p.fd_tol, 2e-5);
        assert_eq!(p.case_tolerances["sine_limit"], 1e-11);
        assert_eq!(TolerancePolicy::from_config_str(&p.to_config_string()).unwrap(), p);
        assert!(TolerancePolicy::from_config_str("nonsense = 1").is_err());
        assert!(TolerancePolicy::from_config_str("fd_tol 1").is_err());
        assert!(TolerancePolicy::from_config_str("fd_tol = abc").is_err());
    }

    #[test]
    fn fundamental_domain_has_small_nome() {
        for &(re, im) in &[(-0.5, D_HEIGHT), (0.0, 1.0), (0.49, 0.87), (0.1, 4.0)] {
            let t = tau(re, im);
            assert!(in_fundamental_domain(t));
            assert!(t.nome().norm() <= delta() * (1.0 + 1e-15));
        }
        assert!(close(delta(), 4.333e-3, 1e-6));
    }
}
