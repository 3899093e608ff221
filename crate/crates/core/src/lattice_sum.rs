//! Direct summation over the period lattice, used as the slow independent
//! check on every q-series route.
//!
//! Sums run over square shells `max(|m|, |n|) = r` of `ω = m + nτ`, so each
//! partial sum is symmetric under `ω ↦ −ω`. The truncation error of such a
//! sum has an asymptotic expansion in integer powers `R^{-2}, R^{-3}, …` of
//! the radius (odd-degree contributions cancel shell by shell), which is
//! removed by a least-squares-free polynomial extrapolation over five
//! checkpoint radii.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::numerics::UpperHalfPoint;

/// Checkpoints as fractions of the full radius.
const CHECKPOINTS: [f64; 5] = [1.0, 0.875, 0.75, 0.625, 0.5];
/// Powers of `1/r` eliminated by the extrapolation.
const TAIL_POWERS: [i32; 4] = [2, 3, 4, 5];

/// A truncated lattice sum together with its extrapolated limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub radius: u32,
    /// Plain partial sum over `0 < max(|m|, |n|) ≤ radius`.
    pub raw: Complex64,
    /// Partial sums extrapolated to infinite radius.
    pub accelerated: Complex64,
}

/// Sums `f(m + nτ)` over all nonzero `(m, n)` with `max(|m|, |n|) ≤ radius`.
pub(crate) fn shell_sum<F>(tau: UpperHalfPoint, radius: u32, f: F) -> LatticeSum
where
    F: Fn(Complex64) -> Complex64,
{
    let radius = radius.max(16);
    let t = tau.value();
    let checkpoints: Vec<u32> = CHECKPOINTS
        .iter()
        .map(|frac| (frac * radius as f64).round() as u32)
        .collect();
    let mut partial = vec![Complex64::new(0.0, 0.0); checkpoints.len()];

    let mut total = Complex64::new(0.0, 0.0);
    for r in 1..=radius as i64 {
        let rf = r as f64;
        let mut shell = Complex64::new(0.0, 0.0);
        // rows n = ±r, all m
        for m in -r..=r {
            let mf = m as f64;
            shell += f(t * rf + mf);
            shell += f(-t * rf + mf);
        }
        // columns m = ±r, interior n
        for n in (-r + 1)..r {
            let nf = n as f64;
            shell += f(t * nf + rf);
            shell += f(t * nf - rf);
        }
        total += shell;
        for (slot, &cp) in partial.iter_mut().zip(&checkpoints) {
            if cp as i64 == r {
                *slot = total;
            }
        }
    }

    LatticeSum {
        radius,
        raw: total,
        accelerated: extrapolate(&checkpoints, &partial),
    }
}

/// Fits `S(r) = S∞ + Σ_p a_p r^{-p}` through the checkpoint sums and returns `S∞`.
fn extrapolate(radii: &[u32], sums: &[Complex64]) -> Complex64 {
    let n = radii.len();
    debug_assert_eq!(n, TAIL_POWERS.len() + 1);
    let r_max = radii[0] as f64;
    // Columns scaled by r_max^p keep the system well conditioned.
    let mat = DMatrix::from_fn(n, n, |i, j| {
        if j == 0 {
            1.0
        } else {
            (r_max / radii[i] as f64).powi(TAIL_POWERS[j - 1])
        }
    });
    let lu = mat.lu();
    let re = DVector::from_iterator(n, sums.iter().map(|s| s.re));
    let im = DVector::from_iterator(n, sums.iter().map(|s| s.im));
    match (lu.solve(&re), lu.solve(&im)) {
        (Some(a), Some(b)) => Complex64::new(a[0], b[0]),
        _ => sums[0],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn extrapolation_removes_polynomial_tail_exactly() {
        let radii = [400, 350, 300, 250, 200];
        let limit = Complex64::new(1.25, -0.5);
        let sums: Vec<Complex64> = radii
            .iter()
            .map(|&r| {
                let x = 1.0 / r as f64;
                limit + Complex64::new(3.0, 1.0) * x * x - 7.0 * x.powi(3) + 0.5 * x.powi(5)
            })
            .collect();
        let got = extrapolate(&radii, &sums);
        assert!((got - limit).norm() < 1e-13, "{got}");
    }

    #[test]
    fn square_lattice_quartic_sum_matches_closed_form() {
        // Σ' (m + ni)^{-4} = G4(i) = Γ(1/4)^8 / (960 π^2)
        let gamma_quarter: f64 = 3.625_609_908_221_908;
        let expected = gamma_quarter.powi(8) / (960.0 * PI * PI);
        let s = shell_sum(UpperHalfPoint::i(), 200, |w| w.powi(-4));
        assert!((s.raw.re - expected).abs() > 1e-6, "raw sum should still carry its tail");
        assert!((s.accelerated - expected).norm() < 1e-11, "{} vs {expected}", s.accelerated);
    }
}
