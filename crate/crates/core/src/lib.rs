//! Weierstrass `℘`, `℘′`, `ζ`, the Eisenstein series `E₂, E₄, E₆` and the
//! lattice invariants, evaluated anywhere on `ℍ × ℂ` by modular reduction
//! followed by q-series, together with an exact symbolic engine for the
//! derivative closure of `ℂ(z, τ, ℘, ℘′, ζ, E₂, E₄, E₆)` and a
//! verification harness that checks the classical identities against
//! direct lattice sums.

pub mod eisenstein;
pub mod error;
pub mod lattice_sum;
pub mod numerics;
pub mod reduction;
pub mod symbolic;
pub mod verify;
pub mod weierstrass;

pub use error::{Error, Result};
pub use numerics::{ComplexValue, TolerancePolicy, UpperHalfPoint};
pub use reduction::{ReductionResult, UnimodularMatrix};
pub use weierstrass::{Engine, HalfPeriodData, WValue};
