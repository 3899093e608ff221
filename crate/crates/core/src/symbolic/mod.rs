//! Exact rational functions over the generators `z, τ, ℘, ℘′, ζ, E₂, E₄, E₆`
//! and their derivatives in `z` and `τ`.
//!
//! Coefficients are Gaussian rationals; `π` is carried as a formal variable
//! that may appear with negative exponent. `g₂`, `g₃` and `Δ` are not
//! generators but abbreviations, `g₂ = (4π⁴/3)E₄`, `g₃ = (8π⁶/27)E₆`.

mod coeff;
mod eval;
mod expr;
mod parse;
mod poly;
mod rules;

use serde::{Deserialize, Serialize};

pub use coeff::Coeff;
pub use eval::{eval_expr, fd_check, generator_values};
pub use expr::{Expr, SINGULAR_DENOMINATOR};
pub use parse::parse_expr;
pub use poly::{Monomial, Poly};
pub use rules::{differentiate, Differentiator, RuleTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    Z,
    Tau,
    Wp,
    Wp1,
    Zeta,
    E2,
    E4,
    E6,
}

impl Generator {
    pub const COUNT: usize = 8;
    pub const ALL: [Generator; Generator::COUNT] = [
        Generator::Z,
        Generator::Tau,
        Generator::Wp,
        Generator::Wp1,
        Generator::Zeta,
        Generator::E2,
        Generator::E4,
        Generator::E6,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name in the text form.
    pub fn name(self) -> &'static str {
        match self {
            Generator::Z => "z",
            Generator::Tau => "tau",
            Generator::Wp => "wp",
            Generator::Wp1 => "wp1",
            Generator::Zeta => "zeta",
            Generator::E2 => "E2",
            Generator::E4 => "E4",
            Generator::E6 => "E6",
        }
    }

    pub fn from_name(name: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.name() == name)
    }
}

/// Variable of differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiffVar {
    Z,
    Tau,
}

impl DiffVar {
    pub fn name(self) -> &'static str {
        match self {
            DiffVar::Z => "z",
            DiffVar::Tau => "tau",
        }
    }

    pub fn from_name(name: &str) -> Option<DiffVar> {
        match name {
            "z" => Some(DiffVar::Z),
            "tau" => Some(DiffVar::Tau),
            _ => None,
        }
    }
}
