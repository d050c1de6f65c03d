//! Special-function kernel: Gamma/digamma, Gauss hypergeometric series and
//! their connection formulas, associated Legendre functions, and the
//! closed-form Legendre moment integral.
//!
//! All functions are pure and real-valued.

mod gamma;
mod hypergeometric;
mod legendre;

pub use gamma::{digamma, factorial, gamma, gamma_pole_limit, ln_gamma, pochhammer, rgamma, GammaValue};
pub use hypergeometric::{hyp2f1, hyp2f1_auto, hyp2f1_near_one, hyp_u, Hyp2F1Params, MAX_TERMS, TERM_RATIO, X_SWITCH};
pub use legendre::{legendre_definite_integral, legendre_p, legendre_p_hat, LegendreParams};

use thiserror::Error;

/// Distance to an integer below which a parameter is treated as that integer.
pub const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{what} (got {value})")]
    Domain { what: &'static str, value: f64 },
    #[error("gamma pole at {x}")]
    GammaPole { x: f64 },
    #[error("magnitude overflow ({})", if *negative { "negative" } else { "positive" })]
    Overflow { negative: bool },
    #[error("digamma pole at {x}")]
    DigammaPole { x: f64 },
    #[error("series stall after {terms} terms (last term magnitude {last_term:e})")]
    SeriesStall { terms: usize, last_term: f64 },
    #[error("hypergeometric parameter c = {c} is a non-positive integer")]
    ParameterPole { c: f64 },
    #[error("connection formula inapplicable: {reason}")]
    ConversionInapplicable { reason: &'static str },
    #[error("degenerate parameter for U: {which} = {value} is an integer")]
    DegenerateParameter { which: &'static str, value: f64 },
    #[error("definite-integral formula inapplicable: |mu| = {mu_abs} >= alpha = {alpha}")]
    FormulaInapplicable { mu_abs: f64, alpha: f64 },
}

/// `Some(k)` when `x` is within [`SNAP_TOL`] of the integer `k`.
pub(crate) fn snap_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() <= SNAP_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// `Some(n)` when `x` is within [`SNAP_TOL`] of `-n` with `n >= 0`.
pub(crate) fn nonpositive_integer(x: f64) -> Option<i64> {
    match snap_integer(x) {
        Some(k) if k <= 0 => Some(-k),
        _ => None,
    }
}
