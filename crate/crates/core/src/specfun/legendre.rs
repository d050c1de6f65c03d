//! Associated Legendre (Ferrers) functions P_ν^μ(t) on (-1, 1).
//!
//! The normalization is the one obtained from
//!
//! ```text
//! P_ν^μ(t) = ((1+t)/(1-t))^(μ/2) / Γ(1-μ) · F(-ν, ν+1, 1-μ; (1-t)/2)
//! ```
//!
//! extended continuously to natural μ = m, where it becomes
//! (-1)^m (ν-m+1)_{2m} / (m! 2^m) · (1-t²)^(m/2) · F(m-ν, m+ν+1, m+1; (1-t)/2).
//! This is the convention under which [`legendre_definite_integral`] holds
//! for every order.

use std::f64::consts::PI;

use super::gamma::{factorial, gamma, pochhammer, rgamma};
use super::hypergeometric::{hyp2f1_auto, Hyp2F1Params};
use super::{nonpositive_integer, snap_integer, SpecfunError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreParams {
    pub nu: f64,
    pub mu: f64,
    pub t: f64,
}

impl LegendreParams {
    pub fn new(nu: f64, mu: f64, t: f64) -> Self {
        Self { nu, mu, t }
    }
}

/// P_ν^μ(t) for integer or half-integer μ.
///
/// Near t = -1 the hypergeometric factor is evaluated through the connection
/// formula (non-integer μ) or the U representation (natural μ).
pub fn legendre_p(p: LegendreParams) -> Result<f64, SpecfunError> {
    let LegendreParams { nu, mu, t } = p;
    if !(t > -1.0 && t < 1.0) {
        return Err(SpecfunError::Domain {
            what: "Legendre argument must lie in (-1, 1)",
            value: t,
        });
    }
    let x = (1.0 - t) / 2.0;
    match snap_integer(mu) {
        Some(m) if m >= 0 => {
            let m_f = m as f64;
            // Γ(ν+m+1)/Γ(ν-m+1) as a finite product, free of poles
            let ratio = pochhammer(nu - m_f + 1.0, 2 * m as usize);
            if ratio == 0.0 {
                return Ok(0.0);
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let pref = sign * ratio / (factorial(m as u32) * 2f64.powi(m as i32)) * (1.0 - t * t).powf(m_f / 2.0);
            let f = hyp2f1_auto(Hyp2F1Params::new(m_f - nu, m_f + nu + 1.0, m_f + 1.0, x))?;
            Ok(pref * f)
        }
        _ => {
            let r = rgamma(1.0 - mu);
            if r == 0.0 {
                return Ok(0.0);
            }
            let f = hyp2f1_auto(Hyp2F1Params::new(-nu, nu + 1.0, 1.0 - mu, x))?;
            Ok(r * ((1.0 + t) / (1.0 - t)).powf(mu / 2.0) * f)
        }
    }
}

/// The regular-at-t=1 variant used for cap eigenfunctions: P_ν^k for integer
/// order k, and P_ν^{-k} for half-integer k.
pub fn legendre_p_hat(nu: f64, order: f64, t: f64) -> Result<f64, SpecfunError> {
    let mu = if snap_integer(order).is_some() { order } else { -order };
    legendre_p(LegendreParams::new(nu, mu, t))
}

/// Closed form of ∫₀^π P_ν^μ(cos θ) sin^(α-1)θ dθ, valid for |μ| < α.
///
/// Returns exactly zero when (α-ν)/2 or (1-μ-ν)/2 is a non-positive integer.
pub fn legendre_definite_integral(nu: f64, mu: f64, alpha: f64) -> Result<f64, SpecfunError> {
    if mu.abs() >= alpha {
        return Err(SpecfunError::FormulaInapplicable {
            mu_abs: mu.abs(),
            alpha,
        });
    }
    if nonpositive_integer((alpha - nu) / 2.0).is_some() || nonpositive_integer((1.0 - mu - nu) / 2.0).is_some() {
        return Ok(0.0);
    }
    let num_a = (alpha + mu) / 2.0;
    let num_b = (alpha - mu) / 2.0;
    let numerator = 2f64.powf(mu) * PI * gamma(num_a)?.finite(num_a)? * gamma(num_b)?.finite(num_b)?;
    let denominator_inv = rgamma((alpha - nu) / 2.0)
        * rgamma((nu + alpha + 1.0) / 2.0)
        * rgamma((1.0 - mu - nu) / 2.0)
        * rgamma((nu - mu + 2.0) / 2.0);
    Ok(numerator * denominator_inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_values() {
        let t = 0.3;
        let p10 = legendre_p(LegendreParams::new(1.0, 0.0, t)).unwrap();
        assert!((p10 - t).abs() < 1e-15);
        for &t in &[-0.9, -0.2, 0.0, 0.7] {
            let p00 = legendre_p(LegendreParams::new(0.0, 0.0, t)).unwrap();
            assert!((p00 - 1.0).abs() < 1e-15);
        }
        // P_2 = (3t² - 1)/2 and P_2^1 = -3t√(1-t²)
        let t = -0.85;
        let p20 = legendre_p(LegendreParams::new(2.0, 0.0, t)).unwrap();
        assert!((p20 - (3.0 * t * t - 1.0) / 2.0).abs() < 1e-14);
        let p21 = legendre_p(LegendreParams::new(2.0, 1.0, t)).unwrap();
        assert!((p21 + 3.0 * t * (1.0 - t * t).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn half_integer_closed_forms() {
        // P_ν^{-1/2}(cos θ) = sqrt(2/(π sin θ)) sin((ν+1/2)θ)/(ν+1/2)
        let nu = 1.3;
        for &theta in &[0.2, 1.0, 2.0, 2.9, 3.1] {
            let t = f64::cos(theta);
            let v = legendre_p(LegendreParams::new(nu, -0.5, t)).unwrap();
            let exact = (2.0 / (PI * theta.sin())).sqrt() * ((nu + 0.5) * theta).sin() / (nu + 0.5);
            assert!(
                (v - exact).abs() < 1e-12 * exact.abs().max(1.0),
                "θ={theta}: {v} vs {exact}"
            );
        }
        // P_ν^{1/2}(cos θ) = sqrt(2/(π sin θ)) cos((ν+1/2)θ)
        for &theta in &[0.4, 2.5, 3.0] {
            let t = f64::cos(theta);
            let v = legendre_p(LegendreParams::new(nu, 0.5, t)).unwrap();
            let exact = (2.0 / (PI * theta.sin())).sqrt() * ((nu + 0.5) * theta).cos();
            assert!(
                (v - exact).abs() < 1e-11 * exact.abs().max(1.0),
                "θ={theta}: {v} vs {exact}"
            );
        }
    }

    #[test]
    fn hat_negates_half_integer_order() {
        let a = legendre_p_hat(2.2, 0.5, 0.1).unwrap();
        let b = legendre_p(LegendreParams::new(2.2, -0.5, 0.1)).unwrap();
        assert_eq!(a, b);
        let a = legendre_p_hat(2.2, 1.0, 0.1).unwrap();
        let b = legendre_p(LegendreParams::new(2.2, 1.0, 0.1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_errors() {
        assert!(legendre_p(LegendreParams::new(1.0, 0.0, 1.0)).is_err());
        assert!(legendre_p(LegendreParams::new(1.0, 0.0, -1.2)).is_err());
        assert!(matches!(
            legendre_definite_integral(1.0, 2.0, 2.0),
            Err(SpecfunError::FormulaInapplicable { .. })
        ));
    }

    #[test]
    fn definite_integral_special_values() {
        assert!((legendre_definite_integral(0.0, 0.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        for m in [2.0, 4.0, 6.0] {
            assert_eq!(legendre_definite_integral(m, 0.0, 2.0).unwrap(), 0.0);
        }
        for n in [1.0, 3.0, 5.0] {
            assert_eq!(legendre_definite_integral(n + 0.5, -0.5, 2.5).unwrap(), 0.0);
        }
    }
}
