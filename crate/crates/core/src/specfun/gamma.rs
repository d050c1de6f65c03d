//! Gamma, reciprocal Gamma, digamma and Pochhammer symbols.
//!
//! Evaluation uses the Lanczos approximation (g = 7, 9 coefficients) on
//! `x >= 1/2` and the reflection formula below that. Arguments within
//! [`SNAP_TOL`] of a non-positive integer are treated as poles.

use std::f64::consts::PI;

use super::{nonpositive_integer, SpecfunError};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument with a finite `f64` Gamma value.
const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// Value of Γ at a point, with explicit pole bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    /// Γ(x); `f64::INFINITY` at a pole.
    pub value: f64,
    pub is_pole: bool,
    /// Residue (-1)^n / n! of the simple pole at -n; zero away from poles.
    pub residue: f64,
}

impl GammaValue {
    /// The finite value, or a pole error.
    pub fn finite(self, x: f64) -> Result<f64, SpecfunError> {
        if self.is_pole {
            Err(SpecfunError::GammaPole { x })
        } else {
            Ok(self.value)
        }
    }
}

/// sin(πx) with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    let s = if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    };
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else {
        s
    }
}

/// cos(πx) with exact zeros at the half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Γ(x) for x >= 1/2 (finite result assumed).
fn gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so t^(z+1/2) e^-t does not overflow before the product
    let half = t.powf((z + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * ((-t).exp() * half) * lanczos_sum(z)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the argument in the Lanczos range
        return ln_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Γ(x) with pole detection.
pub fn gamma(x: f64) -> Result<GammaValue, SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain {
            what: "gamma argument must be finite",
            value: x,
        });
    }
    if let Some(n) = nonpositive_integer(x) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(GammaValue {
            value: f64::INFINITY,
            is_pole: true,
            residue: sign / factorial(n as u32),
        });
    }
    let value = if x >= 0.5 {
        if x > GAMMA_MAX_ARG {
            return Err(SpecfunError::Overflow { negative: false });
        }
        if x == x.round() && x <= 23.0 {
            factorial(x as u32 - 1)
        } else {
            gamma_lanczos(x)
        }
    } else {
        let s = sin_pi(x);
        let reflected = 1.0 - x;
        if reflected > GAMMA_MAX_ARG {
            // |Γ(x)| underflows; keep the sign
            let ln_abs = PI.ln() - s.abs().ln() - ln_gamma(reflected);
            ln_abs.exp().copysign(s)
        } else {
            let v = PI / (s * gamma_lanczos(reflected));
            if !v.is_finite() {
                return Err(SpecfunError::Overflow { negative: v < 0.0 });
            }
            v
        }
    };
    Ok(GammaValue {
        value,
        is_pole: false,
        residue: 0.0,
    })
}

/// 1/Γ(x); exactly zero at the poles of Γ and for arguments beyond overflow.
pub fn rgamma(x: f64) -> f64 {
    if nonpositive_integer(x).is_some() {
        return 0.0;
    }
    if x > GAMMA_MAX_ARG {
        return (-ln_gamma(x)).exp();
    }
    match gamma(x) {
        Ok(g) => 1.0 / g.value,
        Err(_) => 0.0,
    }
}

/// n! as f64 (exact up to 22!).
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Rising factorial (x)_n = x (x+1) ... (x+n-1).
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

/// Digamma ψ(x) = Γ'(x)/Γ(x).
///
/// Shifts the argument above 10 with ψ(z+1) = ψ(z) + 1/z and sums the
/// asymptotic series there; negative arguments go through reflection.
pub fn digamma(x: f64) -> Result<f64, SpecfunError> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain {
            what: "digamma argument must be finite",
            value: x,
        });
    }
    if nonpositive_integer(x).is_some() {
        return Err(SpecfunError::DigammaPole { x });
    }
    if x < 0.5 {
        // ψ(1-x) - ψ(x) = π cot(πx)
        let cot = cos_pi(x) / sin_pi(x);
        return Ok(digamma(1.0 - x)? - PI * cot);
    }
    let mut z = x;
    let mut acc = 0.0;
    while z < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    // Bernoulli tail: B_2k / (2k z^2k)
    let series = z2
        * (-1.0 / 12.0
            + z2 * (1.0 / 120.0
                + z2 * (-1.0 / 252.0
                    + z2 * (1.0 / 240.0 + z2 * (-1.0 / 132.0 + z2 * (691.0 / 32_760.0 - z2 / 12.0))))));
    Ok(acc + z.ln() - 0.5 / z + series)
}

/// ζ·Γ(-n-ζ), the numerically exposed residue of Γ at -n.
///
/// Tends to (-1)^(n+1)/n! as ζ → 0.
pub fn gamma_pole_limit(n: u32, zeta: f64) -> Result<f64, SpecfunError> {
    if !(zeta != 0.0 && zeta.abs() <= 1e-3) {
        return Err(SpecfunError::Domain {
            what: "pole offset must satisfy 0 < |zeta| <= 1e-3",
            value: zeta,
        });
    }
    let g = gamma(-(n as f64) - zeta)?;
    Ok(zeta * g.finite(-(n as f64) - zeta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factorial_identity() {
        assert_eq!(gamma(5.0).unwrap().value, 24.0);
        assert!(rel(gamma(11.0).unwrap().value, 3_628_800.0) < 1e-15);
        assert!(rel(gamma(30.5).unwrap().value, 29.5 * gamma(29.5).unwrap().value) < 1e-13);
    }

    #[test]
    fn half_integer_values() {
        let sqrt_pi = PI.sqrt();
        assert!(rel(gamma(0.5).unwrap().value, sqrt_pi) < 1e-14);
        assert!(rel(gamma(-0.5).unwrap().value, -2.0 * sqrt_pi) < 1e-14);
        assert!(rel(gamma(1.5).unwrap().value, sqrt_pi / 2.0) < 1e-14);
    }

    #[test]
    fn poles_are_flagged() {
        for n in 0..6 {
            let g = gamma(-(n as f64)).unwrap();
            assert!(g.is_pole);
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 } / factorial(n);
            assert!((g.residue - expected).abs() < 1e-15);
        }
        assert!(gamma(-2.0 + 1e-11).unwrap().is_pole);
        assert!(!gamma(-2.0 + 1e-6).unwrap().is_pole);
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(gamma(180.0), Err(SpecfunError::Overflow { negative: false })));
        assert!(gamma(170.0).unwrap().value.is_finite());
        // tiny negative-argument values underflow gracefully
        assert!(gamma(-175.5).unwrap().value.abs() < 1e-300);
    }

    #[test]
    fn recurrence_large_and_negative() {
        for &x in &[0.3, 1.7, 6.2, 55.5, 150.25, -3.3, -40.7, -160.2] {
            let g0 = gamma(x).unwrap().value;
            let g1 = gamma(x + 1.0).unwrap().value;
            assert!(rel(g1 / g0, x) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 3.3, 20.0, 99.5] {
            assert!((ln_gamma(x) - gamma(x).unwrap().value.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0).unwrap() + euler).abs() < 1e-14);
        assert!((digamma(0.5).unwrap() + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - digamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(digamma(-4.0), Err(SpecfunError::DigammaPole { .. })));
    }

    #[test]
    fn pole_limit_argument_checks() {
        assert!(gamma_pole_limit(0, 0.0).is_err());
        assert!(gamma_pole_limit(0, 0.1).is_err());
        assert!((gamma_pole_limit(0, 1e-6).unwrap() + 1.0).abs() < 1e-4);
        assert!((gamma_pole_limit(3, 1e-6).unwrap() - 1.0 / 6.0).abs() < 1e-4);
        assert!((gamma_pole_limit(1, 1e-8).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pochhammer_basics() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(3.0, 3), 60.0);
        assert_eq!(pochhammer(-2.0, 3), 0.0);
    }
}
