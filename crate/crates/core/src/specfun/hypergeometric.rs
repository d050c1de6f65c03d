//! Gauss hypergeometric function F(a, b, c; x) on (-1, 1).
//!
//! Three evaluation routes:
//! * the defining power series, used for |x| <= [`X_SWITCH`];
//! * the connection formula to argument 1 - x, when c - a - b is not an
//!   integer;
//! * the logarithmic companion [`hyp_u`], when c - a - b is an integer and
//!   the connection formula degenerates.

use super::gamma::{digamma, factorial, gamma, rgamma};
use super::{nonpositive_integer, snap_integer, SpecfunError, SNAP_TOL};

/// Routing threshold between the direct series and the 1 - x routes.
pub const X_SWITCH: f64 = 0.5;
/// Hard cap on series length.
pub const MAX_TERMS: usize = 10_000;
/// Stop once |term| <= TERM_RATIO * |partial sum|.
pub const TERM_RATIO: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64, x: f64) -> Self {
        Self { a, b, c, x }
    }

    fn terminates(&self) -> bool {
        nonpositive_integer(self.a).is_some() || nonpositive_integer(self.b).is_some()
    }
}

/// Replaces parameters that sit within the snap tolerance of a non-positive
/// integer by that integer, so termination happens exactly.
fn snapped(v: f64) -> f64 {
    match nonpositive_integer(v) {
        Some(n) => -(n as f64),
        None => v,
    }
}

/// Direct summation of the hypergeometric series.
pub fn hyp2f1(p: Hyp2F1Params) -> Result<f64, SpecfunError> {
    if !p.x.is_finite() || (p.x.abs() >= 1.0 && !p.terminates()) {
        return Err(SpecfunError::Domain {
            what: "hypergeometric series needs |x| < 1",
            value: p.x,
        });
    }
    let (a, b, c, x) = (snapped(p.a), snapped(p.b), snapped(p.c), p.x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let num = (a + nf) * (b + nf);
        if num == 0.0 || x == 0.0 {
            return Ok(sum);
        }
        let cn = c + nf;
        if cn.abs() <= SNAP_TOL {
            return Err(SpecfunError::ParameterPole { c: p.c });
        }
        term *= num / (cn * (nf + 1.0)) * x;
        sum += term;
        if !sum.is_finite() {
            return Err(SpecfunError::SeriesStall {
                terms: n + 1,
                last_term: term.abs(),
            });
        }
        let next_ratio = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0)) * x).abs();
        if term.abs() <= TERM_RATIO * sum.abs() && next_ratio < 1.0 {
            return Ok(sum);
        }
    }
    Err(SpecfunError::SeriesStall {
        terms: MAX_TERMS,
        last_term: term.abs(),
    })
}

/// Connection formula expressing F(a, b, c; x) through two series in 1 - x.
///
/// Applies when none of c, a+b+1-c, c+1-a-b is a non-positive integer and
/// c - a - b is not zero; otherwise the caller must use [`hyp_u`].
pub fn hyp2f1_near_one(p: Hyp2F1Params) -> Result<f64, SpecfunError> {
    let Hyp2F1Params { a, b, c, x } = p;
    if !(x > 0.0 && x < 1.0) {
        return Err(SpecfunError::Domain {
            what: "connection formula is evaluated for x in (0, 1)",
            value: x,
        });
    }
    if nonpositive_integer(c).is_some() {
        return Err(SpecfunError::ConversionInapplicable {
            reason: "c is a non-positive integer",
        });
    }
    let s = c - a - b;
    if nonpositive_integer(a + b + 1.0 - c).is_some() {
        return Err(SpecfunError::ConversionInapplicable {
            reason: "a + b + 1 - c is a non-positive integer",
        });
    }
    if nonpositive_integer(c + 1.0 - a - b).is_some() {
        return Err(SpecfunError::ConversionInapplicable {
            reason: "c + 1 - a - b is a non-positive integer",
        });
    }
    if snap_integer(s) == Some(0) {
        return Err(SpecfunError::ConversionInapplicable {
            reason: "c - a - b vanishes",
        });
    }
    let y = 1.0 - x;
    let gc = gamma(c)?.finite(c)?;
    let mut total = 0.0;
    let w1 = rgamma(c - a) * rgamma(c - b);
    if w1 != 0.0 {
        let g = gamma(s)?.finite(s)?;
        total += gc * g * w1 * hyp2f1(Hyp2F1Params::new(a, b, a + b + 1.0 - c, y))?;
    }
    let w2 = rgamma(a) * rgamma(b);
    if w2 != 0.0 {
        let g = gamma(-s)?.finite(-s)?;
        total += gc * g * w2 * y.powf(s) * hyp2f1(Hyp2F1Params::new(c - a, c - b, 1.0 + s, y))?;
    }
    Ok(total)
}

/// Logarithmic companion solution U(α, β, ℓ; x) of the hypergeometric
/// equation with integer ℓ >= 1.
///
/// For c - a - b = 1 - ℓ it satisfies F(a, b, c; x) = Γ(c) U(a, b, ℓ; 1 - x).
pub fn hyp_u(alpha: f64, beta: f64, ell: u32, x: f64) -> Result<f64, SpecfunError> {
    if ell == 0 {
        return Err(SpecfunError::Domain {
            what: "U requires ell >= 1",
            value: 0.0,
        });
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(SpecfunError::Domain {
            what: "U is evaluated for x in (0, 1)",
            value: x,
        });
    }
    if snap_integer(alpha).is_some() {
        return Err(SpecfunError::DegenerateParameter {
            which: "alpha",
            value: alpha,
        });
    }
    if snap_integer(beta).is_some() {
        return Err(SpecfunError::DegenerateParameter {
            which: "beta",
            value: beta,
        });
    }
    let l = ell as f64;
    let prefactor = if ell.is_multiple_of(2) { 1.0 } else { -1.0 } * rgamma(alpha + 1.0 - l) * rgamma(beta + 1.0 - l)
        / factorial(ell - 1);

    // F(α, β, ℓ; x) and the digamma-weighted series share their terms
    let mut psi_a = digamma(alpha)?;
    let mut psi_b = digamma(beta)?;
    let mut psi_1 = digamma(1.0)?;
    let mut psi_l = digamma(l)?;
    let mut term = 1.0;
    let mut f_sum = 0.0;
    let mut psi_sum = 0.0;
    let mut converged = false;
    for i in 0..MAX_TERMS {
        let weight = psi_a + psi_b - psi_1 - psi_l;
        f_sum += term;
        psi_sum += term * weight;
        let fi = i as f64;
        let small = term.abs() <= TERM_RATIO * f_sum.abs().max(f64::MIN_POSITIVE)
            && (term * weight).abs() <= TERM_RATIO * psi_sum.abs().max(f64::MIN_POSITIVE);
        let next_ratio = ((alpha + fi) * (beta + fi) / ((l + fi) * (fi + 1.0)) * x).abs();
        if (small && next_ratio < 1.0) || term == 0.0 {
            converged = true;
            break;
        }
        term *= (alpha + fi) * (beta + fi) / ((l + fi) * (fi + 1.0)) * x;
        psi_a += 1.0 / (alpha + fi);
        psi_b += 1.0 / (beta + fi);
        psi_1 += 1.0 / (fi + 1.0);
        psi_l += 1.0 / (l + fi);
    }
    if !converged {
        return Err(SpecfunError::SeriesStall {
            terms: MAX_TERMS,
            last_term: term.abs(),
        });
    }
    let mut value = prefactor * (f_sum * x.ln() + psi_sum);

    if ell >= 2 {
        let mut finite = 0.0;
        let mut t = 1.0;
        for i in 0..=(ell - 2) {
            let fi = i as f64;
            finite += t;
            t *= (alpha + 1.0 - l + fi) * (beta + 1.0 - l + fi) / ((2.0 - l + fi) * (fi + 1.0)) * x;
        }
        value += factorial(ell - 2) * rgamma(alpha) * rgamma(beta) * x.powf(1.0 - l) * finite;
    }
    Ok(value)
}

/// F(a, b, c; x) on (-1, 1) with automatic routing between the series, the
/// connection formula and the U representation.
pub fn hyp2f1_auto(p: Hyp2F1Params) -> Result<f64, SpecfunError> {
    let Hyp2F1Params { a, b, c, x } = p;
    if p.terminates() || x.abs() <= X_SWITCH {
        return hyp2f1(p);
    }
    if !(x > -1.0 && x < 1.0) {
        return Err(SpecfunError::Domain {
            what: "hypergeometric argument must lie in (-1, 1)",
            value: x,
        });
    }
    if x < 0.0 {
        // Pfaff: maps (-1, -1/2) onto (1/3, 1/2)
        let z = x / (x - 1.0);
        return Ok((1.0 - x).powf(-a) * hyp2f1(Hyp2F1Params::new(a, c - b, c, z))?);
    }
    match hyp2f1_near_one(p) {
        Ok(v) => Ok(v),
        Err(SpecfunError::ConversionInapplicable { .. }) => {
            if nonpositive_integer(c).is_some() {
                return Err(SpecfunError::ParameterPole { c });
            }
            let s = c - a - b;
            match snap_integer(s) {
                Some(k) if k <= 0 => integer_gap_via_u(a, b, c, x, (1 - k) as u32),
                Some(k) => {
                    // Euler: F(a,b,c;x) = (1-x)^(c-a-b) F(c-a, c-b, c; x)
                    let inner = integer_gap_via_u(c - a, c - b, c, x, (1 + k) as u32)?;
                    Ok((1.0 - x).powf(s) * inner)
                }
                None => hyp2f1(p),
            }
        }
        Err(e) => Err(e),
    }
}

/// F(a, b, c; x) with c - a - b = 1 - ell, through Γ(c) U(a, b, ell; 1 - x).
fn integer_gap_via_u(a: f64, b: f64, c: f64, x: f64, ell: u32) -> Result<f64, SpecfunError> {
    if snap_integer(a).is_some() || snap_integer(b).is_some() {
        // positive-integer a or b: U degenerates, the series still converges
        return hyp2f1(Hyp2F1Params::new(a, b, c, x));
    }
    let gc = gamma(c)?.finite(c)?;
    Ok(gc * hyp_u(a, b, ell, 1.0 - x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain partial sums with no early stop, for cross-checks.
    fn brute_series(a: f64, b: f64, c: f64, x: f64, terms: usize) -> f64 {
        let mut t = 1.0;
        let mut s = 1.0;
        for n in 0..terms {
            let nf = n as f64;
            t *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
            s += t;
        }
        s
    }

    #[test]
    fn trivial_argument() {
        assert_eq!(hyp2f1(Hyp2F1Params::new(0.3, 1.7, 2.2, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn terminating_polynomial() {
        let t = 0.3;
        let v = hyp2f1(Hyp2F1Params::new(-1.0, 2.0, 1.0, (1.0 - t) / 2.0)).unwrap();
        assert!((v - t).abs() < 1e-15);
        // terminates before the pole of c = -3
        let v = hyp2f1(Hyp2F1Params::new(-2.0, 1.0, -3.0, 0.5)).unwrap();
        let exact = 1.0 + (-2.0 / -3.0) * 0.5 + (-2.0 * -1.0 * 1.0 * 2.0) / (-3.0 * -2.0 * 2.0) * 0.25;
        assert!((v - exact).abs() < 1e-15);
    }

    #[test]
    fn log_series() {
        let v = hyp2f1(Hyp2F1Params::new(1.0, 1.0, 2.0, 0.5)).unwrap();
        let oracle: f64 = (0..200).map(|n| 0.5f64.powi(n) / (n as f64 + 1.0)).sum();
        assert!((v - oracle).abs() < 1e-14);
        assert!((v - 1.386_294_361_119_890_6).abs() < 1e-13);
    }

    #[test]
    fn pole_in_c_is_reported() {
        assert!(matches!(
            hyp2f1(Hyp2F1Params::new(0.5, 0.5, -2.0, 0.3)),
            Err(SpecfunError::ParameterPole { .. })
        ));
    }

    #[test]
    fn stall_is_reported() {
        let err = hyp2f1(Hyp2F1Params::new(0.5, 0.5, 0.7, 0.99999)).unwrap_err();
        assert!(matches!(err, SpecfunError::SeriesStall { .. }));
    }

    #[test]
    fn conversion_matches_series_at_overlap() {
        let p = Hyp2F1Params::new(0.5, 0.5, 1.5, 0.6);
        let direct = hyp2f1(p).unwrap();
        let conv = hyp2f1_near_one(p).unwrap();
        assert!((direct - conv).abs() < 1e-10 * direct.abs());
        // arcsin(√x)/√x
        let exact = 0.6f64.sqrt().asin() / 0.6f64.sqrt();
        assert!((direct - exact).abs() < 1e-14);
    }

    #[test]
    fn conversion_with_zero_numerator_parameter() {
        let v = hyp2f1_near_one(Hyp2F1Params::new(0.0, 1.0, 1.5, 0.9)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn conversion_against_brute_force() {
        let (a, b, c, x) = (-0.4, 1.4, 2.5, 0.95);
        let v = hyp2f1_near_one(Hyp2F1Params::new(a, b, c, x)).unwrap();
        let oracle = brute_series(a, b, c, x, 200_000);
        assert!((v - oracle).abs() < 1e-12 * oracle.abs(), "{v} vs {oracle}");
    }

    #[test]
    fn conversion_rejects_integer_gaps() {
        for &(a, b, c) in &[(0.3, 0.7, 1.0), (0.3, 0.7, 2.0), (0.3, 0.7, -1.0), (0.25, 0.5, 2.75)] {
            let r = hyp2f1_near_one(Hyp2F1Params::new(a, b, c, 0.8));
            assert!(
                matches!(r, Err(SpecfunError::ConversionInapplicable { .. })),
                "({a},{b},{c}) -> {r:?}"
            );
        }
    }

    #[test]
    fn u_rejects_integer_parameters() {
        assert!(matches!(
            hyp_u(2.0, 0.5, 1, 0.3),
            Err(SpecfunError::DegenerateParameter { which: "alpha", .. })
        ));
        assert!(matches!(
            hyp_u(0.5, -1.0, 2, 0.3),
            Err(SpecfunError::DegenerateParameter { which: "beta", .. })
        ));
    }

    #[test]
    fn u_inversion_identity() {
        // F(a, b, c; x) = Γ(c) U(a, b, a+b+1-c; 1-x) when a+b+1-c is a positive integer
        for &delta in &[0.0, 1e-3, -2e-2] {
            for ell in 1..=3u32 {
                let a = 0.3 + delta;
                let b = 0.45;
                let c = a + b + 1.0 - ell as f64;
                let x = 0.4;
                let f = brute_series(a, b, c, x, 400);
                let u = hyp_u(a, b, ell, 1.0 - x).unwrap();
                let gc = gamma(c).unwrap().value;
                assert!(
                    (gc * u - f).abs() < 1e-10 * f.abs(),
                    "ell={ell} delta={delta}: {} vs {f}",
                    gc * u
                );
            }
        }
    }

    #[test]
    fn u_leading_singularity() {
        // ell = 2: U ~ x^{-1} / (Γ(α)Γ(β)) as x -> 0
        let (a, b) = (0.3, 1.25);
        let lead = rgamma(a) * rgamma(b);
        let x = 1e-8;
        let v = hyp_u(a, b, 2, x).unwrap();
        assert!(((x * v) / lead - 1.0).abs() < 1e-6);
    }

    #[test]
    fn auto_routes_agree() {
        let cases = [
            (0.3, 0.9, 1.7, 0.8),
            (0.3, 0.9, 1.2, 0.8),   // c - a - b = 0
            (0.3, 0.7, 3.0, 0.9),   // c - a - b = 2
            (-0.3, 2.3, 1.0, 0.75), // c - a - b = -1
            (0.4, 0.8, 1.9, -0.8),
        ];
        for &(a, b, c, x) in &cases {
            let v = hyp2f1_auto(Hyp2F1Params::new(a, b, c, x)).unwrap();
            let oracle = brute_series(a, b, c, x, 400_000);
            assert!(
                (v - oracle).abs() < 1e-9 * oracle.abs().max(1.0),
                "{a},{b},{c},{x}: {v} vs {oracle}"
            );
        }
    }
}
