//! Minimal solutions of the Gelfand problem -Δu = λ f(u), u = 0 on ∂Ω_ε.
//!
//! The minimal branch is reached by monotone iteration from u₀ = 0, and the
//! extremal parameter λ* is bracketed by bisection on convergence of that
//! iteration inside the analytic window
//!
//! ```text
//! 1/(a∗ ‖w‖∞) ≤ λ* ≤ λ₁/a∗,   a∗ = min_{s>0} f(s)/s.
//! ```

use std::fmt;
use std::sync::Arc;

use log::{debug, warn};
use thiserror::Error;

use crate::cap::{CapError, RadialFunction, RadialGrid};
use crate::eigen::{find_eigenvalue_on, EigenError};
use crate::quadrature::GaussLegendre;
use crate::roots::golden_section;
use crate::torsion::{integrate_to_boundary, laplacian_residual, torsion_greens, TorsionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GelfandError {
    #[error("f(0) must be positive (got {0})")]
    NonPositiveAtZero(f64),
    #[error("f(s)/s keeps decreasing up to s = {s:e}; growth condition violated")]
    GrowthCondition { s: f64 },
    #[error("f fails the convex non-decreasing spot check near s = {s}")]
    NotConvex { s: f64 },
    #[error("power nonlinearity needs p > 1 (got {0})")]
    InvalidExponent(f64),
    #[error("λ must be positive and finite (got {0})")]
    InvalidLambda(f64),
    #[error("bisection tolerance must lie in (1e-4, 0.1) (got {0})")]
    InvalidTolerance(f64),
    #[error("bracket inconsistency: iteration {outcome} at λ = {lambda} (bracket [{lo}, {hi}])")]
    BracketInconsistency {
        lambda: f64,
        lo: f64,
        hi: f64,
        outcome: &'static str,
    },
    #[error(transparent)]
    Cap(#[from] CapError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearityKind {
    Exponential,
    /// (1 + s)^p
    Power(f64),
    Custom,
}

impl fmt::Display for NonlinearityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearityKind::Exponential => write!(f, "exp"),
            NonlinearityKind::Power(p) => write!(f, "power:{p}"),
            NonlinearityKind::Custom => write!(f, "custom"),
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex, non-decreasing, superlinear f with f(0) > 0, together with
/// a∗ = min f(s)/s and its minimizer s∗.
#[derive(Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    eval: ScalarFn,
    a_star: f64,
    s_star: f64,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("kind", &self.kind)
            .field("a_star", &self.a_star)
            .field("s_star", &self.s_star)
            .finish()
    }
}

impl Nonlinearity {
    /// f(s) = e^s.
    pub fn exponential() -> Self {
        nonlinearity_stats(
            NonlinearityKind::Exponential,
            Arc::new(f64::exp),
            Some((std::f64::consts::E, 1.0)),
        )
        .expect("exp satisfies the growth assumptions")
    }

    /// f(s) = (1 + s)^p with p > 1.
    pub fn power(p: f64) -> Result<Self, GelfandError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(GelfandError::InvalidExponent(p));
        }
        let s_star = 1.0 / (p - 1.0);
        let a_star = (1.0 + s_star).powf(p) / s_star;
        nonlinearity_stats(
            NonlinearityKind::Power(p),
            Arc::new(move |s: f64| (1.0 + s).powf(p)),
            Some((a_star, s_star)),
        )
    }

    /// A user-supplied f, with optional analytic (a∗, s∗).
    pub fn custom<F>(f: F, analytic: Option<(f64, f64)>) -> Result<Self, GelfandError>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        nonlinearity_stats(NonlinearityKind::Custom, Arc::new(f), analytic)
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    pub fn a_star(&self) -> f64 {
        self.a_star
    }

    pub fn s_star(&self) -> f64 {
        self.s_star
    }
}

impl std::str::FromStr for Nonlinearity {
    type Err = String;

    /// Parses `exp` or `power:p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exp" {
            return Ok(Nonlinearity::exponential());
        }
        if let Some(p) = s.strip_prefix("power:") {
            let p: f64 = p.parse().map_err(|_| format!("invalid exponent in '{s}'"))?;
            return Nonlinearity::power(p).map_err(|e| e.to_string());
        }
        Err(format!("unknown nonlinearity '{s}' (expected exp or power:p)"))
    }
}

const GROWTH_LIMIT: f64 = 1e12;

/// Validates f and computes (a∗, s∗), numerically unless `analytic` is given.
pub fn nonlinearity_stats(
    kind: NonlinearityKind,
    eval: ScalarFn,
    analytic: Option<(f64, f64)>,
) -> Result<Nonlinearity, GelfandError> {
    let f0 = eval(0.0);
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(GelfandError::NonPositiveAtZero(f0));
    }
    for &s in &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let (lo, mid, hi) = (eval(s), eval(s + 0.25), eval(s + 0.5));
        if mid < lo || hi < mid || 2.0 * mid > (lo + hi) * (1.0 + 1e-12) {
            return Err(GelfandError::NotConvex { s });
        }
    }
    let (a_star, s_star) = match analytic {
        Some(pair) => pair,
        None => {
            let ratio = |s: f64| eval(s) / s;
            let mut s = 1.0;
            while ratio(2.0 * s) < ratio(s) {
                s *= 2.0;
                if s > GROWTH_LIMIT {
                    warn!("f(s)/s still decreasing at s = {s:e}");
                    return Err(GelfandError::GrowthCondition { s });
                }
            }
            while s > 1e-12 && ratio(s / 2.0) < ratio(s) {
                s /= 2.0;
            }
            let s_star = golden_section(ratio, s / 2.0, 2.0 * s, 1e-12);
            (ratio(s_star), s_star)
        }
    };
    Ok(Nonlinearity {
        kind,
        eval,
        a_star,
        s_star,
    })
}

/// sin^{-p} t ∫₀^t sin^p s f(s) ds on the panel [0, b], written as
/// t ∫₀¹ (sin(tx)/sin t)^p f(tx) dx so that nothing is divided by a tiny
/// sin^p t; f comes from the panel interpolant.
fn pole_flux(rule: &GaussLegendre, values: &[f64], b: f64, t: f64, power: i32) -> f64 {
    let st = t.sin();
    let mut sum = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let s = 0.5 * t * (x + 1.0);
        let f = rule.interpolate(values, 2.0 * s / b - 1.0);
        sum += w * (s.sin() / st).powi(power) * f;
    }
    0.5 * t * sum
}

/// Radial Green's operator: the solution of -Δu = source, u(θ_max) = 0,
/// regular at the pole.
pub fn poisson_solve(source: &RadialFunction) -> RadialFunction {
    let grid = source.grid();
    let rule = grid.rule();
    let s = grid.integration_matrix();
    let n = rule.len();
    let power = grid.domain().dim() as i32 - 1;
    let src = source.values();
    let mut g = vec![0.0; grid.len()];
    let mut acc = 0.0;
    for panel in grid.panels() {
        let half = panel.width() / 2.0;
        let idx = panel.first..panel.first + n;
        let weighted: Vec<f64> = grid.nodes()[idx.clone()]
            .iter()
            .zip(&src[idx])
            .map(|(t, v)| t.sin().powi(power) * v)
            .collect();
        for i in 0..n {
            let t = grid.nodes()[panel.first + i];
            g[panel.first + i] = if panel.a == 0.0 {
                pole_flux(rule, &src[panel.first..panel.first + n], panel.b, t, power)
            } else {
                let partial: f64 = s[i].iter().zip(&weighted).map(|(a, b)| a * b).sum();
                (acc + half * partial) / t.sin().powi(power)
            };
        }
        acc += half * rule.weights.iter().zip(&weighted).map(|(a, b)| a * b).sum::<f64>();
    }
    let values = integrate_to_boundary(grid, &g);
    RadialFunction::from_raw(grid.clone(), values)
}

/// Iteration limits for [`minimal_solution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    pub n_max: usize,
    pub blowup_cap: f64,
    /// Stop when ‖u_n - u_{n-1}‖∞ ≤ rel_tol (1 + ‖u_n‖∞).
    pub rel_tol: f64,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            n_max: 500,
            blowup_cap: 1e6,
            rel_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IterationStatus {
    Converged,
    /// The sup norm exceeded the blow-up cap or became non-finite.
    Diverged,
    /// The iteration budget ran out first.
    Stalled,
}

impl IterationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            IterationStatus::Converged => "converged",
            IterationStatus::Diverged => "diverged",
            IterationStatus::Stalled => "stalled",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimalSolution {
    pub lambda: f64,
    pub u: RadialFunction,
    pub iterations: usize,
    pub status: IterationStatus,
    pub sup_increment: f64,
    /// Every iterate dominated its predecessor at every node.
    pub monotone: bool,
    /// sup |-Δu - λ f(u)| at interior nodes, when converged.
    pub residual: Option<f64>,
}

impl MinimalSolution {
    pub fn converged(&self) -> bool {
        self.status == IterationStatus::Converged
    }
}

/// Monotone iteration u_n = G[λ f(u_{n-1})] from u₀ = 0.
pub fn minimal_solution(
    grid: &Arc<RadialGrid>,
    f: &Nonlinearity,
    lambda: f64,
    opts: &IterationOptions,
) -> Result<MinimalSolution, GelfandError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(GelfandError::InvalidLambda(lambda));
    }
    let mut u = RadialFunction::constant(grid.clone(), 0.0);
    let mut monotone = true;
    let mut sup_increment = f64::INFINITY;
    let mut status = IterationStatus::Stalled;
    let mut iterations = 0;
    while iterations < opts.n_max {
        iterations += 1;
        let next = poisson_solve(&u.map(|v| lambda * f.eval(v)));
        let norm = next.sup_norm();
        if norm.is_nan() || norm > opts.blowup_cap || next.values().iter().any(|v| !v.is_finite()) {
            status = IterationStatus::Diverged;
            u = next;
            break;
        }
        let slack = 1e-12 * (1.0 + norm);
        let mut inc: f64 = 0.0;
        for (a, b) in next.values().iter().zip(u.values()) {
            if a - b < -slack {
                monotone = false;
            }
            inc = inc.max((a - b).abs());
        }
        sup_increment = inc;
        u = next;
        if inc <= opts.rel_tol * (1.0 + norm) {
            status = IterationStatus::Converged;
            break;
        }
    }
    debug!("λ = {lambda}: {} after {iterations} iterations", status.as_str());
    let residual = (status == IterationStatus::Converged).then(|| {
        let values = u.values();
        laplacian_residual(&u, |i| lambda * f.eval(values[i]))
    });
    Ok(MinimalSolution {
        lambda,
        u,
        iterations,
        status,
        sup_increment,
        monotone,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaStarEstimate {
    /// 1/(a∗ ‖w‖∞)
    pub lower_analytic: f64,
    /// λ₁/a∗
    pub upper_analytic: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub tolerance: f64,
    pub a_star: f64,
    pub lambda1: f64,
    pub w_max: f64,
    /// Bisection points where the iteration stalled (counted as divergent).
    pub stalled: usize,
}

impl LambdaStarEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.bracket_lo + self.bracket_hi)
    }

    /// a∗ λ*_mid / λ₁.
    pub fn theorem_ratio(&self) -> f64 {
        self.a_star * self.midpoint() / self.lambda1
    }
}

/// Brackets λ* by bisection on convergence of [`minimal_solution`].
pub fn lambda_star_bracket(
    grid: &Arc<RadialGrid>,
    f: &Nonlinearity,
    tol: f64,
    opts: &IterationOptions,
) -> Result<LambdaStarEstimate, GelfandError> {
    if !(tol > 1e-4 && tol < 0.1) {
        return Err(GelfandError::InvalidTolerance(tol));
    }
    let w_max = torsion_greens(grid)?.max_value;
    let lambda1 = find_eigenvalue_on(grid, 1)?.lambda;
    let lower = 1.0 / (f.a_star() * w_max);
    let upper = lambda1 / f.a_star();

    let mut stalled = 0;
    // The lower bound is below λ* by construction, so a stall there only
    // means λ* is very close; divergence is a genuine inconsistency.
    match minimal_solution(grid, f, lower, opts)?.status {
        IterationStatus::Converged => {}
        IterationStatus::Stalled => {
            stalled += 1;
            warn!("iteration stalled at the lower bound λ = {lower}");
        }
        IterationStatus::Diverged => {
            return Err(GelfandError::BracketInconsistency {
                lambda: lower,
                lo: lower,
                hi: upper,
                outcome: "diverged",
            });
        }
    }
    let mut converges = |lambda: f64| -> Result<bool, GelfandError> {
        let sol = minimal_solution(grid, f, lambda, opts)?;
        if sol.status == IterationStatus::Stalled {
            stalled += 1;
        }
        Ok(sol.converged())
    };
    if converges(upper)? {
        return Err(GelfandError::BracketInconsistency {
            lambda: upper,
            lo: lower,
            hi: upper,
            outcome: "converged",
        });
    }
    let (mut lo, mut hi) = (lower, upper);
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(LambdaStarEstimate {
        lower_analytic: lower,
        upper_analytic: upper,
        bracket_lo: lo,
        bracket_hi: hi,
        tolerance: tol,
        a_star: f.a_star(),
        lambda1,
        w_max,
        stalled,
    })
}

/// a∗ λ*_mid / λ₁ on `grid`.
pub fn theorem_ratio(grid: &Arc<RadialGrid>, f: &Nonlinearity, tol: f64) -> Result<f64, GelfandError> {
    Ok(lambda_star_bracket(grid, f, tol, &IterationOptions::default())?.theorem_ratio())
}

/// min over interior nodes of -Δ(t∗w) - λ' f(t∗w) with t∗ = s∗/‖w‖∞ and
/// λ' = 1/(a∗‖w‖∞); nonnegative for a supersolution.
pub fn supersolution_defect(w: &RadialFunction, f: &Nonlinearity) -> f64 {
    let w_max = w.at_pole();
    let t_star = f.s_star() / w_max;
    let lambda = 1.0 / (f.a_star() * w_max);
    let v = w.scaled(t_star);
    let lap = v.neg_laplacian();
    w.grid()
        .interior()
        .map(|i| lap[i] - lambda * f.eval(v.values()[i]))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::CapDomain;
    use std::f64::consts::E;

    #[test]
    fn exponential_stats() {
        let f = Nonlinearity::exponential();
        assert_eq!((f.a_star(), f.s_star()), (E, 1.0));
        assert_eq!(f.kind().to_string(), "exp");
        let numeric = Nonlinearity::custom(f64::exp, None).unwrap();
        assert!((numeric.s_star() - 1.0).abs() < 1e-6);
        assert!((numeric.a_star() - E).abs() < 1e-10);
    }

    #[test]
    fn power_stats() {
        for p in [2.0_f64, 3.0, 1.5] {
            let s = 1.0 / (p - 1.0);
            let a = (p / (p - 1.0)).powf(p) * (p - 1.0);
            let f = Nonlinearity::power(p).unwrap();
            assert!((f.a_star() - a).abs() < 1e-14 * a);
            let numeric = Nonlinearity::custom(move |x: f64| (1.0 + x).powf(p), None).unwrap();
            assert!((numeric.s_star() - s).abs() < 1e-6 * s, "p={p}");
            assert!((numeric.a_star() - a).abs() < 1e-10 * a, "p={p}");
        }
        assert_eq!(
            Nonlinearity::power(1.0).unwrap_err(),
            GelfandError::InvalidExponent(1.0)
        );
    }

    #[test]
    fn invalid_nonlinearities() {
        assert!(matches!(
            Nonlinearity::custom(|s| s * s, None),
            Err(GelfandError::NonPositiveAtZero(_))
        ));
        assert!(matches!(
            Nonlinearity::custom(|s| 1.0 + s, None),
            Err(GelfandError::GrowthCondition { .. })
        ));
        assert!(matches!(
            Nonlinearity::custom(|s| 2.0 + s.sin(), None),
            Err(GelfandError::NotConvex { .. })
        ));
        let f = Nonlinearity::custom(f64::exp, Some((E, 1.0))).unwrap();
        assert_eq!(f.a_star(), E);
    }

    #[test]
    fn parse_nonlinearity() {
        assert_eq!(
            "exp".parse::<Nonlinearity>().unwrap().kind(),
            NonlinearityKind::Exponential
        );
        assert_eq!(
            "power:2".parse::<Nonlinearity>().unwrap().kind(),
            NonlinearityKind::Power(2.0)
        );
        assert!("power:x".parse::<Nonlinearity>().is_err());
        assert!("power:0.5".parse::<Nonlinearity>().is_err());
        assert!("sinh".parse::<Nonlinearity>().is_err());
    }

    #[test]
    fn poisson_reproduces_torsion_and_zero() {
        let dom = CapDomain::new(4, 0.15).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let w = torsion_greens(&grid).unwrap();
        let u = poisson_solve(&RadialFunction::constant(grid.clone(), 1.0));
        for (a, b) in u.values().iter().zip(w.w.values()) {
            assert!((a - b).abs() <= 1e-10 * w.max_value);
        }
        let z = poisson_solve(&RadialFunction::constant(grid, 0.0));
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn small_lambda_is_first_iterate() {
        let dom = CapDomain::new(2, 0.5).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let f = Nonlinearity::exponential();
        let sol = minimal_solution(&grid, &f, 1e-8, &IterationOptions::default()).unwrap();
        assert!(sol.converged());
        let w = torsion_greens(&grid).unwrap().w;
        for i in 0..grid.len() - 1 {
            let ratio = sol.u.values()[i] / (1e-8 * w.values()[i]);
            assert!((1.0..=1.0 + 1e-3).contains(&(ratio + 1e-12)), "{ratio}");
        }
    }

    #[test]
    fn poisson_of_one_is_torsion_in_high_dimension() {
        for dim in [6, 8, 10] {
            for &eps in &[0.5, 0.05] {
                let grid = RadialGrid::default_for(&CapDomain::new(dim, eps).unwrap());
                let w = torsion_greens(&grid).unwrap().w;
                let u = poisson_solve(&RadialFunction::constant(grid.clone(), 1.0));
                for (a, b) in u.values().iter().zip(w.values()) {
                    assert!(
                        (a - b).abs() <= 1e-12 * (1.0 + b.abs()),
                        "N={dim} eps={eps}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn large_lambda_diverges() {
        let dom = CapDomain::new(2, 0.5).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let f = Nonlinearity::exponential();
        let sol = minimal_solution(&grid, &f, 2.0 * 2.0 / E, &IterationOptions::default()).unwrap();
        assert!(!sol.converged());
        assert!(matches!(
            minimal_solution(&grid, &f, -1.0, &IterationOptions::default()),
            Err(GelfandError::InvalidLambda(_))
        ));
    }

    #[test]
    fn hemisphere_bracket() {
        let dom = CapDomain::new(2, 0.5).unwrap();
        let grid = RadialGrid::default_for(&dom);
        let f = Nonlinearity::exponential();
        let est = lambda_star_bracket(&grid, &f, 0.01, &IterationOptions::default()).unwrap();
        assert!((est.lower_analytic - 1.0 / (E * 2f64.ln())).abs() < 1e-8);
        assert!((est.upper_analytic - 2.0 / E).abs() < 1e-8);
        assert!(est.lower_analytic <= est.bracket_lo && est.bracket_hi <= est.upper_analytic);
        assert!(est.bracket_hi - est.bracket_lo <= 0.01 * est.bracket_hi);
        assert!(matches!(
            lambda_star_bracket(&grid, &f, 0.5, &IterationOptions::default()),
            Err(GelfandError::InvalidTolerance(_))
        ));
    }
}
