//! The torsion function -Δw = 1 in Ω_ε, w = 0 on ∂Ω_ε.
//!
//! Three routes are provided: the stereographic closed forms for N = 2, 3,
//! the radial Green's formula
//!
//! ```text
//! w(θ) = ∫_θ^{θ_max} sin^{1-N}t ∫₀^t sin^{N-1}s ds dt,
//! ```
//!
//! and the eigenfunction series w = Σ (1, φ_j)/λ_j φ_j.

use std::sync::Arc;

use thiserror::Error;

use crate::cap::{sin_power_integral, stereographic_radius, CapDomain, CapError, RadialFunction, RadialGrid};
use crate::eigen::{find_eigenvalue, find_eigenvalue_on, fourier_coefficient, EigenError};
use crate::quadrature::integrate_adaptive;

/// Default number of modes in the spectral route.
pub const DEFAULT_MODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorsionError {
    #[error("closed form exists only for dimensions 2 and 3 (got {0})")]
    Dimension(usize),
    #[error("spectral route needs 1..=12 modes (got {0})")]
    InvalidModes(usize),
    #[error("θ = {theta} lies outside [0, {theta_max}]")]
    OutOfRange { theta: f64, theta_max: f64 },
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {error_estimate:e})")]
    Refinement { a: f64, b: f64, error_estimate: f64 },
    #[error(transparent)]
    Cap(#[from] CapError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TorsionMethod {
    ClosedForm,
    GreensQuadrature,
    Spectral,
}

impl TorsionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TorsionMethod::ClosedForm => "closed",
            TorsionMethod::GreensQuadrature => "greens",
            TorsionMethod::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for TorsionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" | "closed_form" => Ok(TorsionMethod::ClosedForm),
            "greens" | "greens_quadrature" => Ok(TorsionMethod::GreensQuadrature),
            "spectral" => Ok(TorsionMethod::Spectral),
            other => Err(format!("unknown torsion method '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TorsionResult {
    pub w: RadialFunction,
    /// w at the pole, which is the maximum.
    pub max_value: f64,
    pub method: TorsionMethod,
    /// sup |-Δw - 1| over the interior nodes.
    pub residual: Option<f64>,
    /// Estimated series truncation error at the pole (spectral route only).
    pub tail_estimate: Option<f64>,
}

impl TorsionResult {
    fn build(w: RadialFunction, method: TorsionMethod, tail_estimate: Option<f64>) -> Self {
        let residual = laplacian_residual(&w, |_| 1.0);
        Self {
            max_value: w.at_pole(),
            w,
            method,
            residual: Some(residual),
            tail_estimate,
        }
    }
}

/// sup over interior nodes of |-Δu - source(θ)|.
pub(crate) fn laplacian_residual<F: Fn(usize) -> f64>(u: &RadialFunction, source: F) -> f64 {
    let lap = u.neg_laplacian();
    u.grid()
        .interior()
        .map(|i| (lap[i] - source(i)).abs())
        .fold(0.0, f64::max)
}

/// Closed-form torsion value at θ for N = 2 or 3.
pub fn closed_form_value(dom: &CapDomain, theta: f64) -> Result<f64, TorsionError> {
    let big_r = dom.radius();
    let r = stereographic_radius(theta);
    match dom.dim() {
        2 => Ok(((big_r - r) * (big_r + r) / (1.0 + r * r)).ln_1p()),
        3 => {
            let outer = (1.0 - big_r * big_r) / (2.0 * big_r) * big_r.atan();
            let inner = if r < 1e-4 {
                // (1-r²) atan(r)/(2r) = 1/2 - 2r²/3 + O(r⁴)
                0.5 - 2.0 * r * r / 3.0
            } else {
                (1.0 - r * r) / (2.0 * r) * r.atan()
            };
            Ok(inner - outer)
        }
        n => Err(TorsionError::Dimension(n)),
    }
}

/// Closed-form torsion function sampled on the default grid.
pub fn torsion_closed_form(dom: &CapDomain) -> Result<TorsionResult, TorsionError> {
    torsion_closed_form_on(&RadialGrid::default_for(dom))
}

pub fn torsion_closed_form_on(grid: &Arc<RadialGrid>) -> Result<TorsionResult, TorsionError> {
    let dom = *grid.domain();
    let values = grid
        .nodes()
        .iter()
        .map(|&t| closed_form_value(&dom, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values = values;
    *values.last_mut().expect("grid has nodes") = 0.0;
    let w = RadialFunction::new(grid.clone(), values)?;
    Ok(TorsionResult::build(w, TorsionMethod::ClosedForm, None))
}

/// Outer flux integrand sin^{1-N}t ∫₀^t sin^{N-1}s ds.
fn torsion_flux(dim: usize, t: f64) -> f64 {
    sin_power_integral(dim - 1, t) / t.sin().powi(dim as i32 - 1)
}

/// Given g at the grid nodes, returns ∫_θ^{θ_max} g dt at every node.
///
/// Uses the panel integration matrix, accumulating from θ_max towards the
/// pole so that small values near the boundary keep their relative accuracy.
pub(crate) fn integrate_to_boundary(grid: &RadialGrid, g: &[f64]) -> Vec<f64> {
    let rule = grid.rule();
    let s = grid.integration_matrix();
    let n = rule.len();
    let mut out = vec![0.0; grid.len()];
    let mut tail = 0.0;
    for panel in grid.panels().iter().rev() {
        let half = panel.width() / 2.0;
        let gp = &g[panel.first..panel.first + n];
        for i in 0..n {
            let to_end: f64 = (0..n).map(|j| (rule.weights[j] - s[i][j]) * gp[j]).sum();
            out[panel.first + i] = tail + half * to_end;
        }
        tail += half * rule.weights.iter().zip(gp).map(|(w, v)| w * v).sum::<f64>();
    }
    out[0] = tail;
    out
}

/// Green's-formula torsion function on `grid`.
pub fn torsion_greens(grid: &Arc<RadialGrid>) -> Result<TorsionResult, TorsionError> {
    let dim = grid.domain().dim();
    let g: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| if t == 0.0 { 0.0 } else { torsion_flux(dim, t) })
        .collect();
    let values = integrate_to_boundary(grid, &g);
    let w = RadialFunction::new(grid.clone(), values)?;
    Ok(TorsionResult::build(w, TorsionMethod::GreensQuadrature, None))
}

/// Green's-formula value at a single angle by adaptive Gauss–Kronrod.
pub fn torsion_greens_at(dom: &CapDomain, theta: f64) -> Result<f64, TorsionError> {
    let theta_max = dom.theta_max();
    if !(0.0..=theta_max).contains(&theta) {
        return Err(TorsionError::OutOfRange { theta, theta_max });
    }
    if theta == theta_max {
        return Ok(0.0);
    }
    let dim = dom.dim();
    let r = integrate_adaptive(
        |t| if t == 0.0 { 0.0 } else { torsion_flux(dim, t) },
        theta,
        theta_max,
        1e-300,
        1e-13,
        4000,
    );
    if !r.converged {
        return Err(TorsionError::Refinement {
            a: theta,
            b: theta_max,
            error_estimate: r.error_estimate,
        });
    }
    Ok(r.value)
}

/// Truncated eigenfunction series with `modes` radial modes.
pub fn torsion_spectral(grid: &Arc<RadialGrid>, modes: usize) -> Result<TorsionResult, TorsionError> {
    if modes == 0 || modes > crate::eigen::MAX_MODE {
        return Err(TorsionError::InvalidModes(modes));
    }
    let mut values = vec![0.0; grid.len()];
    let mut magnitudes = Vec::with_capacity(modes);
    for j in 1..=modes {
        let pair = find_eigenvalue_on(grid, j)?;
        let weight = fourier_coefficient(&pair) / pair.lambda;
        for (v, p) in values.iter_mut().zip(pair.phi.values()) {
            *v += weight * p;
        }
        magnitudes.push(weight.abs() * pair.phi.sup_norm());
    }
    let tail = power_law_tail(&magnitudes);
    let w = RadialFunction::new(grid.clone(), values)?;
    Ok(TorsionResult::build(w, TorsionMethod::Spectral, Some(tail)))
}

/// Σ_{j>J} a_j for a_j ~ C j^{-p} fitted to the last two terms; infinite
/// when the fitted decay is not summable.
pub fn power_law_tail(terms: &[f64]) -> f64 {
    let n = terms.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let (a_prev, a_last) = (terms[n - 2], terms[n - 1]);
    if a_last == 0.0 {
        return 0.0;
    }
    let jf = n as f64;
    let p = (a_prev / a_last).ln() / (jf / (jf - 1.0)).ln();
    if p <= 1.0 {
        return f64::INFINITY;
    }
    // ∫_{J+1/2}^∞ C t^{-p} dt with C = a_J J^p
    a_last * jf.powf(p) * (jf + 0.5).powf(1.0 - p) / (p - 1.0)
}

/// d(ε) = ‖w‖∞ - 1/λ₁.
pub fn sharpness_gap(dom: &CapDomain) -> Result<f64, TorsionError> {
    let w = torsion_greens(&RadialGrid::default_for(dom))?;
    let pair = find_eigenvalue(dom, 1)?;
    Ok(w.max_value - 1.0 / pair.lambda)
}
