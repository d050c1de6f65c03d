//! Radial Dirichlet eigenpairs of -Δ on a spherical cap.
//!
//! Radial eigenfunctions solve
//!
//! ```text
//! (sin^{N-1}θ φ')' + λ sin^{N-1}θ φ = 0,   φ regular at θ = 0,  φ(θ_max) = 0.
//! ```
//!
//! [`shoot`] integrates the regular solution with φ(0) = 1 and
//! [`find_eigenvalue`] locates λ_j through Sturm zero counting followed by
//! Brent iteration on the endpoint value.

use std::sync::Arc;

use thiserror::Error;

use crate::cap::{inner_product, CapDomain, CapError, RadialFunction, RadialGrid};
use crate::ode::{Dopri5, OdeError};
use crate::roots::brent;
use crate::specfun::{factorial, legendre_p_hat, pochhammer, rgamma, SpecfunError};

/// Start of the integration; the Taylor seed covers [0, THETA_START].
pub const THETA_START: f64 = 1e-6;
/// Endpoint tolerance relative to the sup norm of the unnormalized profile.
pub const ENDPOINT_TOL: f64 = 1e-10;
/// Largest mode index the solver supports.
pub const MAX_MODE: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("integrator failure at θ = {theta}: {source}")]
    Integrator { theta: f64, source: OdeError },
    #[error("spectral scan exhausted for mode {j} (last upper bound {lambda_hi})")]
    ScanExhausted { j: usize, lambda_hi: f64 },
    #[error("mode index must lie in 1..={max} (got {j})")]
    InvalidMode { j: usize, max: usize },
    #[error("closed form needs dimension {expected} (got {got})")]
    Dimension { expected: usize, got: usize },
    #[error("coefficient {value:e} at eps = {eps} is below the quadrature noise floor")]
    SignalBelowNoise { eps: f64, value: f64 },
    #[error("decay fit needs at least 3 strictly decreasing eps values in (0, 1)")]
    InvalidSweep,
    #[error(transparent)]
    Cap(#[from] CapError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

impl From<OdeError> for EigenError {
    fn from(source: OdeError) -> Self {
        EigenError::Integrator {
            theta: source.t(),
            source,
        }
    }
}

/// A normalized radial eigenpair.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub j: usize,
    pub lambda: f64,
    /// Legendre degree with λ = ν(ν+1) - N(N-2)/4.
    pub nu: f64,
    /// K in φ = K P̂_ν^{(N-2)/2}(cos θ)/sin^{(N-2)/2}θ; for
    /// [`eigen_closed_n3`] the constant in φ = K sin(qθ)/sin θ.
    pub k_norm: f64,
    pub phi: RadialFunction,
}

impl EigenPair {
    pub fn dim(&self) -> usize {
        self.phi.grid().domain().dim()
    }
}

/// Endpoint value and interior sign changes of the regular solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootResult {
    pub endpoint: f64,
    pub zero_count: usize,
}

/// ν ≥ -1/2 solving ν(ν+1) = λ + N(N-2)/4.
pub fn nu_from_lambda(dim: usize, lambda: f64) -> f64 {
    let n = dim as f64;
    let c = lambda + n * (n - 2.0) / 4.0;
    0.5 * ((1.0 + 4.0 * c).max(0.0).sqrt() - 1.0)
}

/// λ = ν(ν+1) - N(N-2)/4.
pub fn lambda_from_nu(dim: usize, nu: f64) -> f64 {
    let n = dim as f64;
    nu * (nu + 1.0) - n * (n - 2.0) / 4.0
}

fn regular_seed(dim: usize, lambda: f64) -> [f64; 2] {
    let n = dim as f64;
    let t = THETA_START;
    [1.0 - lambda * t * t / (2.0 * n), -lambda * t / n]
}

struct SignCounter {
    last: f64,
    count: usize,
}

impl SignCounter {
    fn new() -> Self {
        Self { last: 1.0, count: 0 }
    }

    fn push(&mut self, v: f64) {
        if v != 0.0 {
            if v.signum() != self.last.signum() {
                self.count += 1;
            }
            self.last = v;
        }
    }
}

/// Integrates the regular solution to each of `stops`, returning values
/// there and the number of sign changes along the way.
fn integrate_profile(dim: usize, lambda: f64, stops: &[f64], solver: &Dopri5) -> Result<(Vec<f64>, usize), EigenError> {
    let power = (dim - 1) as f64;
    let rhs = move |t: f64, y: &[f64; 2]| {
        let cot = t.cos() / t.sin();
        [y[1], -power * cot * y[1] - lambda * y[0]]
    };
    let mut counter = SignCounter::new();
    let states = solver.integrate(rhs, THETA_START, regular_seed(dim, lambda), stops, |_, y| {
        counter.push(y[0])
    })?;
    Ok((states.iter().map(|y| y[0]).collect(), counter.count))
}

/// Shoots the regular solution with φ(0) = 1 to θ_max.
pub fn shoot(dom: &CapDomain, lambda: f64) -> Result<ShootResult, EigenError> {
    shoot_with(dom, lambda, &Dopri5::default())
}

fn shoot_with(dom: &CapDomain, lambda: f64, solver: &Dopri5) -> Result<ShootResult, EigenError> {
    if lambda == 0.0 {
        return Ok(ShootResult {
            endpoint: 1.0,
            zero_count: 0,
        });
    }
    let (values, zero_count) = integrate_profile(dom.dim(), lambda, &[dom.theta_max()], solver)?;
    Ok(ShootResult {
        endpoint: values[0],
        zero_count,
    })
}

/// Unnormalized regular solution at every grid node.
fn profile_on_grid(grid: &RadialGrid, lambda: f64, solver: &Dopri5) -> Result<Vec<f64>, EigenError> {
    let dim = grid.domain().dim();
    let nodes = grid.nodes();
    let split = nodes.partition_point(|&t| t <= THETA_START);
    let mut values: Vec<f64> = nodes[..split]
        .iter()
        .map(|&t| 1.0 - lambda * t * t / (2.0 * dim as f64))
        .collect();
    if split < nodes.len() {
        let (rest, _) = integrate_profile(dim, lambda, &nodes[split..], solver)?;
        values.extend(rest);
    }
    Ok(values)
}

/// The j-th radial Dirichlet eigenpair on the default grid.
pub fn find_eigenvalue(dom: &CapDomain, j: usize) -> Result<EigenPair, EigenError> {
    find_eigenvalue_on(&RadialGrid::default_for(dom), j)
}

/// The j-th radial Dirichlet eigenpair sampled on `grid`.
pub fn find_eigenvalue_on(grid: &Arc<RadialGrid>, j: usize) -> Result<EigenPair, EigenError> {
    if j == 0 || j > MAX_MODE {
        return Err(EigenError::InvalidMode { j, max: MAX_MODE });
    }
    let dom = *grid.domain();
    let solver = Dopri5::default();
    let lambda = locate_eigenvalue(&dom, j, &solver)?;
    let raw = profile_on_grid(grid, lambda, &solver)?;
    let raw = RadialFunction::new(grid.clone(), raw)?;
    let scale = 1.0 / inner_product(&raw, &raw)?.sqrt();
    let nu = nu_from_lambda(dom.dim(), lambda);
    Ok(EigenPair {
        j,
        lambda,
        nu,
        // the raw profile is 1 at the pole
        k_norm: scale / legendre_pole_value(dom.dim(), nu),
        phi: raw.scaled(scale),
    })
}

fn locate_eigenvalue(dom: &CapDomain, j: usize, solver: &Dopri5) -> Result<f64, EigenError> {
    let n = dom.dim() as f64;
    let jf = j as f64;
    let guess = (jf - 1.0) * (jf + n - 2.0);
    let mut lo = (guess / 2.0).max(0.0);
    let mut hi = 2.0 * guess + 5.0;
    let count = |lambda: f64| shoot_with(dom, lambda, solver).map(|r| r.zero_count);

    let mut widen = 0;
    while count(hi)? < j {
        lo = lo.max(hi);
        hi *= 2.0;
        widen += 1;
        if widen > 60 {
            return Err(EigenError::ScanExhausted { j, lambda_hi: hi });
        }
    }
    while lo > 0.0 && count(lo)? >= j {
        hi = hi.min(lo);
        lo = if lo < 1e-12 { 0.0 } else { lo / 2.0 };
    }

    // tighten until exactly one eigenvalue separates the ends
    let mut c_lo = count(lo)?;
    let mut c_hi = count(hi)?;
    let mut iterations = 0;
    while c_lo + 1 < j || c_hi > j {
        let mid = 0.5 * (lo + hi);
        let c = count(mid)?;
        if c >= j {
            hi = mid;
            c_hi = c;
        } else {
            lo = mid;
            c_lo = c;
        }
        iterations += 1;
        if iterations > 200 {
            return Err(EigenError::ScanExhausted { j, lambda_hi: hi });
        }
    }

    let endpoint = |lambda: f64| shoot_with(dom, lambda, solver).map(|r| r.endpoint);
    let f_lo = endpoint(lo)?;
    let f_hi = endpoint(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 || f_lo.signum() == f_hi.signum() {
        return Ok(hi);
    }
    brent(endpoint, lo, hi, f_lo, f_hi, 4.0 * f64::EPSILON * hi, ENDPOINT_TOL)
}

/// Three-dimensional closed form φ_j = K_j sin(jθ/(1-ε))/sin θ with
/// λ_j = j²/(1-ε)² - 1, normalized on `grid`.
pub fn eigen_closed_n3(grid: &Arc<RadialGrid>, j: usize) -> Result<EigenPair, EigenError> {
    let dom = *grid.domain();
    if dom.dim() != 3 {
        return Err(EigenError::Dimension {
            expected: 3,
            got: dom.dim(),
        });
    }
    if j == 0 {
        return Err(EigenError::InvalidMode { j, max: MAX_MODE });
    }
    let q = j as f64 / (1.0 - dom.eps());
    let lambda = q * q - 1.0;
    let raw = RadialFunction::from_fn(grid.clone(), |t| if t == 0.0 { q } else { (q * t).sin() / t.sin() });
    let k_norm = 1.0 / inner_product(&raw, &raw)?.sqrt();
    Ok(EigenPair {
        j,
        lambda,
        nu: nu_from_lambda(3, lambda),
        k_norm,
        phi: raw.scaled(k_norm),
    })
}

/// (1, φ_j) over the cap.
pub fn fourier_coefficient(pair: &EigenPair) -> f64 {
    pair.phi.grid().integrate_values(pair.phi.values())
}

/// Radial eigenfunction profile from the Legendre representation
/// P̂_ν^{(N-2)/2}(cos θ) / sin^{(N-2)/2}θ, normalized with positive value at
/// the pole.
pub fn legendre_eigenfunction(grid: &Arc<RadialGrid>, nu: f64) -> Result<RadialFunction, EigenError> {
    let dim = grid.domain().dim();
    let order = (dim as f64 - 2.0) / 2.0;
    let pole = legendre_pole_value(dim, nu);
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid.nodes() {
        if t == 0.0 {
            values.push(pole);
        } else {
            values.push(legendre_p_hat(nu, order, t.cos())? / t.sin().powf(order));
        }
    }
    let raw = RadialFunction::new(grid.clone(), values)?;
    let norm = inner_product(&raw, &raw)?.sqrt();
    let sign = if raw.at_pole() < 0.0 { -1.0 } else { 1.0 };
    Ok(raw.scaled(sign / norm))
}

/// lim_{θ→0} P̂_ν^{(N-2)/2}(cos θ)/sin^{(N-2)/2}θ.
pub fn legendre_pole_value(dim: usize, nu: f64) -> f64 {
    if dim.is_multiple_of(2) {
        // integer order m: (1-t²)^{m/2} cancels the sine power
        let m = (dim - 2) / 2;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * pochhammer(nu - m as f64 + 1.0, 2 * m) / (factorial(m as u32) * 2f64.powi(m as i32))
    } else {
        let order = (dim as f64 - 2.0) / 2.0;
        2f64.powf(-order) * rgamma(1.0 + order)
    }
}

/// Noise floor below which Fourier coefficients are not trusted.
pub const COEFFICIENT_NOISE_FLOOR: f64 = 1e-11;

/// Least-squares slope of log|(1, φ_j)| against log ε.
pub fn decay_exponent_estimate(dim: usize, j: usize, eps_list: &[f64]) -> Result<f64, EigenError> {
    if !(2..=MAX_MODE).contains(&j) {
        return Err(EigenError::InvalidMode { j, max: MAX_MODE });
    }
    if eps_list.len() < 3
        || eps_list.windows(2).any(|w| w[1] >= w[0])
        || eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0))
    {
        return Err(EigenError::InvalidSweep);
    }
    let mut points = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let dom = CapDomain::new(dim, eps)?;
        let pair = find_eigenvalue(&dom, j)?;
        let c = fourier_coefficient(&pair);
        if c.abs() < COEFFICIENT_NOISE_FLOOR {
            return Err(EigenError::SignalBelowNoise { eps, value: c });
        }
        points.push((eps.ln(), c.abs().ln()));
    }
    Ok(least_squares_slope(&points))
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
