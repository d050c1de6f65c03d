//! Spherical-cap geometry and the radial quadrature shared by all solvers.
//!
//! A cap Ω_ε ⊂ S^N is the geodesic ball of radius θ_max = (1-ε)π around
//! the north pole. Radial functions live on a [`RadialGrid`]: composite
//! Gauss–Legendre panels on [0, θ_max], graded geometrically towards θ_max
//! where the antipodal point θ = π is closest.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::quadrature::GaussLegendre;
use crate::specfun::gamma;

/// Gauss–Legendre points per panel.
pub const PANEL_ORDER: usize = 16;
/// Default resolution.
pub const DEFAULT_NODES: usize = 512;
/// Smallest panel the geometric grading may produce.
pub const MIN_PANEL_WIDTH: f64 = 1e-8 * PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapError {
    #[error("dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),
    #[error("aperture parameter eps must lie in (0, 1) (got {0})")]
    InvalidEps(f64),
    #[error("grid needs at least {min} nodes (got {got})")]
    TooFewNodes { min: usize, got: usize },
    #[error("radial functions live on different grids")]
    GridMismatch,
    #[error("radial function has {got} values for {expected} grid nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },
}

/// Spherical cap {θ < (1-ε)π} on S^N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapDomain {
    dim: usize,
    eps: f64,
    theta_max: f64,
    radius: f64,
}

impl CapDomain {
    pub fn new(dim: usize, eps: f64) -> Result<Self, CapError> {
        if dim < 2 {
            return Err(CapError::InvalidDimension(dim));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(CapError::InvalidEps(eps));
        }
        let theta_max = (1.0 - eps) * PI;
        Ok(Self {
            dim,
            eps,
            theta_max,
            radius: stereographic_radius(theta_max),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// Radius of the stereographic image ball, tan(θ_max/2).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// ω_{N-1}, the area of the S^{N-1} slices.
    pub fn slice_area(&self) -> f64 {
        surface_area_sphere(self.dim - 1)
    }

    /// |Ω_ε| = ω_{N-1} ∫₀^{θ_max} sin^{N-1}θ dθ.
    pub fn area(&self) -> f64 {
        self.slice_area() * sin_power_integral(self.dim - 1, self.theta_max)
    }
}

pub fn make_domain(dim: usize, eps: f64) -> Result<CapDomain, CapError> {
    CapDomain::new(dim, eps)
}

/// ω_N = 2π^{(N+1)/2} / Γ((N+1)/2), the area of S^N.
pub fn surface_area_sphere(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h).expect("positive argument").value
}

/// r = tan(θ/2).
pub fn stereographic_radius(theta: f64) -> f64 {
    (theta / 2.0).tan()
}

/// θ = 2 arctan r.
pub fn polar_angle(r: f64) -> f64 {
    2.0 * r.atan()
}

/// Conformal factor p(r) = 2/(1+r²) of the stereographic metric.
pub fn conformal_factor(r: f64) -> f64 {
    2.0 / (1.0 + r * r)
}

/// ∫₀^t sin^n s ds.
///
/// Closed-form reduction for t >= 1; a 24-point Gauss rule below, where the
/// reduction formula cancels.
pub fn sin_power_integral(n: usize, t: f64) -> f64 {
    if t < 1.0 {
        thread_local! {
            static RULE: GaussLegendre = GaussLegendre::new(24);
        }
        return RULE.with(|gl| gl.integrate(0.0, t, |s| s.sin().powi(n as i32)));
    }
    let (s, c) = t.sin_cos();
    let mut prev2 = t; // n = 0
    let mut prev1 = 2.0 * (t / 2.0).sin().powi(2); // n = 1
    match n {
        0 => return prev2,
        1 => return prev1,
        _ => {}
    }
    let mut sk = s; // sin^{k-1}
    for k in 2..=n {
        let kf = k as f64;
        let cur = -sk * c / kf + (kf - 1.0) / kf * prev2;
        prev2 = prev1;
        prev1 = cur;
        sk *= s;
    }
    prev1
}

/// One Gauss–Legendre panel of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    /// Index of the panel's first node in the grid's node list.
    pub first: usize,
}

impl Panel {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= self.a && theta <= self.b
    }
}

/// Panel breakpoints on [0, θ_max] for a resolution of `n_nodes`.
///
/// Uniform panels, with the last one bisected repeatedly towards θ_max until
/// the final width is at most επ/2 (never below [`MIN_PANEL_WIDTH`]).
pub fn panel_breakpoints(dom: &CapDomain, n_nodes: usize) -> Vec<f64> {
    let theta_max = dom.theta_max();
    let budget = (n_nodes / PANEL_ORDER).max(1);
    let target = (dom.eps() * PI / 2.0).max(MIN_PANEL_WIDTH);
    let levels = |h: f64| -> usize {
        if h > target {
            (h / target).log2().ceil() as usize
        } else {
            0
        }
    };
    let uniform = budget.saturating_sub(levels(theta_max / budget as f64)).max(1);
    let h = theta_max / uniform as f64;
    let mut points: Vec<f64> = (0..uniform).map(|k| k as f64 * h).collect();
    let l = levels(h);
    for k in 1..=l {
        points.push(theta_max - h / 2f64.powi(k as i32));
    }
    points.push(theta_max);
    points
}

/// Composite Gauss–Legendre grid on [0, θ_max].
///
/// Nodes are `0`, the panel Gauss points, and `θ_max`; the endpoint nodes
/// carry zero weight. Weights integrate against the cap measure
/// ω_{N-1} sin^{N-1}θ dθ.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    domain: CapDomain,
    rule: GaussLegendre,
    integration: Vec<Vec<f64>>,
    differentiation: Vec<Vec<f64>>,
    panels: Vec<Panel>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    line_weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(dom: &CapDomain, n_nodes: usize) -> Result<Arc<Self>, CapError> {
        if n_nodes < PANEL_ORDER {
            return Err(CapError::TooFewNodes {
                min: PANEL_ORDER,
                got: n_nodes,
            });
        }
        let rule = GaussLegendre::new(PANEL_ORDER);
        let breaks = panel_breakpoints(dom, n_nodes);
        let omega = dom.slice_area();
        let power = (dom.dim() - 1) as i32;

        let mut nodes = vec![0.0];
        let mut weights = vec![0.0];
        let mut line_weights = vec![0.0];
        let mut panels = Vec::with_capacity(breaks.len() - 1);
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            panels.push(Panel {
                a,
                b,
                first: nodes.len(),
            });
            let half = (b - a) / 2.0;
            for (x, w) in rule.mapped_nodes(a, b).zip(&rule.weights) {
                nodes.push(x);
                line_weights.push(w * half);
                weights.push(omega * w * half * x.sin().powi(power));
            }
        }
        nodes.push(dom.theta_max());
        weights.push(0.0);
        line_weights.push(0.0);

        Ok(Arc::new(Self {
            domain: *dom,
            integration: rule.integration_matrix(),
            differentiation: rule.differentiation_matrix(),
            rule,
            panels,
            nodes,
            weights,
            line_weights,
        }))
    }

    /// Grid at the default resolution.
    pub fn default_for(dom: &CapDomain) -> Arc<Self> {
        Self::new(dom, DEFAULT_NODES).expect("default resolution is valid")
    }

    pub fn domain(&self) -> &CapDomain {
        &self.domain
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cap-measure quadrature weights (zero at the two endpoint nodes).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Plain dθ quadrature weights.
    pub fn line_weights(&self) -> &[f64] {
        &self.line_weights
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Reference-interval integration matrix of the panel rule.
    pub fn integration_matrix(&self) -> &[Vec<f64>] {
        &self.integration
    }

    /// Reference-interval differentiation matrix of the panel rule.
    pub fn differentiation_matrix(&self) -> &[Vec<f64>] {
        &self.differentiation
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Indices of the Gauss nodes (everything except the two endpoints).
    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.nodes.len() - 1
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other) || (self.domain == other.domain && self.nodes == other.nodes)
    }

    /// ∫ f dS over the cap for a function of θ.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// ∫ f dS from samples at the grid nodes.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    fn panel_index(&self, theta: f64) -> usize {
        match self.panels.binary_search_by(|p| p.b.total_cmp(&theta)) {
            Ok(i) => i,
            Err(i) => i.min(self.panels.len() - 1),
        }
    }
}

/// Samples of a function of θ on a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self, CapError> {
        if values.len() != grid.len() {
            return Err(CapError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CapError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn constant(grid: Arc<RadialGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at the pole θ = 0.
    pub fn at_pole(&self) -> f64 {
        self.values[0]
    }

    /// max |f| over the nodes; NaN if any sample is NaN.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(0.0, |m, v| if v > m || v.is_nan() { v } else { m })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Panel interpolant evaluated at an arbitrary θ in [0, θ_max].
    pub fn value_at(&self, theta: f64) -> f64 {
        let grid = &self.grid;
        let panel = grid.panels[grid.panel_index(theta)];
        let x = (2.0 * theta - panel.a - panel.b) / panel.width();
        let n = grid.rule.len();
        grid.rule
            .interpolate(&self.values[panel.first..panel.first + n], x.clamp(-1.0, 1.0))
    }

    /// -Δ of the radial function at the Gauss nodes, by spectral
    /// differentiation on each panel; endpoint entries are NaN.
    pub fn neg_laplacian(&self) -> Vec<f64> {
        let grid = &self.grid;
        let n = grid.rule.len();
        let d = &grid.differentiation;
        let power = (grid.domain.dim() - 1) as f64;
        let mut out = vec![f64::NAN; grid.len()];
        for panel in &grid.panels {
            let scale = 2.0 / panel.width();
            // differentiate deviations from the panel's first sample to limit
            // round-off when the values are large and nearly flat
            let v = &self.values[panel.first..panel.first + n];
            let base = v[0];
            let d1: Vec<f64> = (0..n)
                .map(|i| scale * d[i].iter().zip(v).map(|(a, b)| a * (b - base)).sum::<f64>())
                .collect();
            for i in 0..n {
                let d2 = scale * d[i].iter().zip(&d1).map(|(a, b)| a * b).sum::<f64>();
                let theta = grid.nodes[panel.first + i];
                let cot = theta.cos() / theta.sin();
                out[panel.first + i] = -d2 - power * cot * d1[i];
            }
        }
        out
    }
}

/// (f, g) = ω_{N-1} ∫₀^{θ_max} f g sin^{N-1}θ dθ.
pub fn inner_product(f: &RadialFunction, g: &RadialFunction) -> Result<f64, CapError> {
    if !f.grid.same_as(&g.grid) {
        return Err(CapError::GridMismatch);
    }
    Ok(f.grid
        .weights
        .iter()
        .zip(f.values.iter().zip(&g.values))
        .map(|(w, (a, b))| w * a * b)
        .sum())
}
