//! Gauss–Legendre rules, per-panel spectral integration/differentiation
//! matrices, and an adaptive Gauss–Kronrod integrator.

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// P_k(x) for k = 0..=n.
fn legendre_polys(n: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    p
}

impl GaussLegendre {
    /// `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, largest root first
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped to [a, b].
    pub fn mapped_nodes(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        self.nodes.iter().map(move |&x| mid + half * x)
    }

    /// ∫_a^b f.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// S[i][j] = ∫_{-1}^{x_i} ℓ_j(s) ds for the Lagrange basis ℓ_j on the nodes.
    pub fn integration_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let at_nodes: Vec<Vec<f64>> = self.nodes.iter().map(|&x| legendre_polys(n, x)).collect();
        (0..n)
            .map(|i| {
                let pi = &at_nodes[i];
                (0..n)
                    .map(|j| {
                        let pj = &at_nodes[j];
                        // ℓ_j = Σ_k (2k+1)/2 w_j P_k(x_j) P_k, integrated term by term
                        let mut s = 0.5 * self.weights[j] * (self.nodes[i] + 1.0);
                        for k in 1..n {
                            s += 0.5 * self.weights[j] * pj[k] * (pi[k + 1] - pi[k - 1]);
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }

    /// D[i][j] = ℓ_j'(x_i), from barycentric weights.
    pub fn differentiation_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let bary: Vec<f64> = (0..n)
            .map(|j| {
                let prod: f64 = (0..n)
                    .filter(|&k| k != j)
                    .map(|k| (self.nodes[j] - self.nodes[k]) * 2.0)
                    .product();
                1.0 / prod
            })
            .collect();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = bary[j] / bary[i] / (self.nodes[i] - self.nodes[j]);
                    d[i][j] = v;
                    diag -= v;
                }
            }
            d[i][i] = diag;
        }
        d
    }

    /// Barycentric Lagrange interpolation of node values at `x` in [-1, 1].
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (&node, &v)) in self.nodes.iter().zip(values).enumerate() {
            let dx = x - node;
            if dx == 0.0 {
                return v;
            }
            let wj = self.barycentric_weight(j) / dx;
            num += wj * v;
            den += wj;
        }
        num / den
    }

    fn barycentric_weight(&self, j: usize) -> f64 {
        // proportional to (-1)^j sqrt((1 - x_j²) w_j) for Gauss nodes
        let x = self.nodes[j];
        let s = ((1.0 - x * x) * self.weights[j]).sqrt();
        if j.is_multiple_of(2) {
            s
        } else {
            -s
        }
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let p = legendre_polys(n, x);
    let pn = p[n];
    let pn1 = if n >= 1 { p[n - 1] } else { 0.0 };
    let d = n as f64 * (x * pn - pn1) / (x * x - 1.0);
    (pn, d)
}

// Gauss–Kronrod 7/15 rule on [-1, 1]
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let fc = f(mid);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Outcome of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Globally adaptive G7/K15 bisection until the summed error estimate is
/// below `max(abs_tol, rel_tol·|I|)` or `max_intervals` is reached.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> AdaptiveResult {
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return AdaptiveResult {
                value,
                error_estimate: error,
                converged: true,
            };
        }
        if intervals.len() >= max_intervals {
            return AdaptiveResult {
                value,
                error_estimate: error,
                converged: false,
            };
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty interval list");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return AdaptiveResult {
                value,
                error_estimate: error,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}
