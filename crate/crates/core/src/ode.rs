//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

impl OdeError {
    /// Position of the failure.
    pub fn t(&self) -> f64 {
        match *self {
            OdeError::StepSizeUnderflow { t } | OdeError::TooManySteps { t } | OdeError::NonFinite { t } => t,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 200_000,
        }
    }
}

impl Dopri5 {
    /// Integrates y' = rhs(t, y) from `t0`, landing exactly on every entry of
    /// `stops` (strictly increasing, all > t0) and returning the states there.
    ///
    /// `on_step` sees every accepted step end point.
    pub fn integrate<const D: usize, F, O>(
        &self,
        rhs: F,
        t0: f64,
        y0: [f64; D],
        stops: &[f64],
        mut on_step: O,
    ) -> Result<Vec<[f64; D]>, OdeError>
    where
        F: Fn(f64, &[f64; D]) -> [f64; D],
        O: FnMut(f64, &[f64; D]),
    {
        let mut out = Vec::with_capacity(stops.len());
        let Some(&t_end) = stops.last() else {
            return Ok(out);
        };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        let mut h = self.initial_step(t0, t_end, &y, &k1);
        let mut next_stop = 0;
        let mut steps = 0;

        while next_stop < stops.len() {
            let target = stops[next_stop];
            if steps >= self.max_steps {
                return Err(OdeError::TooManySteps { t });
            }
            steps += 1;
            let remaining = target - t;
            let landing = h >= remaining;
            let step = if landing { remaining } else { h };
            if step <= f64::EPSILON * t.abs().max(1e-300) * 4.0 {
                return Err(OdeError::StepSizeUnderflow { t });
            }

            let mut k = [[0.0; D]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (r, kr) in k.iter().enumerate().take(s) {
                        acc += A[s][r] * kr[i];
                    }
                    *yi += step * acc;
                }
                k[s] = rhs(t + C[s] * step, &ys);
            }
            let mut y_new = y;
            for (i, yi) in y_new.iter_mut().enumerate() {
                let mut acc = 0.0;
                for r in 0..6 {
                    acc += A[6][r] * k[r][i];
                }
                *yi += step * acc;
            }
            let mut err = 0.0;
            for i in 0..D {
                let mut e = 0.0;
                for r in 0..7 {
                    e += E[r] * k[r][i];
                }
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (step * e / sc).powi(2);
            }
            let err = (err / D as f64).sqrt();
            if !err.is_finite() {
                if step <= 1e-14 * (t.abs() + 1.0) {
                    return Err(OdeError::NonFinite { t });
                }
                h = step * 0.1;
                continue;
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if landing { target } else { t + step };
                y = y_new;
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(OdeError::NonFinite { t });
                }
                k1 = k[6];
                on_step(t, &y);
                if landing {
                    out.push(y);
                    next_stop += 1;
                    // keep the unconstrained step size for the next leg
                    h = h.max(step * factor);
                } else {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(1.0);
            }
        }
        Ok(out)
    }

    fn initial_step<const D: usize>(&self, t0: f64, t_end: f64, y: &[f64; D], f: &[f64; D]) -> f64 {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..D {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 += (y[i] / sc).powi(2);
            d1 += (f[i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / D as f64).sqrt(), (d1 / D as f64).sqrt());
        let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h = h.min((t_end - t0).abs());
        if t0 > 0.0 {
            h = h.min(0.1 * t0);
        }
        h
    }
}
