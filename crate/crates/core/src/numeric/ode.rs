//! Dormand–Prince 5(4) integration of small ODE systems and the radial
//! second-order linear equation `u'' + p(r)u' + q(r)u = 0`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Inward integration stops here.
    pub r_min: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
            max_steps: 500_000,
            r_min: 1e-8,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coeffs: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coeffs) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction), calling
/// `observe` after every accepted step. Returns the state at `t1`.
pub fn integrate_system<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    let dir = (t1 - t0).signum();
    if dir == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let span = (t1 - t0).abs();
    let mut h = (1e-3 * span).min(1e-2 * t0.abs().max(span * 1e-6)).max(1e-300);
    let mut k1 = f(t, &y);
    let mut err_prev = 1e-4_f64;
    observe(t, &y);
    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-15 * t1.abs().max(1e-300) {
            return Ok(y);
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = dir * step;
        let k2 = f(t + C[1] * hs, &axpy(&y, hs, &[k1], &A2));
        let k3 = f(t + C[2] * hs, &axpy(&y, hs, &[k1, k2], &A3));
        let k4 = f(t + C[3] * hs, &axpy(&y, hs, &[k1, k2, k3], &A4));
        let k5 = f(t + C[4] * hs, &axpy(&y, hs, &[k1, k2, k3, k4], &A5));
        let k6 = f(t + C[5] * hs, &axpy(&y, hs, &[k1, k2, k3, k4, k5], &A6));
        let y_new = axpy(&y, hs, &[k1, k2, k3, k4, k5, k6], &B);
        let k7 = f(t + hs, &y_new);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = 0.0;
        for i in 0..N {
            let e: f64 = ks.iter().zip(E).map(|(k, c)| c * k[i]).sum::<f64>() * hs;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h = 0.25 * step;
        } else if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y_new;
            k1 = k7;
            observe(t, &y);
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = step * fac.clamp(0.2, 5.0);
            err_prev = err.max(1e-4);
            if last {
                return Ok(y);
            }
        } else {
            let fac = 0.9 * err.powf(-0.2);
            h = step * fac.clamp(0.1, 0.9);
        }
        if h < 1e-14 * t.abs().max(f64::MIN_POSITIVE) || h < 1e-300 {
            return Err(Error::StepUnderflow { at: t });
        }
    }
    Err(Error::StepUnderflow { at: t })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Inward,
    Outward { r_max: f64 },
}

/// Solution of a radial ODE with the endpoint value and slope.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    /// `(r, u, u')` after every accepted step.
    pub samples: Vec<(f64, f64, f64)>,
    pub end_r: f64,
    pub end_value: f64,
    pub end_slope: f64,
}

/// Integrates `u'' + p(r)u' + q(r)u = 0` from `r1` with `u(r1) = u1`,
/// `u'(r1) = du1`.
pub fn solve_radial_ode<P, Q>(
    p: P,
    q: Q,
    r1: f64,
    u1: f64,
    du1: f64,
    direction: Direction,
    opts: &OdeOptions,
) -> Result<RadialSolution>
where
    P: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
{
    if !(r1 > 0.0) {
        return Err(Error::Domain(format!("radial ODE needs r1 > 0, got {r1}")));
    }
    let end = match direction {
        Direction::Inward => opts.r_min,
        Direction::Outward { r_max } => r_max,
    };
    let rhs = |r: f64, y: &[f64; 2]| [y[1], -p(r) * y[1] - q(r) * y[0]];
    let mut samples = Vec::new();
    let y = integrate_system(rhs, r1, [u1, du1], end, opts, |r, y| samples.push((r, y[0], y[1])))?;
    Ok(RadialSolution {
        samples,
        end_r: end,
        end_value: y[0],
        end_slope: y[1],
    })
}
