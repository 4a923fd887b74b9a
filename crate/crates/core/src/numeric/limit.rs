//! One-sided limits at the origin by geometric sampling and Wynn ε
//! extrapolation, with monotone-divergence detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extended-real outcome of a one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Limit {
    Finite(f64),
    NegInfinity,
}

impl Limit {
    pub fn finite(self) -> Option<f64> {
        match self {
            Limit::Finite(v) => Some(v),
            Limit::NegInfinity => None,
        }
    }
}

/// Sampling configuration for [`limit_at_zero`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConfig {
    pub rho0: f64,
    pub tol: f64,
    /// Samples below this value, decreasing monotonically, signal `−∞`.
    pub divergence_threshold: f64,
    pub min_samples: usize,
    pub max_samples: usize,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            rho0: 1.0,
            tol: 1e-6,
            divergence_threshold: -1e8,
            min_samples: 6,
            max_samples: 1000,
        }
    }
}

impl LimitConfig {
    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// The sampled sequence and its extrapolated limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    pub sample_points: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolant: Limit,
}

fn aitken(x0: f64, x1: f64, x2: f64) -> f64 {
    let d1 = x2 - x1;
    let d2 = x2 - 2.0 * x1 + x0;
    let scale = x0.abs().max(x1.abs()).max(x2.abs());
    if d2 == 0.0 || d2.abs() <= 1e-14 * scale || !d2.is_finite() {
        x2
    } else {
        x2 - d1 * d1 / d2
    }
}

/// Wynn's ε-algorithm on the last five samples (the ε₄ column, which is
/// Shanks' e₂). Exact for a limit plus two geometric components. Falls back
/// to Aitken's Δ² when a difference vanishes.
fn extrapolate(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 3 {
        return v[n - 1];
    }
    let fallback = aitken(v[n - 3], v[n - 2], v[n - 1]);
    if n < 5 {
        return fallback;
    }
    let tail = &v[n - 5..];
    let scale = tail.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut prev = [0.0; 6];
    let mut cur: Vec<f64> = tail.to_vec();
    for _ in 0..4 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 || !d.is_finite() || d.abs() <= 1e-15 * scale {
                return fallback;
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        prev[..cur.len()].copy_from_slice(&cur);
        cur = next;
    }
    if cur[0].is_finite() {
        cur[0]
    } else {
        fallback
    }
}

fn monotone_run(values: &[f64], len: usize, decreasing: bool) -> bool {
    if values.len() < len {
        return false;
    }
    values[values.len() - len..].windows(2).all(|w| {
        if decreasing {
            w[1] < w[0]
        } else {
            w[1] > w[0]
        }
    })
}

/// Differences of the raw samples are shrinking, so the sequence is not
/// running away towards an antilimit.
fn contracting(values: &[f64], tol: f64) -> bool {
    let n = values.len();
    if n < 4 {
        return false;
    }
    let scale = values[n - 1].abs().max(1.0);
    (n - 3..n).all(|k| {
        let prev = (values[k - 1] - values[k - 2]).abs();
        let cur = (values[k] - values[k - 1]).abs();
        cur <= tol * scale || cur < prev
    })
}

/// Evaluates `lim_{ρ→0⁺} f(ρ)` from samples at `ρ₀·2^{−k}`.
pub fn limit_at_zero<F: Fn(f64) -> Result<f64>>(f: F, cfg: &LimitConfig) -> Result<LimitProbe> {
    if !(cfg.rho0 > 0.0) || !(cfg.tol > 0.0) {
        return Err(Error::Domain("limit probe needs rho0 > 0 and tol > 0".into()));
    }
    let mut points = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    let mut rho = cfg.rho0;
    let min_samples = cfg.min_samples.max(6);
    for _ in 0..cfg.max_samples {
        if rho < 1e-300 {
            break;
        }
        let v = f(rho)?;
        if v.is_nan() {
            return Err(Error::Domain(format!("limit sample is NaN at {rho:e}")));
        }
        points.push(rho);
        values.push(v);
        rho *= 0.5;
        let n = values.len();
        if v == f64::NEG_INFINITY
            || (n >= min_samples
                && v < cfg.divergence_threshold
                && monotone_run(&values, min_samples, true))
        {
            return Ok(LimitProbe {
                sample_points: points,
                values,
                extrapolant: Limit::NegInfinity,
            });
        }
        if v == f64::INFINITY
            || (n >= min_samples
                && v > -cfg.divergence_threshold
                && monotone_run(&values, min_samples, false))
        {
            return Err(Error::DivergesUpward);
        }
        estimates.push(extrapolate(&values));
        let m = estimates.len();
        if n >= min_samples && contracting(&values, cfg.tol) {
            let e = estimates[m - 1];
            let gate = cfg.tol * e.abs().max(1.0);
            let d1 = (e - estimates[m - 2]).abs();
            let d0 = (estimates[m - 2] - estimates[m - 3]).abs();
            // Two-rate sequences make the estimates plateau briefly before
            // drifting on; accept only once the changes shrink fast enough
            // that their geometric tail stays inside the gate.
            let settled = d1 <= 1e-13 * e.abs().max(1.0) || (d1 < d0 && d1 * d1 / (d0 - d1) <= gate);
            if d1 <= gate && d0 <= gate && settled {
                return Ok(LimitProbe {
                    sample_points: points,
                    values,
                    extrapolant: Limit::Finite(e),
                });
            }
        }
    }
    let last = values[values.len().saturating_sub(6)..].to_vec();
    Err(Error::Oscillatory { last })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl Fn(f64) -> f64) -> Result<Limit> {
        limit_at_zero(|r| Ok(f(r)), &LimitConfig::default()).map(|p| p.extrapolant)
    }

    #[test]
    fn linear_through_origin() {
        let l = run(|r| -2.0 * r).unwrap().finite().unwrap();
        assert!(l.abs() < 1e-6);
    }

    #[test]
    fn pole_is_negative_infinity() {
        assert_eq!(run(|r| -1.0 / r).unwrap(), Limit::NegInfinity);
    }

    #[test]
    fn slow_divergence_is_detected() {
        let l = run(|r| -r.powf(-0.5) / (r.ln() * r.ln())).unwrap();
        assert_eq!(l, Limit::NegInfinity);
    }

    #[test]
    fn upward_divergence_is_an_error() {
        assert_eq!(run(|r| 1.0 / r), Err(Error::DivergesUpward));
    }

    #[test]
    fn fractional_powers_are_extrapolated() {
        let l = run(|r| -2.0 / 9.0 + 0.7 * r.cbrt() - 0.3 * r.powf(2.0 / 3.0))
            .unwrap()
            .finite()
            .unwrap();
        assert!((l + 2.0 / 9.0).abs() < 1e-6, "{l}");
    }

    #[test]
    fn oscillation_is_reported() {
        let r = run(|r| (1.0 / r).sin());
        assert!(matches!(r, Err(Error::Oscillatory { .. })));
    }

    #[test]
    fn samples_are_strictly_decreasing() {
        let p = limit_at_zero(|r| Ok(3.0 + r), &LimitConfig::default()).unwrap();
        assert!(p.sample_points.windows(2).all(|w| w[1] < w[0]));
        assert!(p.sample_points.len() >= 6);
    }
}
