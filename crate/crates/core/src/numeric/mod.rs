//! Quadrature, limits, root finding and ODE integration.

pub mod jet;
pub mod limit;
pub mod ode;
pub mod quadrature;
pub mod regression;
pub mod roots;

pub use jet::Jet;
pub use limit::{limit_at_zero, Limit, LimitConfig, LimitProbe};
pub use ode::{integrate_system, solve_radial_ode, Direction, OdeOptions, RadialSolution};
pub use quadrature::{integrate, Quadrant, Upper};

use crate::error::{Error, Result};

/// Whether an improper integral at a singular endpoint converges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Divergence {
    Convergent,
    Divergent,
}

/// Decides convergence of `∫_lower f` at the quadrant's lower endpoint from
/// the declared exponent, or from a log-log regression over `[δ/100, δ]`.
pub fn classify_divergence(q: &Quadrant<'_>) -> Result<Divergence> {
    let exponent = match q.lower_exponent() {
        Some(p) => p,
        None => {
            let a = q.lower();
            let span = match q.upper() {
                Upper::Finite(b) => (b - a).min(1.0),
                Upper::Infinity => 1.0,
            };
            let delta = 1e-4 * span;
            let slope = regression::log_log_slope(|d| q.eval(a + d), delta / 100.0, delta, 9)
                .ok_or_else(|| Error::Domain("integrand vanishes near the endpoint".into()))?;
            if (slope + 1.0).abs() <= 0.01 {
                return Err(Error::AmbiguousExponent { slope });
            }
            slope
        }
    };
    Ok(if exponent <= -1.0 {
        Divergence::Divergent
    } else {
        Divergence::Convergent
    })
}
