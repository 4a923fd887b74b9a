//! Extended-real masses and mass addition rules.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Limit;

/// A mass in `[−∞, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ExtendedMass {
    Finite(f64),
    NegInfinity,
}

impl ExtendedMass {
    /// Snaps `|v| ≤ tol` to zero and rejects clearly positive values.
    pub fn from_value(v: f64, tol: f64) -> Result<Self> {
        if v == f64::NEG_INFINITY {
            return Ok(ExtendedMass::NegInfinity);
        }
        if v.is_nan() || v > tol {
            return Err(Error::Domain(format!("mass {v} outside [-inf, 0]")));
        }
        Ok(ExtendedMass::Finite(if v.abs() <= tol { 0.0 } else { v }))
    }

    pub fn from_limit(l: Limit, tol: f64) -> Result<Self> {
        match l {
            Limit::Finite(v) => Self::from_value(v, tol),
            Limit::NegInfinity => Ok(ExtendedMass::NegInfinity),
        }
    }

    /// As an `f64`, with `−∞` for the infinite variant.
    pub fn value(self) -> f64 {
        match self {
            ExtendedMass::Finite(v) => v,
            ExtendedMass::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_neg_infinity(self) -> bool {
        matches!(self, ExtendedMass::NegInfinity)
    }
}

impl PartialOrd for ExtendedMass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for ExtendedMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedMass::Finite(v) => write!(f, "{v}"),
            ExtendedMass::NegInfinity => f.write_str("-inf"),
        }
    }
}

/// `−(Σ|m_i|^{2/3})^{3/2}`; `−∞` is absorbing.
pub fn combine_zas_masses(masses: &[f64]) -> Result<f64> {
    if masses.is_empty() {
        return Err(Error::Domain("no masses to combine".into()));
    }
    if let Some(m) = masses.iter().find(|m| !(**m < 0.0)) {
        return Err(Error::Domain(format!("zas mass {m} is not negative")));
    }
    if masses.len() == 1 {
        return Ok(masses[0]);
    }
    if masses.iter().any(|m| m.is_infinite()) {
        return Ok(f64::NEG_INFINITY);
    }
    let s: f64 = masses.iter().map(|m| m.abs().powf(2.0 / 3.0)).sum();
    Ok(-s.powf(1.5))
}

/// `(Σ m_i²)^{1/2}`.
pub fn combine_bh_masses(masses: &[f64]) -> Result<f64> {
    if masses.is_empty() {
        return Err(Error::Domain("no masses to combine".into()));
    }
    if let Some(m) = masses.iter().find(|m| !(**m > 0.0)) {
        return Err(Error::Domain(format!("black hole mass {m} is not positive")));
    }
    Ok(masses.iter().map(|m| m * m).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zas_addition_examples() {
        assert_eq!(combine_zas_masses(&[-1.0]).unwrap(), -1.0);
        assert!((combine_zas_masses(&[-1.0, -1.0]).unwrap() + 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((combine_zas_masses(&[-8.0, -1.0]).unwrap() + 5f64.powf(1.5)).abs() < 1e-12);
        assert_eq!(combine_zas_masses(&[-1.0, f64::NEG_INFINITY]).unwrap(), f64::NEG_INFINITY);
        assert!(combine_zas_masses(&[0.0]).is_err());
    }

    #[test]
    fn bh_addition_examples() {
        assert!((combine_bh_masses(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(combine_bh_masses(&[2.5]).unwrap(), 2.5);
        assert!((combine_bh_masses(&[1.0; 4]).unwrap() - 2.0).abs() < 1e-14);
        assert!(combine_bh_masses(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn snapping_and_ordering() {
        assert_eq!(ExtendedMass::from_value(3e-7, 1e-6).unwrap(), ExtendedMass::Finite(0.0));
        assert!(ExtendedMass::from_value(0.1, 1e-6).is_err());
        assert!(ExtendedMass::NegInfinity < ExtendedMass::Finite(-1e300));
        let json = serde_json::to_string(&ExtendedMass::NegInfinity).unwrap();
        assert_eq!(serde_json::from_str::<ExtendedMass>(&json).unwrap(), ExtendedMass::NegInfinity);
    }
}
