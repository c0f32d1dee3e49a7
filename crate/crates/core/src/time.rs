//! Evolution times.
//!
//! Times are either exact rational fractions of a full turn, `t = 2π·k/m`,
//! or raw floating-point radians. The rational form lets integral
//! eigenvalues be turned into phases without any rounding drift.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Time {
    /// `t = 2π·k/m`, kept exactly as given (not reduced).
    Turns { k: i64, m: u64 },
    /// Raw time in radians.
    Radians(f64),
}

impl Time {
    pub fn turns(k: i64, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parse(
                "rational time needs a positive denominator".into(),
            ));
        }
        Ok(Time::Turns { k, m })
    }

    pub fn radians(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Parse(format!("time {t} is not finite")));
        }
        Ok(Time::Radians(t))
    }

    /// Time in radians.
    pub fn t(&self) -> f64 {
        match *self {
            Time::Turns { k, m } => TAU * k as f64 / m as f64,
            Time::Radians(t) => t,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Time::Turns { .. })
    }

    /// `exp(i·t·lambda)`.
    ///
    /// For a rational time and an eigenvalue within `int_tol` of an integer
    /// the phase is reduced exactly: `exp(2πi·((k·λ) mod m)/m)`.
    pub fn phase(&self, lambda: f64, int_tol: f64) -> Complex64 {
        if let Time::Turns { k, m } = *self {
            let rounded = lambda.round();
            if (lambda - rounded).abs() <= int_tol && rounded.abs() < 1e15 {
                let m_i = m as i128;
                let r = ((k as i128) * (rounded as i128)).rem_euclid(m_i);
                return root_of_unity(r as u64, m);
            }
        }
        Complex64::from_polar(1.0, self.t() * lambda)
    }

    /// The time shifted by `delta` radians, always as a raw float.
    pub fn perturbed(&self, delta: f64) -> Time {
        Time::Radians(self.t() + delta)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::Turns { k, m } => write!(f, "{k}/{m}"),
            Time::Radians(t) => write!(f, "{t:?}"),
        }
    }
}

impl FromStr for Time {
    type Err = Error;

    /// `"k/m"` is a rational number of turns; anything else is radians.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((k, m)) = s.split_once('/') {
            let k: i64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in time `{s}`")))?;
            let m: u64 = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in time `{s}`")))?;
            Time::turns(k, m)
        } else {
            let t: f64 = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad time `{s}`")))?;
            Time::radians(t)
        }
    }
}

/// `exp(2πi·r/m)` with quarter turns snapped to exact values.
pub fn root_of_unity(r: u64, m: u64) -> Complex64 {
    let r = r % m;
    if (4 * r).is_multiple_of(m) {
        return match 4 * r / m {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * r as f64 / m as f64)
}
