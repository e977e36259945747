//! Inclusive `start:stop:step` ranges.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Arithmetic progression `start, start + step, ...` up to `stop`.
///
/// `stop` is included when `(stop - start) / step` is an integer to within 1e-9.
/// Points are computed as `start + i * step`, never by repeated addition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSpec {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::Config("range bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::Config(format!(
                "range step must be positive, got {step}"
            )));
        }
        if stop < start {
            return Err(Error::Config(format!(
                "range stop {stop} is below start {start}"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn len(&self) -> usize {
        let span = (self.stop - self.start) / self.step;
        let nearest = span.round();
        if (span - nearest).abs() <= 1e-9 {
            nearest as usize + 1
        } else {
            span.floor() as usize + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for RangeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid number {p:?} in range {s:?}")))
        };
        match parts.as_slice() {
            [a] => {
                let v = num(a)?;
                Self::new(v, v, 1.0)
            }
            [a, b, c] => Self::new(num(a)?, num(b)?, num(c)?),
            _ => Err(Error::Config(format!(
                "range {s:?} must have the form start:stop:step"
            ))),
        }
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Cartesian product `xs × ys` in row-major order (x outer).
pub fn product(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_stop_when_integral() {
        let r: RangeSpec = "0.1:4.9:0.2".parse().unwrap();
        let pts = r.points();
        assert_eq!(pts.len(), 25);
        assert!((pts[24] - 4.9).abs() < 1e-12);
        assert_eq!(pts[0], 0.1);
    }

    #[test]
    fn stop_excluded_when_not_reached() {
        let r: RangeSpec = "0:1:0.3".parse().unwrap();
        assert_eq!(r.points(), vec![0.0, 0.3, 0.6, 0.8999999999999999]);
    }

    #[test]
    fn single_point_and_errors() {
        let r: RangeSpec = "2.5".parse().unwrap();
        assert_eq!(r.points(), vec![2.5]);
        assert!("1:0:0.1".parse::<RangeSpec>().is_err());
        assert!("0:1:0".parse::<RangeSpec>().is_err());
        assert!("0:1".parse::<RangeSpec>().is_err());
        assert!("a:1:0.1".parse::<RangeSpec>().is_err());
    }

    #[test]
    fn quarter_grid() {
        let r: RangeSpec = "0.25:8:0.25".parse().unwrap();
        assert_eq!(r.len(), 32);
        assert_eq!(product(&[1.0, 2.0], &[3.0]), vec![(1.0, 3.0), (2.0, 3.0)]);
    }
}
