//! Convex and concave solutions of φ(x+1) = φ(x) + F(x).
//!
//! When F is convex or concave on (a, ∞) and F(x+1) − F(x) → 0, the equation
//! has exactly one solution of the opposite shape through a given anchor
//! (x₀, y₀), namely
//!
//! ```text
//! φ(x) = y₀ + (x − x₀)F(x₀)
//!        − Σ_{n≥0} { F(x+n) − F(x₀+n) − (x − x₀)[F(x₀+n+1) − F(x₀+n)] }.
//! ```
//!
//! The partial sum truncated after N terms misses exactly
//! `φ(z+h) − φ(z) − h·F(z)` with `z = x₀ + N` and `h = x − x₀`, i.e. the error of
//! linear interpolation of φ far out. Expanding φ(z+h) in Newton's forward
//! series and using Δφ = F gives the correction `Σ_{j≥2} C(h, j) Δ^{j−1}F(z)`,
//! whose first few terms are added to the truncated sum. For the drivers
//! in this crate the k-th difference decays like N^{-k}, so the corrected
//! value is accurate to rounding once the series terms fall below tolerance.

use std::fmt;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use crate::SolverResult;

/// Default per-term tolerance of the series.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;
/// Consecutive sub-tolerance terms required before the series is truncated.
pub const QUIET_TERMS: usize = 3;
/// Highest forward difference of F used in the tail correction.
pub const TAIL_ORDER: usize = 4;

/// Whether the driver F is convex or concave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriverShape {
    Convex,
    Concave,
}

/// The data of one functional equation φ(x+1) = φ(x) + F(x), φ(x₀) = y₀ on (a, ∞).
#[derive(Clone)]
pub struct KrullProblem<F> {
    driver: F,
    lower: f64,
    x0: f64,
    y0: f64,
    shape: DriverShape,
}

impl<F> fmt::Debug for KrullProblem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KrullProblem")
            .field("lower", &self.lower)
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}

impl<F: Fn(f64) -> f64> KrullProblem<F> {
    /// Builds the problem, spot-checking the declared shape of F on a grid starting at `a`
    /// (or at `x₀ − 8` when `a = −∞`).
    pub fn new(driver: F, lower: f64, x0: f64, y0: f64, shape: DriverShape) -> Result<Self> {
        let from = if lower.is_finite() { lower } else { x0 - 8.0 };
        Self::with_shape_check_from(driver, lower, x0, y0, shape, from)
    }

    /// As [`KrullProblem::new`], but the shape only has to hold on (b, ∞).
    ///
    /// The series is unchanged; this lets drivers that are convex or concave
    /// only near infinity be used together with a solution of the same shape
    /// on (b, ∞).
    pub fn with_shape_check_from(
        driver: F,
        lower: f64,
        x0: f64,
        y0: f64,
        shape: DriverShape,
        b: f64,
    ) -> Result<Self> {
        if lower.is_nan() || lower == f64::INFINITY {
            return Err(Error::Config(format!("invalid lower bound {lower}")));
        }
        if !(x0.is_finite() && x0 > lower) {
            return Err(Error::Domain(format!(
                "anchor x0 = {x0} must exceed a = {lower}"
            )));
        }
        if !y0.is_finite() {
            return Err(Error::Domain(format!(
                "anchor value y0 = {y0} is not finite"
            )));
        }
        if !(b >= lower) || !b.is_finite() {
            return Err(Error::Config(format!(
                "shape check start b = {b} must be finite and >= a = {lower}"
            )));
        }
        check_shape(&driver, lower, b, shape)?;
        Ok(Self {
            driver,
            lower,
            x0,
            y0,
            shape,
        })
    }

    pub fn driver(&self, x: f64) -> f64 {
        (self.driver)(x)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn anchor(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }

    pub fn shape(&self) -> DriverShape {
        self.shape
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x.is_finite() && x > self.lower {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} must exceed a = {}",
                self.lower
            )))
        }
    }

    /// The n-th series term at x.
    pub fn term(&self, x: f64, n: usize) -> f64 {
        let n = n as f64;
        let h = x - self.x0;
        let f = &self.driver;
        let f0n = f(self.x0 + n);
        f(x + n) - f0n - h * (f(self.x0 + n + 1.0) - f0n)
    }

    /// Uncorrected partial sum of the series over the first `n_terms` terms.
    pub fn partial_sum(&self, x: f64, n_terms: usize) -> Result<f64> {
        self.check_domain(x)?;
        let h = x - self.x0;
        let mut acc = CompensatedSum::new();
        acc.add(self.y0);
        acc.add(h * self.driver(self.x0));
        for n in 0..n_terms {
            acc.add(-self.term(x, n));
        }
        Ok(acc.value())
    }

    /// Newton forward-series estimate of the part of φ(x) − partial sum left after `n_terms` terms.
    /// Returns (correction, magnitude of its highest-order term).
    pub fn tail_correction(&self, x: f64, n_terms: usize) -> (f64, f64) {
        let h = x - self.x0;
        let z = self.x0 + n_terms as f64;
        let mut diffs: Vec<f64> = (0..=TAIL_ORDER)
            .map(|i| self.driver(z + i as f64))
            .collect();
        let mut binom = h; // C(h, 1)
        let mut total = CompensatedSum::new();
        let mut last = 0.0;
        for j in 2..=TAIL_ORDER + 1 {
            // diffs[0] becomes Δ^{j-1} F(z)
            for i in 0..diffs.len() - 1 {
                diffs[i] = diffs[i + 1] - diffs[i];
            }
            diffs.pop();
            binom *= (h - (j - 1) as f64) / j as f64;
            last = binom * diffs[0];
            total.add(last);
        }
        (total.value(), last.abs())
    }
}

fn check_shape<F: Fn(f64) -> f64>(f: &F, lower: f64, b: f64, shape: DriverShape) -> Result<()> {
    const BASE_STEP: f64 = 1.0 / 16.0;
    for i in 0..24 {
        let offset = BASE_STEP * 2f64.powi(i);
        let p = b + offset;
        let s = (0.5 * offset).min(1.0);
        if p - s <= lower {
            continue;
        }
        let (fm, f0, fp) = (f(p - s), f(p), f(p + s));
        if !(fm.is_finite() && f0.is_finite() && fp.is_finite()) {
            return Err(Error::Hypothesis(format!(
                "driver is not finite near x = {p}"
            )));
        }
        let d2 = fp - 2.0 * f0 + fm;
        let noise = 64.0 * f64::EPSILON * (fp.abs() + 2.0 * f0.abs() + fm.abs());
        let violated = match shape {
            DriverShape::Convex => d2 < -noise,
            DriverShape::Concave => d2 > noise,
        };
        if violated {
            return Err(Error::Hypothesis(format!(
                "driver declared {shape:?} but its second difference at x = {p} (step {s}) is {d2:e}"
            )));
        }
    }
    Ok(())
}

/// Evaluates the anchored series at x.
///
/// The series is truncated after the first run of [`QUIET_TERMS`] consecutive
/// terms below `tol`, or at `max_terms`; the returned value includes the
/// forward-difference tail correction. Running out of terms is reported
/// through `converged = false`.
pub fn krull_eval<F: Fn(f64) -> f64>(
    p: &KrullProblem<F>,
    x: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SolverResult> {
    p.check_domain(x)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_terms == 0 {
        return Err(Error::Config("max_terms must be positive".into()));
    }
    let h = x - p.x0;
    if h == 0.0 {
        return Ok(SolverResult {
            value: p.y0,
            terms_used: 0,
            last_term: 0.0,
            converged: true,
            error_estimate: 0.0,
        });
    }

    let mut acc = CompensatedSum::new();
    acc.add(p.y0);
    acc.add(h * p.driver(p.x0));
    let mut quiet = 0usize;
    let mut last_term = 0.0;
    let mut terms_used = 0usize;
    let mut converged = false;
    while terms_used < max_terms {
        let t = p.term(x, terms_used);
        if !t.is_finite() {
            return Err(Error::Domain(format!(
                "series term {terms_used} at x = {x} is not finite"
            )));
        }
        acc.add(-t);
        terms_used += 1;
        last_term = t.abs();
        if last_term < tol {
            quiet += 1;
            if quiet == QUIET_TERMS {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }

    let (tail, tail_last) = p.tail_correction(x, terms_used);
    acc.add(tail);
    let scale = p.driver(p.x0 + terms_used as f64).abs().max(1.0);
    let rounding = 4.0 * f64::EPSILON * scale * (terms_used as f64).sqrt();
    Ok(SolverResult {
        value: acc.value(),
        terms_used,
        last_term,
        converged,
        error_estimate: tail_last + rounding,
    })
}

/// Evaluates φ(x) by reducing x into (x₀, x₀ + 1] with the functional equation
/// and summing the series only at the reduced argument.
pub fn krull_eval_shifted<F: Fn(f64) -> f64>(
    p: &KrullProblem<F>,
    x: f64,
    tol: f64,
    max_terms: usize,
) -> Result<SolverResult> {
    p.check_domain(x)?;
    let shift = (x - p.x0).ceil() - 1.0;
    if shift == 0.0 {
        return krull_eval(p, x, tol, max_terms);
    }
    let mut acc = CompensatedSum::new();
    let reduced = if shift > 0.0 {
        // φ(x) = φ(r) + Σ_{j=1}^{m} F(x − j)
        let m = shift as usize;
        for j in 1..=m {
            acc.add(p.driver(x - j as f64));
        }
        x - shift
    } else {
        // φ(x) = φ(x + m) − Σ_{j=0}^{m−1} F(x + j)
        let m = (-shift) as usize;
        for j in 0..m {
            acc.add(-p.driver(x + j as f64));
        }
        x - shift
    };
    let at_reduced = krull_eval(p, reduced, tol, max_terms)?;
    acc.add(at_reduced.value);
    Ok(SolverResult {
        value: acc.value(),
        ..at_reduced
    })
}

/// Sampled differences F(x+1) − F(x) along the probe points.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub passed: bool,
    /// (probe, |F(probe + 1) − F(probe)|)
    pub differences: Vec<(f64, f64)>,
}

/// Threshold the last sampled difference must fall below.
pub const LIMIT_THRESHOLD: f64 = 1e-3;

/// Numerical probe of lim_{x→∞} [F(x+1) − F(x)] = 0: the differences must decrease
/// along the probes and the final one must be below [`LIMIT_THRESHOLD`].
pub fn limit_check<F: Fn(f64) -> f64>(f: F, probes: &[f64]) -> LimitReport {
    let differences: Vec<(f64, f64)> = probes
        .iter()
        .map(|&x| (x, (f(x + 1.0) - f(x)).abs()))
        .collect();
    let decreasing = differences.windows(2).all(|w| w[1].1 < w[0].1);
    let small = differences
        .last()
        .map_or(false, |&(_, d)| d < LIMIT_THRESHOLD);
    LimitReport {
        passed: !differences.is_empty() && decreasing && small,
        differences,
    }
}
