//! Geometrically convex solutions of φ(x+1) = G(x)φ(x).
//!
//! For G > 0 with log∘G concave near infinity and G(x+1)/G(x) → 1, the
//! equation has exactly one solution that is geometrically convex near
//! infinity with φ(1) = c, and it is the limit of
//!
//! ```text
//! φₙ(x) = c · G(n)^{e(n,x)} · (1/G(x)) · Π_{j=1}^{n} G(j)/G(j+x),
//! e(n,x) = [log(n+1+x) − log(n+1)] / [log(n+1) − log n].
//! ```
//!
//! The power of G(n) interpolates φ(n+1+x)/φ(n+1) along the power function
//! through φ(n) and φ(n+1), so its exponent carries a positive sign.
//! Approximants are formed entirely in log space with compensated sums; the
//! partial sums for an increasing schedule of n are accumulated once.

use std::fmt;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use crate::SolverResult;

pub const DEFAULT_SCHEDULE: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
pub const DEFAULT_REL_TOL: f64 = 1e-4;

/// φ(x+1) = G(x)φ(x) on (0, ∞) with φ(1) = c.
#[derive(Clone)]
pub struct GeoProblem<G> {
    factor: G,
    c: f64,
}

impl<G> fmt::Debug for GeoProblem<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeoProblem")
            .field("c", &self.c)
            .finish_non_exhaustive()
    }
}

impl<G: Fn(f64) -> f64> GeoProblem<G> {
    /// Builds the problem after spot-checking positivity of G, concavity of log∘G
    /// far out, and G(x+1)/G(x) → 1.
    pub fn new(factor: G, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!(
                "normalization c must be positive, got {c}"
            )));
        }
        for i in 0..24 {
            let x = 0.125 * 2f64.powi(i);
            let g = factor(x);
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Hypothesis(format!("G({x}) = {g} is not positive")));
            }
        }
        for i in 0..16 {
            let p = 16.0 * 2f64.powi(i);
            let s = 0.5 * p;
            let (lm, l0, lp) = (factor(p - s).ln(), factor(p).ln(), factor(p + s).ln());
            let d2 = lp - 2.0 * l0 + lm;
            let noise = 64.0 * f64::EPSILON * (lp.abs() + 2.0 * l0.abs() + lm.abs());
            if d2 > noise {
                return Err(Error::Hypothesis(format!(
                    "log G is not concave near x = {p}: second difference {d2:e}"
                )));
            }
        }
        let ratios: Vec<f64> = [10.0, 100.0, 1_000.0, 10_000.0]
            .iter()
            .map(|&x: &f64| (factor(x + 1.0).ln() - factor(x).ln()).abs())
            .collect();
        let settles = ratios.windows(2).all(|w| w[1] <= w[0]) && ratios[ratios.len() - 1] < 1e-3;
        if !settles {
            return Err(Error::Hypothesis(format!(
                "G(x+1)/G(x) does not approach 1: |log ratio| samples {ratios:?}"
            )));
        }
        Ok(Self { factor, c })
    }

    pub fn factor(&self, x: f64) -> f64 {
        (self.factor)(x)
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    fn ln_factor(&self, x: f64) -> f64 {
        (self.factor)(x).ln()
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("x = {x} must be positive")))
    }
}

/// Running Σ_{j=1}^{n} [log G(j) − log G(j+x)].
struct LogProduct<'a, G> {
    problem: &'a GeoProblem<G>,
    x: f64,
    n: usize,
    sum: CompensatedSum,
}

impl<'a, G: Fn(f64) -> f64> LogProduct<'a, G> {
    fn new(problem: &'a GeoProblem<G>, x: f64) -> Self {
        Self {
            problem,
            x,
            n: 0,
            sum: CompensatedSum::new(),
        }
    }

    fn advance_to(&mut self, n: usize) {
        while self.n < n {
            self.n += 1;
            let j = self.n as f64;
            self.sum.add(self.problem.ln_factor(j));
            self.sum.add(-self.problem.ln_factor(j + self.x));
        }
    }

    fn ln_approximant(&self) -> Result<f64> {
        let n = self.n as f64;
        let exponent = (self.x / (n + 1.0)).ln_1p() / (1.0 / n).ln_1p();
        let p = self.problem;
        let mut acc = CompensatedSum::new();
        acc.add(p.c.ln());
        acc.add(exponent * p.ln_factor(n));
        acc.add(-p.ln_factor(self.x));
        acc.add(self.sum.value());
        let ln_value = acc.value();
        if !ln_value.is_finite() {
            return Err(Error::Overflow(format!(
                "log-space accumulator is not finite at n = {}, x = {}",
                self.n, self.x
            )));
        }
        Ok(ln_value)
    }

    fn approximant(&self) -> Result<f64> {
        exp_checked(self.ln_approximant()?, self.n, self.x)
    }
}

fn exp_checked(ln_value: f64, n: usize, x: f64) -> Result<f64> {
    if ln_value > f64::MAX.ln() || ln_value < f64::MIN_POSITIVE.ln() {
        return Err(Error::Overflow(format!(
            "approximant exp({ln_value}) at n = {n}, x = {x} leaves the double range"
        )));
    }
    Ok(ln_value.exp())
}

/// The n-th approximant φₙ(x).
pub fn gm_eval<G: Fn(f64) -> f64>(p: &GeoProblem<G>, x: f64, n: usize) -> Result<SolverResult> {
    check_x(x)?;
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let mut prod = LogProduct::new(p, x);
    prod.advance_to(n);
    let value = prod.approximant()?;
    Ok(SolverResult {
        value,
        terms_used: n,
        last_term: 0.0,
        converged: false,
        error_estimate: f64::NAN,
    })
}

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Config("n schedule is empty".into()));
    }
    if schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "n schedule must be positive and strictly increasing, got {schedule:?}"
        )));
    }
    Ok(())
}

/// Approximants φₙ(x) for every n in the schedule, sharing one pass over the product.
pub fn gm_trace<G: Fn(f64) -> f64>(
    p: &GeoProblem<G>,
    x: f64,
    schedule: &[usize],
) -> Result<Vec<(usize, f64)>> {
    check_x(x)?;
    check_schedule(schedule)?;
    let mut prod = LogProduct::new(p, x);
    schedule
        .iter()
        .map(|&n| {
            prod.advance_to(n);
            Ok((n, prod.approximant()?))
        })
        .collect()
}

/// Walks the schedule until two successive approximants agree to `rel_tol`.
///
/// The first entry n₀ is compared with φ at n₀/10, so a product that is
/// already exact converges immediately. `value` is the last approximant computed.
pub fn gm_converge<G: Fn(f64) -> f64>(
    p: &GeoProblem<G>,
    x: f64,
    rel_tol: f64,
    schedule: &[usize],
) -> Result<SolverResult> {
    check_x(x)?;
    check_schedule(schedule)?;
    if !(rel_tol > 0.0) {
        return Err(Error::Config(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    // The first entry is compared against the coarser approximant at n₀/10.
    let coarse = (schedule[0] / 10).max(1);
    let mut prod = LogProduct::new(p, x);
    let mut previous = if coarse < schedule[0] {
        prod.advance_to(coarse);
        Some(prod.approximant()?)
    } else {
        None
    };
    let mut result = SolverResult {
        value: f64::NAN,
        terms_used: 0,
        last_term: f64::INFINITY,
        converged: false,
        error_estimate: f64::INFINITY,
    };
    for &n in schedule {
        prod.advance_to(n);
        let value = prod.approximant()?;
        result.value = value;
        result.terms_used = n;
        if let Some(prev) = previous {
            let change = ((value - prev) / value).abs();
            result.last_term = change;
            result.error_estimate = (value - prev).abs();
            if change < rel_tol {
                result.converged = true;
                break;
            }
        }
        previous = Some(value);
    }
    Ok(result)
}

/// As [`gm_converge`], but the limit is only taken at the reduced argument
/// r ∈ (0, 1]; φ(x) = φ(r)·Π_{j=0}^{m−1} G(r+j) for x = r + m.
pub fn gm_converge_reduced<G: Fn(f64) -> f64>(
    p: &GeoProblem<G>,
    x: f64,
    rel_tol: f64,
    schedule: &[usize],
) -> Result<SolverResult> {
    check_x(x)?;
    let m = x.ceil() - 1.0;
    if m <= 0.0 {
        return gm_converge(p, x, rel_tol, schedule);
    }
    let reduced = x - m;
    let at_reduced = gm_converge(p, reduced, rel_tol, schedule)?;
    let mut ln_acc = CompensatedSum::new();
    ln_acc.add(at_reduced.value.ln());
    for j in 0..m as usize {
        ln_acc.add(p.ln_factor(reduced + j as f64));
    }
    let value = exp_checked(ln_acc.value(), at_reduced.terms_used, x)?;
    let scale = value / at_reduced.value;
    Ok(SolverResult {
        value,
        error_estimate: at_reduced.error_estimate * scale,
        ..at_reduced
    })
}
