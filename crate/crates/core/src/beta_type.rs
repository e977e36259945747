//! Beta-type functions B_γ(x, y) = γ(x)γ(y)/γ(x+y).
//!
//! Two generators give the same beta-type function exactly when their ratio
//! r = γ₂/γ₁ is a multiplicative cocycle, r(x+y) = r(x)r(y); for continuous
//! ratios that means r(x) = e^{cx}. Equality is decided on finite grids, so
//! a `true` answer is only as complete as the grid it was sampled on.
//! Measurable or dense-graph variants of the cocycle argument are not covered.
//!
//! Generators are held in log form and every ratio is assembled in log space.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::oracle::ln_gamma_eval;
use crate::quadrature::QuadratureConfig;

/// Residual below which [`fit_exponential`] callers can treat a ratio as
/// exponential when the generators carry about 1e-4 of relative noise at a
/// single sample. Exact pairs land near 1e-15.
pub const FIT_THRESHOLD: f64 = 1e-3;

type LnFn = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A positive function γ on (domain_low, ∞), stored as log γ.
#[derive(Clone)]
pub struct Generator {
    label: String,
    domain_low: f64,
    ln_g: Arc<LnFn>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("label", &self.label)
            .field("domain_low", &self.domain_low)
            .finish_non_exhaustive()
    }
}

impl Generator {
    /// Wraps a positive-valued γ.
    pub fn new<G>(label: impl Into<String>, domain_low: f64, g: G) -> Result<Self>
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_log(label, domain_low, move |x| Ok(g(x).ln()))
    }

    /// Wraps log γ directly, for generators that leave the double range.
    pub fn from_log<L>(label: impl Into<String>, domain_low: f64, ln_g: L) -> Result<Self>
    where
        L: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        if domain_low.is_nan() || domain_low == f64::INFINITY {
            return Err(Error::Config(format!("invalid domain bound {domain_low}")));
        }
        Ok(Self {
            label: label.into(),
            domain_low,
            ln_g: Arc::new(ln_g),
        })
    }

    pub fn gamma(cfg: QuadratureConfig) -> Self {
        Self::from_log_unchecked("gamma", 0.0, move |x| Ok(ln_gamma_eval(x, &cfg)?.ln_value))
    }

    pub fn identity() -> Self {
        Self::from_log_unchecked("identity", 0.0, |x| Ok(x.ln()))
    }

    /// x ↦ x^p on (0, ∞).
    pub fn power(p: f64) -> Self {
        Self::from_log_unchecked(format!("power({p})"), 0.0, move |x| Ok(p * x.ln()))
    }

    /// x ↦ e^{cx} on ℝ.
    pub fn exponential(c: f64) -> Self {
        Self::from_log_unchecked(format!("exp({c}x)"), f64::NEG_INFINITY, move |x| Ok(c * x))
    }

    /// x ↦ e^{cx}·Γ(x).
    pub fn exp_gamma(c: f64, cfg: QuadratureConfig) -> Self {
        Self::gamma(cfg).times_exp(c)
    }

    /// x ↦ e^{cx}·γ(x).
    pub fn times_exp(&self, c: f64) -> Self {
        let inner = Arc::clone(&self.ln_g);
        Self::from_log_unchecked(
            format!("exp({c}x)*{}", self.label),
            self.domain_low,
            move |x| Ok(c * x + inner(x)?),
        )
    }

    /// x ↦ a·γ(x) for a > 0.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {a}"
            )));
        }
        let inner = Arc::clone(&self.ln_g);
        let ln_a = a.ln();
        Ok(Self::from_log_unchecked(
            format!("{a}*{}", self.label),
            self.domain_low,
            move |x| Ok(ln_a + inner(x)?),
        ))
    }

    fn from_log_unchecked<L>(label: impl Into<String>, domain_low: f64, ln_g: L) -> Self
    where
        L: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            domain_low,
            ln_g: Arc::new(ln_g),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_low(&self) -> f64 {
        self.domain_low
    }

    /// log γ(x), failing outside the domain or where γ is not positive.
    pub fn ln_eval(&self, x: f64) -> Result<f64> {
        if !(x > self.domain_low && x.is_finite()) {
            return Err(Error::Domain(format!(
                "{} is defined on ({}, ∞), got x = {x}",
                self.label, self.domain_low
            )));
        }
        let v = (self.ln_g)(x)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "{}({x}) is not a positive finite value",
                self.label
            )));
        }
        Ok(v)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.ln_eval(x)?.exp();
        if !v.is_finite() {
            return Err(Error::Overflow(format!(
                "{}({x}) exceeds the double range",
                self.label
            )));
        }
        Ok(v)
    }
}

/// log B_γ(x, y).
pub fn ln_beta_type_eval(g: &Generator, x: f64, y: f64) -> Result<f64> {
    let (lx, ly, lxy) = (g.ln_eval(x)?, g.ln_eval(y)?, g.ln_eval(x + y)?);
    Ok((lx + ly) - lxy)
}

/// B_γ(x, y) = γ(x)γ(y)/γ(x+y).
pub fn beta_type_eval(g: &Generator, x: f64, y: f64) -> Result<f64> {
    let ln = ln_beta_type_eval(g, x, y)?;
    let v = ln.exp();
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Overflow(format!(
            "B_{}({x}, {y}) = exp({ln}) leaves the double range",
            g.label
        )));
    }
    Ok(v)
}

/// Two generators on a shared domain.
#[derive(Debug, Clone)]
pub struct GeneratorPair {
    pub g1: Generator,
    pub g2: Generator,
}

impl GeneratorPair {
    pub fn new(g1: Generator, g2: Generator) -> Result<Self> {
        if g1.domain_low != g2.domain_low {
            return Err(Error::Config(format!(
                "generators {} and {} have different domains ({} vs {})",
                g1.label, g2.label, g1.domain_low, g2.domain_low
            )));
        }
        Ok(Self { g1, g2 })
    }

    /// log r(x) with r = γ₂/γ₁.
    pub fn ln_ratio(&self, x: f64) -> Result<f64> {
        Ok(self.g2.ln_eval(x)? - self.g1.ln_eval(x)?)
    }
}

/// |r(x+y) − r(x)r(y)| / r(x+y) for r = γ₂/γ₁.
pub fn ratio_cocycle_residual(pair: &GeneratorPair, x: f64, y: f64) -> Result<f64> {
    let (rx, ry, rxy) = (pair.ln_ratio(x)?, pair.ln_ratio(y)?, pair.ln_ratio(x + y)?);
    Ok(((rx + ry) - rxy).exp_m1().abs())
}

/// Outcome of comparing two beta-type functions on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityReport {
    pub equal: bool,
    /// Largest |B₁ − B₂| / B₁ over the grid.
    pub max_residual: f64,
    /// Largest cocycle residual of γ₂/γ₁ over the same grid.
    pub max_cocycle_residual: f64,
    pub worst_point: (f64, f64),
}

/// Decides B_{γ₁} = B_{γ₂} on `grid` to relative tolerance `tol`.
///
/// Fails with [`Error::Inconsistent`] if the direct comparison and the
/// cocycle residual disagree about which side of `tol` they fall on by more
/// than rounding.
pub fn equality_test(
    pair: &GeneratorPair,
    grid: &[(f64, f64)],
    tol: f64,
) -> Result<EqualityReport> {
    if grid.is_empty() {
        return Err(Error::Config("equality grid is empty".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut report = EqualityReport {
        equal: false,
        max_residual: 0.0,
        max_cocycle_residual: 0.0,
        worst_point: grid[0],
    };
    for &(x, y) in grid {
        let b1 = ln_beta_type_eval(&pair.g1, x, y)?;
        let b2 = ln_beta_type_eval(&pair.g2, x, y)?;
        let direct = (b2 - b1).exp_m1().abs();
        if direct > report.max_residual {
            report.max_residual = direct;
            report.worst_point = (x, y);
        }
        report.max_cocycle_residual = report
            .max_cocycle_residual
            .max(ratio_cocycle_residual(pair, x, y)?);
    }
    report.equal = report.max_residual < tol;
    let slack = 1e3 * f64::EPSILON * (1.0 + report.max_residual);
    let cocycle_equal = report.max_cocycle_residual < tol;
    if report.equal != cocycle_equal
        && (report.max_residual - report.max_cocycle_residual).abs() > slack
    {
        return Err(Error::Inconsistent(format!(
            "beta-type residual {:e} and cocycle residual {:e} disagree at tolerance {tol:e}",
            report.max_residual, report.max_cocycle_residual
        )));
    }
    Ok(report)
}

/// Least-squares fit of log(γ₂/γ₁)(x) = c·x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub c: f64,
    /// Root-mean-square deviation of log r from c·x.
    pub residual: f64,
    /// Residual below the requested tolerance.
    pub equal: bool,
}

pub fn fit_exponential(pair: &GeneratorPair, xs: &[f64], tol: f64) -> Result<ExponentialFit> {
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Config(format!(
            "exponential fit needs at least 2 distinct points, got {}",
            distinct.len()
        )));
    }
    let logs = xs
        .iter()
        .map(|&x| pair.ln_ratio(x))
        .collect::<Result<Vec<_>>>()?;
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxl: f64 = xs.iter().zip(&logs).map(|(x, l)| x * l).sum();
    let c = sxl / sxx;
    let sq: f64 = xs.iter().zip(&logs).map(|(x, l)| (l - c * x).powi(2)).sum();
    let residual = (sq / xs.len() as f64).sqrt();
    if !(c.is_finite() && residual.is_finite()) {
        return Err(Error::Config("exponential fit is degenerate".into()));
    }
    Ok(ExponentialFit {
        c,
        residual,
        equal: residual < tol,
    })
}
