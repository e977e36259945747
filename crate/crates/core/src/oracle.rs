//! Reference evaluators for Γ and the Beta function built directly on their
//! integral representations.
//!
//! Nothing here uses a functional-equation characterization, so the values
//! serve as independent ground truth for the solvers in the rest of the
//! crate. Every integrand is rescaled by its peak in log space, which keeps
//! the quadrature well inside the double range for large arguments.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_segments, QuadratureConfig, Segment};

/// A positive value with an estimated absolute error below the value itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub est_error: f64,
}

impl OracleValue {
    pub fn new(value: f64, est_error: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!(
                "oracle value must be positive and finite, got {value}"
            )));
        }
        if !(est_error >= 0.0 && est_error < value) {
            return Err(Error::Convergence(format!(
                "error estimate {est_error:e} does not resolve value {value:e}"
            )));
        }
        Ok(Self { value, est_error })
    }

    pub fn rel_error(&self) -> f64 {
        self.est_error / self.value
    }
}

/// Natural logarithm of a positive quantity together with its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_value: f64,
    pub ln_error: f64,
}

impl LogValue {
    pub fn exp(&self) -> Result<OracleValue> {
        let value = self.ln_value.exp();
        if !value.is_finite() {
            return Err(Error::Overflow(format!("exp({}) overflows", self.ln_value)));
        }
        OracleValue::new(value, value * self.ln_error.exp_m1())
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Integral of e^{-t} t^{x-1} scaled by e^{-shift}: returns (shift, integral, abs error).
fn scaled_gamma_integral(x: f64, cfg: &QuadratureConfig) -> Result<(f64, f64, f64)> {
    check_positive("x", x)?;
    let am1 = x - 1.0;
    // log of the integrand's maximum, attained at t = x - 1 when x > 2
    let shift = if x > 2.0 { am1 * (am1.ln() - 1.0) } else { 0.0 };
    let split = x.max(1.0);

    let direct = move |t: f64| (am1 * t.ln() - t - shift).exp();
    // t = u^{1/x} on (0, 1) removes the t^{x-1} singularity
    let inv_x = 1.0 / x;
    let substituted = move |u: f64| inv_x * (-u.powf(inv_x) - shift).exp();

    // Choose the cutoff so the analytic tail bound is a tenth of the error budget.
    // For x <= 2 the integral is >= 0.88; for x > 2 the scaled peak is 1 with width ~ sqrt(x).
    let floor = 0.5;
    let budget = (cfg.abs_tol * (-shift).exp()).max(cfg.rel_tol * floor);
    let tail_bound = |t: f64| {
        let ratio = am1.max(0.0) / t;
        (am1 * t.ln() - t - shift).exp() / (1.0 - ratio)
    };
    let mut cutoff = split + 1.0;
    while tail_bound(cutoff) > 0.1 * budget {
        cutoff += 1.0 + 0.05 * cutoff;
    }
    let tail = tail_bound(cutoff);

    let mut segments: Vec<Segment<'_>> = Vec::with_capacity(3);
    if x < 1.0 {
        segments.push(Segment::new(&substituted, 0.0, 1.0));
    } else {
        segments.push(Segment::new(&direct, 0.0, 1.0));
        if split > 1.0 {
            segments.push(Segment::new(&direct, 1.0, split));
        }
    }
    segments.push(Segment::new(&direct, split, cutoff));

    let scaled_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * (-shift).exp(),
        ..*cfg
    }
    .scaled(0.9);
    let integral = integrate_segments(&segments, &scaled_cfg)?;
    Ok((shift, integral.value, integral.abs_error + tail))
}

/// ln Γ(x) by quadrature, valid far beyond the range where Γ(x) itself is representable.
pub fn ln_gamma_eval(x: f64, cfg: &QuadratureConfig) -> Result<LogValue> {
    let (shift, value, err) = scaled_gamma_integral(x, cfg)?;
    Ok(LogValue {
        ln_value: shift + value.ln(),
        ln_error: err / value + shift.abs() * f64::EPSILON,
    })
}

/// Γ(x) = ∫₀^∞ e^{-t} t^{x-1} dt by adaptive quadrature.
pub fn gamma_eval(x: f64, cfg: &QuadratureConfig) -> Result<OracleValue> {
    let (shift, value, err) = scaled_gamma_integral(x, cfg)?;
    let scale = shift.exp();
    let v = value * scale;
    if !v.is_finite() {
        return Err(Error::Overflow(format!("Γ({x}) exceeds the double range")));
    }
    OracleValue::new(v, err * scale)
}

/// Integrand and upper limit for e^{-shift} ∫₀^{1/2} s^{p-1} (1-s)^{q-1} ds.
fn half_beta_segment(p: f64, q: f64, shift: f64) -> (Box<dyn Fn(f64) -> f64>, f64) {
    let pm1 = p - 1.0;
    let qm1 = q - 1.0;
    if p < 1.0 {
        // s = u^{1/p}: ∫₀^{1/2} s^{p-1} g(s) ds = (1/p) ∫₀^{2^{-p}} g(u^{1/p}) du
        let inv_p = 1.0 / p;
        let upper = 0.5f64.powf(p);
        let f = move |u: f64| inv_p * (qm1 * (-u.powf(inv_p)).ln_1p() - shift).exp();
        (Box::new(f), upper)
    } else {
        let f = move |s: f64| (pm1 * s.ln() + qm1 * (-s).ln_1p() - shift).exp();
        (Box::new(f), 0.5)
    }
}

/// 𝓑(x, y) = ∫₀¹ t^{x-1}(1-t)^{y-1} dt, split at t = 1/2 with a power substitution
/// on each half whose endpoint exponent is negative.
pub fn beta_eval(x: f64, y: f64, cfg: &QuadratureConfig) -> Result<OracleValue> {
    let lv = ln_beta_eval(x, y, cfg)?;
    lv.exp()
}

/// ln 𝓑(x, y) by quadrature.
pub fn ln_beta_eval(x: f64, y: f64, cfg: &QuadratureConfig) -> Result<LogValue> {
    check_positive("x", x)?;
    check_positive("y", y)?;
    let shift = if x > 1.0 && y > 1.0 {
        let t = (x - 1.0) / (x + y - 2.0);
        (x - 1.0) * t.ln() + (y - 1.0) * (-t).ln_1p()
    } else {
        0.0
    };
    let (left, left_hi) = half_beta_segment(x, y, shift);
    let (right, right_hi) = half_beta_segment(y, x, shift);
    let segments = [
        Segment::new(left.as_ref(), 0.0, left_hi),
        Segment::new(right.as_ref(), 0.0, right_hi),
    ];
    let scaled_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * (-shift).exp(),
        ..*cfg
    };
    let integral = integrate_segments(&segments, &scaled_cfg)?;
    if !(integral.value > 0.0) {
        return Err(Error::Convergence(format!(
            "Beta integral underflowed at ({x}, {y})"
        )));
    }
    Ok(LogValue {
        ln_value: shift + integral.value.ln(),
        ln_error: integral.abs_error / integral.value + shift.abs() * f64::EPSILON,
    })
}

/// Above this argument sum the Gamma ratio is formed in log space.
pub const LOG_SPACE_THRESHOLD: f64 = 100.0;

/// 𝓑(x, y) = Γ(x)Γ(y)/Γ(x+y) from three Gamma quadratures.
pub fn beta_via_gamma(x: f64, y: f64, cfg: &QuadratureConfig) -> Result<OracleValue> {
    check_positive("x", x)?;
    check_positive("y", y)?;
    if x + y > LOG_SPACE_THRESHOLD {
        let gx = ln_gamma_eval(x, cfg)?;
        let gy = ln_gamma_eval(y, cfg)?;
        let gxy = ln_gamma_eval(x + y, cfg)?;
        return LogValue {
            ln_value: gx.ln_value + gy.ln_value - gxy.ln_value,
            ln_error: gx.ln_error + gy.ln_error + gxy.ln_error,
        }
        .exp();
    }
    let gx = gamma_eval(x, cfg)?;
    let gy = gamma_eval(y, cfg)?;
    let gxy = gamma_eval(x + y, cfg)?;
    let value = gx.value * gy.value / gxy.value;
    let rel = gx.rel_error() + gy.rel_error() + gxy.rel_error() + 3.0 * f64::EPSILON;
    OracleValue::new(value, value * rel)
}

/// |Γ(x+1) − xΓ(x)| / Γ(x+1).
pub fn gamma_recurrence_residual(x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let g = gamma_eval(x, cfg)?;
    let g1 = gamma_eval(x + 1.0, cfg)?;
    Ok((g1.value - x * g.value).abs() / g1.value)
}
