//! The Beta function restricted to the ray {(x, x+k) : x > 0}.
//!
//! On every such ray 𝓑 solves φ(x+1) = G(x)φ(x) with
//! G(x) = x(x+k)/((2x+k+1)(2x+k)) and φ(1) = 1/(k+1). F = log∘G is concave,
//! which makes Krull's series available for log φ, and the same G feeds the
//! Gronau–Matkowski product. This module holds the driver, its derivatives,
//! the polynomial certificate of concavity, and both reconstructions.

use crate::error::{Error, Result};
use crate::geo::{gm_converge_reduced, GeoProblem, DEFAULT_SCHEDULE};
use crate::krull::{krull_eval_shifted, DriverShape, KrullProblem, DEFAULT_MAX_TERMS};
use crate::oracle::beta_eval;
use crate::quadrature::QuadratureConfig;

/// Relative agreement required between the two closed forms of F″.
pub const SECOND_DERIVATIVE_AGREEMENT: f64 = 1e-10;

/// Offset k ≥ 0 of the ray parallel to the main diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySpec {
    k: f64,
}

impl RaySpec {
    pub fn new(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!(
                "ray offset k must be finite and >= 0, got {k}"
            )));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn check(&self, x: f64) -> Result<()> {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("x = {x} must be positive")))
        }
    }

    fn ratio_unchecked(&self, x: f64) -> f64 {
        let k = self.k;
        x * (x + k) / ((2.0 * x + k + 1.0) * (2.0 * x + k))
    }

    fn log_ratio_unchecked(&self, x: f64) -> f64 {
        let k = self.k;
        x.ln() + (x + k).ln() - (2.0 * x + k + 1.0).ln() - (2.0 * x + k).ln()
    }

    /// G(x) = x(x+k)/((2x+k+1)(2x+k)).
    pub fn ratio(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.ratio_unchecked(x))
    }

    /// F(x) = log G(x).
    pub fn log_ratio(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.log_ratio_unchecked(x))
    }

    /// F′(x) = 1/x + 1/(x+k) − 2/(2x+k) − 2/(2x+k+1).
    pub fn log_ratio_d1(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let k = self.k;
        Ok(1.0 / x + 1.0 / (x + k) - 2.0 / (2.0 * x + k) - 2.0 / (2.0 * x + k + 1.0))
    }

    /// F″(x) from the four-term sum, cross-checked against −P(x)/D(x).
    pub fn log_ratio_d2(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let k = self.k;
        let sq = |v: f64| v * v;
        let four_term =
            -1.0 / sq(x) - 1.0 / sq(x + k) + 4.0 / sq(2.0 * x + k) + 4.0 / sq(2.0 * x + k + 1.0);
        let rational = -self.concavity_poly(x)? / self.concavity_denominator(x)?;
        if (four_term - rational).abs() > SECOND_DERIVATIVE_AGREEMENT * rational.abs() {
            return Err(Error::Inconsistent(format!(
                "F''(x = {x}, k = {k}): four-term {four_term:e} vs -P/D {rational:e}"
            )));
        }
        Ok(four_term)
    }

    /// P(x) = 16x⁵ + 4x⁴(6k²+10k+1) + 8kx³(k+1)(6k+1) + 2k²x²(k+1)(17k+5)
    ///        + 2k³x(k+1)(5k+3) + k⁴(k+1)².
    pub fn concavity_poly(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let k = self.k;
        let k1 = k + 1.0;
        Ok(16.0 * x.powi(5)
            + 4.0 * x.powi(4) * (6.0 * k * k + 10.0 * k + 1.0)
            + 8.0 * k * x.powi(3) * k1 * (6.0 * k + 1.0)
            + 2.0 * k * k * x * x * k1 * (17.0 * k + 5.0)
            + 2.0 * k.powi(3) * x * k1 * (5.0 * k + 3.0)
            + k.powi(4) * k1 * k1)
    }

    /// D(x) = x²(x+k)²(2x+k)²(2x+k+1)², so that F″ = −P/D.
    pub fn concavity_denominator(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let k = self.k;
        let prod = x * (x + k) * (2.0 * x + k) * (2.0 * x + k + 1.0);
        Ok(prod * prod)
    }

    /// φ(1) = 𝓑(1, 1+k) = 1/(k+1).
    pub fn initial_condition(&self) -> f64 {
        1.0 / (self.k + 1.0)
    }

    /// Krull problem for log φ: F = log G on (0, ∞), anchored at (1, log 1/(k+1)).
    pub fn krull_problem(&self) -> Result<KrullProblem<impl Fn(f64) -> f64>> {
        let spec = *self;
        KrullProblem::new(
            move |x| spec.log_ratio_unchecked(x),
            0.0,
            1.0,
            self.initial_condition().ln(),
            DriverShape::Concave,
        )
    }

    /// Gronau–Matkowski problem with G on (0, ∞) and c = 1/(k+1).
    pub fn geo_problem(&self) -> Result<GeoProblem<impl Fn(f64) -> f64>> {
        let spec = *self;
        GeoProblem::new(move |x| spec.ratio_unchecked(x), self.initial_condition())
    }
}

/// How a ray sample was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayMethod {
    Krull,
    GronauMatkowski,
    Oracle,
}

impl RayMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RayMethod::Krull => "krull",
            RayMethod::GronauMatkowski => "gronau-matkowski",
            RayMethod::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample {
    pub x: f64,
    pub value: f64,
    pub est_error: f64,
    /// Series terms or product length behind the value (0 for the oracle).
    pub terms_used: usize,
}

/// Sampled values of x ↦ 𝓑(x, x+k) produced by one method.
#[derive(Debug, Clone, PartialEq)]
pub struct RayReconstruction {
    pub spec: RaySpec,
    pub method: RayMethod,
    pub samples: Vec<RaySample>,
}

fn validate_xs(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Config("no sample points given".into()));
    }
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("sample point {x} must be positive")));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "sample points must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Reconstructs the ray from Krull's series for log φ.
pub fn ray_via_krull(spec: RaySpec, xs: &[f64], tol: f64) -> Result<RayReconstruction> {
    validate_xs(xs)?;
    let problem = spec.krull_problem()?;
    let samples = xs
        .iter()
        .map(|&x| {
            let r = krull_eval_shifted(&problem, x, tol, DEFAULT_MAX_TERMS)?;
            if !r.converged {
                return Err(Error::Convergence(format!(
                    "Krull series at x = {x}, k = {} did not settle within {} terms (last term {:e})",
                    spec.k, r.terms_used, r.last_term
                )));
            }
            let value = r.value.exp();
            Ok(RaySample {
                x,
                value,
                est_error: value * r.error_estimate.exp_m1(),
                terms_used: r.terms_used,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RayReconstruction {
        spec,
        method: RayMethod::Krull,
        samples,
    })
}

/// Reconstructs the ray from the Gronau–Matkowski product over the default schedule.
pub fn ray_via_gm(spec: RaySpec, xs: &[f64], rel_tol: f64) -> Result<RayReconstruction> {
    ray_via_gm_with_schedule(spec, xs, rel_tol, &DEFAULT_SCHEDULE)
}

pub fn ray_via_gm_with_schedule(
    spec: RaySpec,
    xs: &[f64],
    rel_tol: f64,
    schedule: &[usize],
) -> Result<RayReconstruction> {
    validate_xs(xs)?;
    let problem = spec.geo_problem()?;
    let samples = xs
        .iter()
        .map(|&x| {
            let r = gm_converge_reduced(&problem, x, rel_tol, schedule)?;
            if !r.converged {
                return Err(Error::Convergence(format!(
                    "product at x = {x}, k = {} still changing by {:e} at n = {}",
                    spec.k, r.last_term, r.terms_used
                )));
            }
            Ok(RaySample {
                x,
                value: r.value,
                est_error: r.error_estimate,
                terms_used: r.terms_used,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RayReconstruction {
        spec,
        method: RayMethod::GronauMatkowski,
        samples,
    })
}

/// 𝓑(x, x+k) straight from the quadrature oracle.
pub fn ray_via_oracle(
    spec: RaySpec,
    xs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<RayReconstruction> {
    validate_xs(xs)?;
    let samples = xs
        .iter()
        .map(|&x| {
            let b = beta_eval(x, x + spec.k, cfg)?;
            Ok(RaySample {
                x,
                value: b.value,
                est_error: b.est_error,
                terms_used: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RayReconstruction {
        spec,
        method: RayMethod::Oracle,
        samples,
    })
}

/// |φ(x+1) − G(x)φ(x)| / φ(x+1).
pub fn ray_recurrence_residual<P>(spec: RaySpec, x: f64, phi: P) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
{
    let g = spec.ratio(x)?;
    let next = phi(x + 1.0)?;
    let here = phi(x)?;
    Ok((next - g * here).abs() / next.abs())
}
