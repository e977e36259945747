//! Finite-difference certificates for directional, geometric and
//! logarithmic convexity.
//!
//! A function of two variables is convex in the direction h when every slice
//! t ↦ f(p + t·h) is convex. For twice differentiable f this is the sign of
//! f_xx u² + 2 f_xy uv + f_yy v², and both forms are computed here so each can
//! check the other. Geometric convexity of φ is convexity of u ↦ log φ(e^u).

use crate::error::{Error, Result};

/// Second derivatives within this band around zero are reported as indeterminate.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-7;

/// Default stencil length relative to max(1, ‖p‖).
///
/// At this scale the rounding error of a second difference is about
/// eps·|f|/step² ≈ 1e-10·|f|, while the truncation error for smooth f is
/// step²/12 times a fourth derivative.
pub const STEP_SCALE: f64 = 1e-3;

/// Default tolerance for the identities in [`corollary_certificate`].
pub const DEFAULT_CERTIFICATE_TOL: f64 = 1e-8;

/// Agreement required between the quadratic form and the slice estimate.
pub fn mixed_tolerance(value: f64) -> f64 {
    1e-6f64.max(1e-4 * value.abs())
}

/// A nonzero direction (u, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction2 {
    pub u: f64,
    pub v: f64,
}

impl Direction2 {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) || u * u + v * v == 0.0 {
            return Err(Error::Domain(format!(
                "direction ({u}, {v}) must be finite and nonzero"
            )));
        }
        Ok(Self { u, v })
    }

    pub fn diagonal() -> Self {
        Self { u: 1.0, v: 1.0 }
    }

    pub fn norm(&self) -> f64 {
        self.u.hypot(self.v)
    }

    /// r·h for r ≠ 0.
    pub fn scaled(&self, r: f64) -> Result<Self> {
        Self::new(r * self.u, r * self.v)
    }
}

/// Open box (x_low, x_high) × (y_low, y_high).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain2 {
    pub x_low: f64,
    pub x_high: f64,
    pub y_low: f64,
    pub y_high: f64,
}

impl Domain2 {
    pub fn plane() -> Self {
        Self {
            x_low: f64::NEG_INFINITY,
            x_high: f64::INFINITY,
            y_low: f64::NEG_INFINITY,
            y_high: f64::INFINITY,
        }
    }

    pub fn positive_quadrant() -> Self {
        Self {
            x_low: 0.0,
            y_low: 0.0,
            ..Self::plane()
        }
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        x > self.x_low && x < self.x_high && y > self.y_low && y < self.y_high
    }
}

/// A real function of two variables on a declared domain.
pub struct Surface<F> {
    f: F,
    domain: Domain2,
}

impl<F: Fn(f64, f64) -> Result<f64>> Surface<F> {
    pub fn new(f: F, domain: Domain2) -> Self {
        Self { f, domain }
    }

    pub fn plane(f: F) -> Self {
        Self::new(f, Domain2::plane())
    }

    pub fn domain(&self) -> Domain2 {
        self.domain
    }

    pub fn eval(&self, p: (f64, f64)) -> Result<f64> {
        if !self.domain.contains(p) {
            return Err(Error::Domain(format!(
                "stencil point ({}, {}) leaves the domain {:?}",
                p.0, p.1, self.domain
            )));
        }
        let v = (self.f)(p.0, p.1)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "f({}, {}) = {v} is not finite",
                p.0, p.1
            )));
        }
        Ok(v)
    }
}

/// Sign of a second derivative relative to a tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Convex,
    Concave,
    Indeterminate,
}

impl Classification {
    pub fn of(second_deriv: f64, tol: f64) -> Self {
        if second_deriv > tol {
            Self::Convex
        } else if second_deriv < -tol {
            Self::Concave
        } else {
            Self::Indeterminate
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Convex => "convex",
            Self::Concave => "concave",
            Self::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalReport {
    pub point: (f64, f64),
    pub direction: Direction2,
    pub second_deriv: f64,
    pub step: f64,
    pub classification: Classification,
}

/// Stencil parameter t for p ± t·h when none is given.
pub fn default_step(p: (f64, f64), h: Direction2) -> f64 {
    STEP_SCALE * p.0.hypot(p.1).max(1.0) / h.norm()
}

fn resolve_step(p: (f64, f64), h: Direction2, step: Option<f64>) -> Result<f64> {
    match step {
        None => Ok(default_step(p, h)),
        Some(s) if s > 0.0 && s.is_finite() => Ok(s),
        Some(s) => Err(Error::Config(format!(
            "finite-difference step must be positive, got {s}"
        ))),
    }
}

fn offset(p: (f64, f64), h: Direction2, t: f64) -> (f64, f64) {
    (p.0 + t * h.u, p.1 + t * h.v)
}

/// [f(p + t·h) − 2f(p) + f(p − t·h)] / t².
pub fn directional_second_derivative<F>(
    s: &Surface<F>,
    p: (f64, f64),
    h: Direction2,
    step: Option<f64>,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let t = resolve_step(p, h, step)?;
    let fp = s.eval(offset(p, h, t))?;
    let f0 = s.eval(p)?;
    let fm = s.eval(offset(p, h, -t))?;
    Ok(((fp - f0) + (fm - f0)) / (t * t))
}

/// f_xx u² + 2 f_xy uv + f_yy v² from centered differences with axis step t·‖h‖.
///
/// Fails with [`Error::Inconsistent`] if it disagrees with the slice estimate
/// by more than [`mixed_tolerance`].
pub fn hessian_form<F>(
    s: &Surface<F>,
    p: (f64, f64),
    h: Direction2,
    step: Option<f64>,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let t = resolve_step(p, h, step)?;
    let d = t * h.norm();
    let (x, y) = p;
    let f0 = s.eval(p)?;
    let fxx = ((s.eval((x + d, y))? - f0) + (s.eval((x - d, y))? - f0)) / (d * d);
    let fyy = ((s.eval((x, y + d))? - f0) + (s.eval((x, y - d))? - f0)) / (d * d);
    let fxy = ((s.eval((x + d, y + d))? - s.eval((x + d, y - d))?)
        - (s.eval((x - d, y + d))? - s.eval((x - d, y - d))?))
        / (4.0 * d * d);
    let form = fxx * h.u * h.u + 2.0 * fxy * h.u * h.v + fyy * h.v * h.v;
    let slice = directional_second_derivative(s, p, h, Some(t))?;
    if (form - slice).abs() > mixed_tolerance(slice) {
        return Err(Error::Inconsistent(format!(
            "quadratic form {form:e} and slice {slice:e} disagree at ({x}, {y})"
        )));
    }
    Ok(form)
}

pub fn directional_report<F>(
    s: &Surface<F>,
    p: (f64, f64),
    h: Direction2,
    step: Option<f64>,
    tol: f64,
) -> Result<DirectionalReport>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let t = resolve_step(p, h, step)?;
    let d2 = directional_second_derivative(s, p, h, Some(t))?;
    Ok(DirectionalReport {
        point: p,
        direction: h,
        second_deriv: d2,
        step: t,
        classification: Classification::of(d2, tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanSummary {
    pub convex: usize,
    pub concave: usize,
    pub indeterminate: usize,
    pub failed: usize,
}

#[derive(Debug)]
pub struct DirectionalScan {
    pub reports: Vec<DirectionalReport>,
    /// Points where f could not be evaluated, with the reason.
    pub failures: Vec<((f64, f64), Error)>,
    pub summary: ScanSummary,
}

/// One report per grid point; evaluation failures are collected rather than fatal.
pub fn directional_scan<F>(
    s: &Surface<F>,
    grid: &[(f64, f64)],
    h: Direction2,
    step: Option<f64>,
    tol: f64,
) -> DirectionalScan
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut scan = DirectionalScan {
        reports: Vec::with_capacity(grid.len()),
        failures: Vec::new(),
        summary: ScanSummary::default(),
    };
    for &p in grid {
        match directional_report(s, p, h, step, tol) {
            Ok(r) => {
                match r.classification {
                    Classification::Convex => scan.summary.convex += 1,
                    Classification::Concave => scan.summary.concave += 1,
                    Classification::Indeterminate => scan.summary.indeterminate += 1,
                }
                scan.reports.push(r);
            }
            Err(e) => {
                scan.summary.failed += 1;
                scan.failures.push((p, e));
            }
        }
    }
    scan
}

/// Whether the classification under h survives h ↦ r·h.
///
/// The second derivative itself scales by r²; with the default step the
/// stencil points are the same for both directions.
pub fn scale_invariance_check<F>(
    s: &Surface<F>,
    p: (f64, f64),
    h: Direction2,
    r: f64,
    step: Option<f64>,
    tol: f64,
) -> Result<bool>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    if !(r != 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "scale factor must be nonzero, got {r}"
        )));
    }
    let rh = h.scaled(r)?;
    let base = directional_report(s, p, h, step, tol)?;
    let scaled_step = step.map(|t| t / r.abs());
    let scaled = directional_report(s, p, rh, scaled_step, tol)?;
    Ok(base.classification == scaled.classification)
}

/// Outcome of a midpoint geometric-convexity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenReport {
    pub holds: bool,
    /// Largest φ(√(xy)) − √(φ(x)φ(y)) over the pairs.
    pub worst_margin: f64,
    pub worst_pair: (f64, f64),
}

fn check_interval((a, b): (f64, f64)) -> Result<()> {
    if !(a >= 0.0 && b > a && b.is_finite()) {
        return Err(Error::Domain(format!(
            "interval ({a}, {b}) must be a bounded subset of (0, ∞)"
        )));
    }
    Ok(())
}

/// φ(√(xy)) ≤ √(φ(x)φ(y)) + tol at every pair.
pub fn jensen_geometric_check<P>(
    phi: P,
    interval: (f64, f64),
    pairs: &[(f64, f64)],
    tol: f64,
) -> Result<JensenReport>
where
    P: Fn(f64) -> Result<f64>,
{
    check_interval(interval)?;
    if pairs.is_empty() {
        return Err(Error::Config("no pairs given".into()));
    }
    let inside = |x: f64| x > interval.0 && x < interval.1;
    let mut report = JensenReport {
        holds: true,
        worst_margin: f64::NEG_INFINITY,
        worst_pair: pairs[0],
    };
    for &(x, y) in pairs {
        if !(inside(x) && inside(y)) {
            return Err(Error::Domain(format!(
                "pair ({x}, {y}) leaves the interval ({}, {})",
                interval.0, interval.1
            )));
        }
        let (fx, fy) = (phi(x)?, phi(y)?);
        if !(fx > 0.0 && fy > 0.0) {
            return Err(Error::Domain(format!(
                "φ must be positive, got φ({x}) = {fx}, φ({y}) = {fy}"
            )));
        }
        let margin = phi((x * y).sqrt())? - (fx * fy).sqrt();
        if margin > report.worst_margin {
            report.worst_margin = margin;
            report.worst_pair = (x, y);
        }
    }
    report.holds = report.worst_margin <= tol;
    Ok(report)
}

/// Outcome of the log-log transform check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformReport {
    pub holds: bool,
    /// Smallest second difference of u ↦ log φ(e^u).
    pub min_second_diff: f64,
    /// x = e^u where the minimum occurs.
    pub argmin: f64,
    pub nodes: usize,
}

/// Second differences of u ↦ log φ(e^u) with spacing `step` across log(interval),
/// all required to be ≥ −tol. Stencils stay strictly inside the interval.
pub fn geometric_convexity_via_transform<P>(
    phi: P,
    interval: (f64, f64),
    step: f64,
    tol: f64,
) -> Result<TransformReport>
where
    P: Fn(f64) -> Result<f64>,
{
    check_interval(interval)?;
    if interval.0 == 0.0 {
        return Err(Error::Domain(
            "interval must stay away from 0 for the log transform".into(),
        ));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {step}")));
    }
    let (lo, hi) = (interval.0.ln(), interval.1.ln());
    let n = ((hi - lo) / step).floor() as usize;
    if n < 4 {
        return Err(Error::Config(format!(
            "step {step} leaves fewer than 3 interior nodes on log({:?})",
            interval
        )));
    }
    let psi = (1..n)
        .map(|j| {
            let x = (lo + step * j as f64).exp();
            let v = phi(x)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("φ({x}) = {v} is not positive")));
            }
            Ok(v.ln())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = TransformReport {
        holds: true,
        min_second_diff: f64::INFINITY,
        argmin: f64::NAN,
        nodes: psi.len() - 2,
    };
    for (j, w) in psi.windows(3).enumerate() {
        let d2 = ((w[2] - w[1]) + (w[0] - w[1])) / (step * step);
        if d2 < report.min_second_diff {
            report.min_second_diff = d2;
            report.argmin = (lo + step * (j + 2) as f64).exp();
        }
    }
    report.holds = report.min_second_diff >= -tol;
    Ok(report)
}

/// Result of one hypothesis in [`corollary_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest violation found (relative residual, or −second derivative).
    pub worst: f64,
    pub worst_point: (f64, f64),
    pub checked: usize,
    pub failures: Vec<((f64, f64), String)>,
}

impl HypothesisCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            passed: true,
            worst: f64::NEG_INFINITY,
            worst_point: (f64::NAN, f64::NAN),
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, p: (f64, f64), violation: Result<f64>, tol: f64) {
        self.checked += 1;
        match violation {
            Ok(v) => {
                if v > self.worst || self.worst_point.0.is_nan() {
                    self.worst = v;
                    self.worst_point = p;
                }
                if !(v <= tol) {
                    self.passed = false;
                }
            }
            Err(e) => {
                self.passed = false;
                self.failures.push((p, e.to_string()));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    pub symmetry: HypothesisCheck,
    pub log_convexity: HypothesisCheck,
    pub recurrence: HypothesisCheck,
}

impl CorollaryReport {
    pub fn hypotheses(&self) -> [&HypothesisCheck; 3] {
        [&self.symmetry, &self.log_convexity, &self.recurrence]
    }

    pub fn passed_count(&self) -> usize {
        self.hypotheses().iter().filter(|h| h.passed).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed_count() == 3
    }
}

fn rel_gap(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("non-finite values {a}, {b}")));
    }
    Ok((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
}

/// Checks on `grid` the three properties that single out the Beta function:
///
/// * symmetry B(x, y) = B(y, x);
/// * log B convex along (1, 1), second derivative ≥ −[`DEFAULT_CLASSIFY_TOL`];
/// * B(x+1, x+y+1) = x(x+y)/((2x+y+1)(2x+y)) · B(x, x+y) together with
///   B(1, 1+y) = 1/(1+y).
///
/// Identities are tested to relative tolerance `tol`.
pub fn corollary_certificate<B>(b: B, grid: &[(f64, f64)], tol: f64) -> Result<CorollaryReport>
where
    B: Fn(f64, f64) -> Result<f64>,
{
    if grid.is_empty() {
        return Err(Error::Config("certificate grid is empty".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if let Some(p) = grid
        .iter()
        .find(|p| !Domain2::positive_quadrant().contains(**p))
    {
        return Err(Error::Domain(format!(
            "grid point ({}, {}) is outside (0, ∞)²",
            p.0, p.1
        )));
    }
    let mut symmetry = HypothesisCheck::new("symmetry");
    let mut log_convexity = HypothesisCheck::new("diagonal log-convexity");
    let mut recurrence = HypothesisCheck::new("recurrence and boundary");

    let log_b = Surface::new(
        |x: f64, y: f64| {
            let v = b(x, y)?;
            if !(v > 0.0) {
                return Err(Error::Domain(format!("B({x}, {y}) = {v} is not positive")));
            }
            Ok(v.ln())
        },
        Domain2::positive_quadrant(),
    );

    for &(x, y) in grid {
        symmetry.record((x, y), (|| rel_gap(b(x, y)?, b(y, x)?))(), tol);
        log_convexity.record(
            (x, y),
            directional_second_derivative(&log_b, (x, y), Direction2::diagonal(), None)
                .map(|d2| -d2),
            DEFAULT_CLASSIFY_TOL,
        );
        let ratio = x * (x + y) / ((2.0 * x + y + 1.0) * (2.0 * x + y));
        recurrence.record(
            (x, y),
            (|| rel_gap(b(x + 1.0, x + y + 1.0)?, ratio * b(x, x + y)?))(),
            tol,
        );
    }
    let mut ys: Vec<f64> = grid.iter().map(|p| p.1).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    for y in ys {
        recurrence.record(
            (1.0, 1.0 + y),
            (|| rel_gap(b(1.0, 1.0 + y)?, 1.0 / (1.0 + y)))(),
            tol,
        );
    }
    Ok(CorollaryReport {
        symmetry,
        log_convexity,
        recurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Surface<impl Fn(f64, f64) -> Result<f64>> {
        Surface::plane(|x: f64, y: f64| Ok(x * x + 5.0 * x * y + y * y))
    }

    fn dir(u: f64, v: f64) -> Direction2 {
        Direction2::new(u, v).unwrap()
    }

    #[test]
    fn example_quadratic_slices() {
        // Exact slice curvatures of x² + 5xy + y²: 2 ∓ 10 + 2.
        let f = example();
        for &p in &[(0.0, 0.0), (1.5, -2.0), (4.0, 4.0)] {
            let anti = directional_second_derivative(&f, p, dir(1.0, -1.0), None).unwrap();
            let diag = directional_second_derivative(&f, p, dir(1.0, 1.0), None).unwrap();
            assert!((anti + 6.0).abs() < 1e-6, "{anti}");
            assert!((diag - 14.0).abs() < 1e-6, "{diag}");
        }
    }

    #[test]
    fn constant_has_zero_curvature() {
        let f = Surface::plane(|_: f64, _: f64| Ok(3.0));
        assert_eq!(
            directional_second_derivative(&f, (1.0, 2.0), dir(0.3, 0.7), None).unwrap(),
            0.0
        );
    }

    #[test]
    fn hessian_form_examples() {
        let q = hessian_form(&example(), (1.0, 1.0), dir(1.0, -1.0), None).unwrap();
        assert!((q + 6.0).abs() < 1e-6);
        let xy = Surface::plane(|x: f64, y: f64| Ok(x * y));
        assert!((hessian_form(&xy, (2.0, -1.0), dir(1.0, 1.0), None).unwrap() - 2.0).abs() < 1e-6);
        let xx = Surface::plane(|x: f64, _: f64| Ok(x * x));
        assert_eq!(
            hessian_form(&xx, (2.0, -1.0), dir(0.0, 1.0), None).unwrap(),
            0.0
        );
    }

    #[test]
    fn stencil_must_stay_in_domain() {
        let f = Surface::new(
            |x: f64, y: f64| Ok((x * y).ln()),
            Domain2::positive_quadrant(),
        );
        let r = directional_second_derivative(&f, (1e-4, 1.0), dir(1.0, 0.0), Some(1e-3));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn zero_direction_rejected() {
        assert!(Direction2::new(0.0, 0.0).is_err());
        assert!(dir(1.0, 2.0).scaled(0.0).is_err());
    }

    #[test]
    fn scan_counts() {
        let grid: Vec<(f64, f64)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i as f64, j as f64)))
            .collect();
        let scan = directional_scan(
            &example(),
            &grid,
            dir(1.0, -1.0),
            None,
            DEFAULT_CLASSIFY_TOL,
        );
        assert_eq!(scan.summary.concave, 16);
        let affine = Surface::plane(|x: f64, y: f64| Ok(2.0 * x - 3.0 * y + 1.0));
        let scan = directional_scan(&affine, &grid, dir(1.0, 1.0), None, 1e-8);
        assert_eq!(scan.summary.indeterminate, 16);
    }

    #[test]
    fn scan_collects_failures() {
        let f = Surface::new(
            |x: f64, y: f64| Ok(x.ln() + y.ln()),
            Domain2::positive_quadrant(),
        );
        let scan = directional_scan(&f, &[(1.0, 1.0), (-1.0, 1.0)], dir(1.0, 1.0), None, 1e-7);
        assert_eq!(scan.summary.failed, 1);
        assert_eq!(scan.summary.concave, 1);
    }

    #[test]
    fn scale_invariance_examples() {
        let f = example();
        assert!(scale_invariance_check(&f, (1.0, 2.0), dir(1.0, 1.0), -2.0, None, 1e-7).unwrap());
        assert!(scale_invariance_check(&f, (1.0, 2.0), dir(1.0, -1.0), 3.0, None, 1e-7).unwrap());
        assert!(scale_invariance_check(&f, (1.0, 2.0), dir(0.2, 0.9), 1.0, None, 1e-7).unwrap());
    }

    #[test]
    fn power_is_geometrically_affine() {
        let phi = |x: f64| Ok(3.0 * x * x);
        let pairs = [(1.0, 4.0), (2.0, 8.0), (1.5, 1.5)];
        let r = jensen_geometric_check(phi, (0.5, 10.0), &pairs, 1e-12).unwrap();
        assert!(r.holds && r.worst_margin.abs() < 1e-13, "{r:?}");
        let t = geometric_convexity_via_transform(phi, (1.0, 10.0), 1e-2, 1e-6).unwrap();
        assert!(t.holds && t.min_second_diff.abs() < 1e-9, "{t:?}");
    }

    #[test]
    fn jensen_interval_enforced() {
        let phi = |x: f64| Ok(x);
        assert!(jensen_geometric_check(phi, (1.0, 2.0), &[(0.5, 1.5)], 0.0).is_err());
    }

    #[test]
    fn corollary_rejects_sum() {
        let r = corollary_certificate(|x, y| Ok(x + y), &[(1.0, 1.0), (2.0, 0.5)], 1e-8).unwrap();
        assert!(r.symmetry.passed);
        assert!(!r.recurrence.passed);
    }
}
