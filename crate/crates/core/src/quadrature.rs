//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! The 15-point Kronrod rule is paired with its embedded 7-point
//! Gauss–Legendre rule; their difference drives both the error estimate and
//! the choice of which subinterval to bisect next. Several segments, each
//! with its own integrand, share one priority queue so that the tolerance is
//! distributed over the whole integral rather than per piece.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Weights of the embedded 7-point Gauss rule, at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::Config(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::Config(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Copy with both tolerances multiplied by `factor`.
    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-300,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

/// One piece of an integral: an integrand together with its finite interval.
pub struct Segment<'a> {
    pub integrand: &'a dyn Fn(f64) -> f64,
    pub lo: f64,
    pub hi: f64,
}

impl<'a> Segment<'a> {
    pub fn new(integrand: &'a dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Self {
        Self { integrand, lo, hi }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    segment: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    // Largest error first; ties broken by position so the order is total and reproducible.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.segment.cmp(&self.segment))
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// Applies the 15-point Kronrod rule on [lo, hi], returning (value, error estimate).
pub fn gauss_kronrod_15(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let value = res_k * half;
    let err = rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale);
    (value, err)
}

/// Integrates the sum of `segments` to the tolerance in `cfg`.
///
/// Bisects the piece with the largest error estimate until the total error
/// estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate_segments(segments: &[Segment<'_>], cfg: &QuadratureConfig) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    for (idx, s) in segments.iter().enumerate() {
        if !(s.lo.is_finite() && s.hi.is_finite()) {
            return Err(Error::Domain(format!(
                "segment [{}, {}] must be finite",
                s.lo, s.hi
            )));
        }
        if s.hi == s.lo {
            continue;
        }
        let (value, error) = gauss_kronrod_15(s.integrand, s.lo, s.hi);
        heap.push(Piece {
            segment: idx,
            lo: s.lo,
            hi: s.hi,
            value,
            error,
        });
    }

    let (v0, e0) = totals(&heap);
    let mut running_value = CompensatedSum::new();
    running_value.add(v0);
    let mut running_error = CompensatedSum::new();
    running_error.add(e0);

    let mut subdivisions = 0usize;
    loop {
        let value = running_value.value();
        let error = running_error.value().max(0.0);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Convergence(format!(
                "integrand produced a non-finite value (value {value}, error {error})"
            )));
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            let (value, error) = totals(&heap);
            return Ok(Integral {
                value,
                abs_error: error,
                subdivisions,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Convergence(format!(
                "{subdivisions} subdivisions exhausted with error estimate {error:e} on value {value:e}"
            )));
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => unreachable!("non-zero error implies at least one piece"),
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Convergence(format!(
                "interval [{:e}, {:e}] cannot be bisected further",
                worst.lo, worst.hi
            )));
        }
        let f = segments[worst.segment].integrand;
        running_value.add(-worst.value);
        running_error.add(-worst.error);
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error) = gauss_kronrod_15(f, lo, hi);
            running_value.add(value);
            running_error.add(error);
            heap.push(Piece {
                segment: worst.segment,
                lo,
                hi,
                value,
                error,
            });
        }
        subdivisions += 1;
    }
}

/// Single-integrand convenience wrapper around [`integrate_segments`].
pub fn integrate(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    integrate_segments(&[Segment::new(f, lo, hi)], cfg)
}

fn totals(heap: &BinaryHeap<Piece>) -> (f64, f64) {
    // Sort so the sum does not depend on heap layout.
    let mut pieces: Vec<&Piece> = heap.iter().collect();
    pieces.sort_by(|a, b| a.segment.cmp(&b.segment).then(a.lo.total_cmp(&b.lo)));
    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    for p in pieces {
        value.add(p.value);
        error += p.error;
    }
    (value.value(), error)
}
