//! Acceptance suite: each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use betagamma::beta_ray::{ray_recurrence_residual, ray_via_gm, ray_via_krull, RaySpec};
use betagamma::beta_type::{equality_test, fit_exponential, Generator, GeneratorPair};
use betagamma::convexity::{
    corollary_certificate, directional_scan, directional_second_derivative, Classification,
    Direction2, Domain2, Surface, DEFAULT_CERTIFICATE_TOL,
};
use betagamma::geo::{gm_converge, gm_trace, DEFAULT_SCHEDULE};
use betagamma::grid::{product, RangeSpec};
use betagamma::krull::{
    krull_eval_shifted, limit_check, DriverShape, KrullProblem, DEFAULT_MAX_TERMS, DEFAULT_TOL,
};
use betagamma::oracle::{beta_eval, gamma_eval, gamma_recurrence_residual, ln_beta_eval};
use betagamma::QuadratureConfig;

type Outcome = Result<String, String>;

const SEED: u64 = 20_240_601;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn krull_characterization() -> Outcome {
    let start = Instant::now();
    let xs = RangeSpec::new(0.1, 4.9, 0.2)
        .map_err(|e| e.to_string())?
        .points();
    let mut worst = (0.0f64, 0.0, 0.0);
    for k in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let r =
            ray_via_krull(RaySpec::new(k).unwrap(), &xs, DEFAULT_TOL).map_err(|e| e.to_string())?;
        for s in &r.samples {
            let b = beta_eval(s.x, s.x + k, &cfg())
                .map_err(|e| e.to_string())?
                .value;
            let rel = (s.value - b).abs() / b;
            if rel > worst.0 {
                worst = (rel, k, s.x);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst.0 < 1e-8 && secs < 30.0 && xs.len() == 25,
        format!(
            "{} points, max rel err {:.2e} (k = {}, x = {}) in {secs:.2} s",
            5 * xs.len(),
            worst.0,
            worst.1,
            worst.2
        ),
    )
}

fn gm_characterization() -> Outcome {
    let start = Instant::now();
    let mut worst_top = 0.0f64;
    let mut all_decreasing = true;
    let mut notes = Vec::new();
    for k in [0.0, 1.0, 2.0] {
        let spec = RaySpec::new(k).unwrap();
        let p = spec.geo_problem().map_err(|e| e.to_string())?;
        for x in [0.5, 1.5, 2.5] {
            let b = beta_eval(x, x + k, &cfg())
                .map_err(|e| e.to_string())?
                .value;
            // A tolerance no consecutive pair can meet keeps the walk going to the top of the schedule.
            let r = gm_converge(&p, x, 1e-15, &DEFAULT_SCHEDULE).map_err(|e| e.to_string())?;
            if r.terms_used != 1_000_000 {
                return Err(format!("k = {k}, x = {x}: stopped at n = {}", r.terms_used));
            }
            worst_top = worst_top.max((r.value - b).abs() / b);
            let errs: Vec<f64> = gm_trace(&p, x, &DEFAULT_SCHEDULE)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|(_, v)| (v - b).abs() / b)
                .collect();
            if !errs.windows(2).all(|w| w[1] < w[0]) {
                all_decreasing = false;
                notes.push(format!("k = {k}, x = {x}: {errs:?}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_top < 1e-4 && all_decreasing,
        format!(
            "max rel err at n = 1e6 {worst_top:.2e}, errors strictly decreasing: {all_decreasing} in {secs:.2} s {}",
            notes.join("; ")
        ),
    )
}

fn bohr_mollerup() -> Outcome {
    let p = KrullProblem::new(f64::ln, 0.0, 1.0, 0.0, DriverShape::Concave)
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for x in [0.3, 0.5, 1.7, 3.2, 7.9] {
        let r =
            krull_eval_shifted(&p, x, DEFAULT_TOL, DEFAULT_MAX_TERMS).map_err(|e| e.to_string())?;
        let g = gamma_eval(x, &cfg()).map_err(|e| e.to_string())?.value;
        let on_log = (r.value - g.ln()).abs() / g.ln().abs();
        let on_value = (r.value.exp() - g).abs() / g;
        worst = worst.max(on_log).max(on_value);
    }
    check(
        worst < 1e-8,
        format!("max rel err of log Γ and Γ {worst:.2e}"),
    )
}

fn concavity_certificate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst_f2 = f64::NEG_INFINITY;
    let mut min_p = f64::INFINITY;
    let mut worst_identity = 0.0f64;
    for _ in 0..10_000 {
        let k: f64 = rng.gen_range(0.0..=10.0);
        let x: f64 = 10.0 - rng.gen_range(0.0..10.0);
        let spec = RaySpec::new(k).unwrap();
        let f2 = spec.log_ratio_d2(x).map_err(|e| e.to_string())?;
        let poly = spec.concavity_poly(x).map_err(|e| e.to_string())?;
        let den = spec.concavity_denominator(x).map_err(|e| e.to_string())?;
        worst_f2 = worst_f2.max(f2);
        min_p = min_p.min(poly);
        worst_identity = worst_identity.max((f2 * den + poly).abs() / poly);
    }
    check(
        worst_f2 <= 1e-12 && min_p > 0.0 && worst_identity < 1e-9,
        format!("10^4 points: max F'' {worst_f2:.2e}, min P {min_p:.2e}, max identity gap {worst_identity:.2e}"),
    )
}

fn limit_hypothesis() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for k in [0.0, 1.0, 5.0] {
        let spec = RaySpec::new(k).unwrap();
        let report = limit_check(|x| spec.log_ratio(x).unwrap(), &[10.0, 100.0, 1000.0]);
        ok &= report.passed;
        lines.push(format!("k = {k}: {:.1e}", report.differences[2].1));
    }
    check(
        ok,
        format!("|F(x+1) − F(x)| at x = 1000: {}", lines.join(", ")),
    )
}

fn example_exactness() -> Outcome {
    let s = Surface::plane(|x: f64, y: f64| Ok(x * x + 5.0 * x * y + y * y));
    let pts = RangeSpec::new(-2.0, 2.0, 1.0).unwrap().points();
    let grid = product(&pts, &pts);
    let (mut dev_anti, mut dev_diag) = (0.0f64, 0.0f64);
    let (mut seen_anti, mut seen_diag) = (0.0, 0.0);
    for &p in &grid {
        let anti = directional_second_derivative(&s, p, Direction2::new(1.0, -1.0).unwrap(), None)
            .map_err(|e| e.to_string())?;
        let diag = directional_second_derivative(&s, p, Direction2::new(1.0, 1.0).unwrap(), None)
            .map_err(|e| e.to_string())?;
        dev_anti = dev_anti.max((anti + 1.0).abs());
        dev_diag = dev_diag.max((diag - 9.0).abs());
        seen_anti = anti;
        seen_diag = diag;
    }
    check(
        grid.len() == 25 && dev_anti < 1e-6 && dev_diag < 1e-6,
        format!(
            "{} points: along (1,-1) measured {seen_anti:.6} (expected -1), along (1,1) measured {seen_diag:.6} (expected 9)",
            grid.len()
        ),
    )
}

fn directional_log_convexity() -> Outcome {
    let s = Surface::new(
        |x: f64, y: f64| Ok(ln_beta_eval(x, y, &cfg())?.ln_value),
        Domain2::positive_quadrant(),
    );
    let pts = RangeSpec::new(0.25, 8.0, 0.25).unwrap().points();
    let grid = product(&pts, &pts);
    let scan = directional_scan(&s, &grid, Direction2::diagonal(), None, 1e-7);
    let min = scan
        .reports
        .iter()
        .filter(|r| r.classification == Classification::Convex)
        .map(|r| r.second_deriv)
        .fold(f64::INFINITY, f64::min);
    check(
        scan.summary.convex == grid.len(),
        format!(
            "{}/{} convex, smallest second derivative {min:.3e}",
            scan.summary.convex,
            grid.len()
        ),
    )
}

fn beta_type_invariance() -> Outcome {
    let pts: Vec<f64> = (1..=10).map(|i| 0.5 + 4.5 * i as f64 / 11.0).collect();
    let grid = product(&pts, &pts);
    let gamma = Generator::gamma(cfg());
    let mut lines = Vec::new();
    let mut ok = true;
    for c in [-2.0, 0.0, 3.0] {
        let pair =
            GeneratorPair::new(gamma.clone(), gamma.times_exp(c)).map_err(|e| e.to_string())?;
        let eq = equality_test(&pair, &grid, 1e-10).map_err(|e| e.to_string())?;
        let fit = fit_exponential(&pair, &pts, 1e-10).map_err(|e| e.to_string())?;
        ok &= eq.equal && (fit.c - c).abs() < 1e-9 && fit.residual < 1e-10;
        lines.push(format!(
            "c = {c}: equal {} (max {:.1e}), fit {:.12} rms {:.1e}",
            eq.equal, eq.max_residual, fit.c, fit.residual
        ));
    }
    let doubled =
        GeneratorPair::new(gamma.clone(), gamma.scaled(2.0).unwrap()).map_err(|e| e.to_string())?;
    let eq = equality_test(&doubled, &grid, 1e-10).map_err(|e| e.to_string())?;
    ok &= !eq.equal;
    lines.push(format!("2Γ: equal {}", eq.equal));
    check(ok, lines.join("; "))
}

fn corollary() -> Outcome {
    let pts = RangeSpec::new(0.5, 4.0, 0.5).unwrap().points();
    let grid = product(&pts, &pts);
    let oracle = corollary_certificate(
        |x, y| Ok(beta_eval(x, y, &cfg())?.value),
        &grid,
        DEFAULT_CERTIFICATE_TOL,
    )
    .map_err(|e| e.to_string())?;
    let shifted = corollary_certificate(
        |x, y| Ok(beta_eval(x, y, &cfg())?.value + 0.1),
        &grid,
        DEFAULT_CERTIFICATE_TOL,
    )
    .map_err(|e| e.to_string())?;
    check(
        oracle.all_pass() && !shifted.recurrence.passed,
        format!(
            "oracle {}/3 pass; B + 0.1 recurrence {}",
            oracle.passed_count(),
            if shifted.recurrence.passed {
                "passes"
            } else {
                "fails"
            }
        ),
    )
}

fn recurrence_residuals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut worst_krull, mut worst_gm) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let k: f64 = rng.gen_range(0.0..5.0);
        let x: f64 = rng.gen_range(0.1..5.0);
        let spec = RaySpec::new(k).unwrap();
        let krull = |t: f64| Ok(ray_via_krull(spec, &[t], DEFAULT_TOL)?.samples[0].value);
        let gm = |t: f64| Ok(ray_via_gm(spec, &[t], 1e-4)?.samples[0].value);
        worst_krull =
            worst_krull.max(ray_recurrence_residual(spec, x, krull).map_err(|e| e.to_string())?);
        worst_gm = worst_gm.max(ray_recurrence_residual(spec, x, gm).map_err(|e| e.to_string())?);
    }
    let mut worst_gamma = 0.0f64;
    for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        worst_gamma =
            worst_gamma.max(gamma_recurrence_residual(x, &cfg()).map_err(|e| e.to_string())?);
    }
    check(
        worst_krull < 1e-8 && worst_gm < 1e-8 && worst_gamma < 1e-10,
        format!("ray: Krull {worst_krull:.1e}, product {worst_gm:.1e}; Γ {worst_gamma:.1e}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_betagamma");
    let mut files = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(exe)
            .args([
                "ray",
                "--k",
                "1",
                "--method",
                "krull",
                "--xs",
                "0.5:4.5:0.5",
                "--tol",
                "1e-10",
                "--output",
            ])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("run {i} exited with {:?}", status.status.code()));
        }
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    check(
        files[0] == files[1] && !files[0].is_empty(),
        format!(
            "two runs, {} bytes each, identical: {}",
            files[0].len(),
            files[0] == files[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        (
            "Krull reconstruction of the diagonal rays",
            krull_characterization,
        ),
        (
            "product-limit reconstruction of the diagonal rays",
            gm_characterization,
        ),
        ("log Γ from the Krull series", bohr_mollerup),
        ("concavity of the ray driver", concavity_certificate),
        ("limit hypothesis of the ray driver", limit_hypothesis),
        ("worked quadratic example", example_exactness),
        (
            "log B convex along the main diagonal",
            directional_log_convexity,
        ),
        (
            "beta-type invariance under exponential factors",
            beta_type_invariance,
        ),
        ("characterizing hypotheses of the Beta function", corollary),
        ("recurrence residuals", recurrence_residuals),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail}", i + 1);
    }
    println!(
        "{}/{} acceptance criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
