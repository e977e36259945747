use rayon::prelude::*;

use betagamma::beta_ray::{ray_via_gm, ray_via_krull, RaySpec};
use betagamma::beta_type::{
    beta_type_eval, equality_test, fit_exponential, Generator, GeneratorPair,
};
use betagamma::convexity::{
    corollary_certificate, directional_report, Direction2, Domain2, Surface,
    DEFAULT_CERTIFICATE_TOL, DEFAULT_CLASSIFY_TOL,
};
use betagamma::geo::{gm_converge, gm_trace, GeoProblem, DEFAULT_REL_TOL, DEFAULT_SCHEDULE};
use betagamma::grid::product;
use betagamma::krull::{krull_eval_shifted, DEFAULT_MAX_TERMS, DEFAULT_TOL as KRULL_TOL};
use betagamma::oracle::{beta_eval, gamma_eval, ln_beta_eval, ln_gamma_eval};
use betagamma::{Error, QuadratureConfig};

use crate::params::Params;
use crate::table::{Cell, PlotSpec, Table};
use crate::{Artifacts, CliError, Command};

pub(crate) fn dispatch(command: Command, p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    match command {
        Command::Eval => eval(p),
        Command::Ray => ray(p),
        Command::Certify => certify(p),
        Command::Betatype => betatype(p),
        Command::Scan => scan(p),
        Command::Converge => converge(p),
    }
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn plot(
    title: String,
    x: &'static str,
    ys: &[&'static str],
    log_x: bool,
    log_y: bool,
) -> Option<PlotSpec> {
    Some(PlotSpec {
        title,
        x,
        ys: ys.to_vec(),
        log_x,
        log_y,
    })
}

/// Evaluates rows in parallel, keeping input order.
fn par_rows<T, F>(items: &[T], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>, Error> + Sync + Send,
{
    let rows: Vec<Result<Vec<Cell>, Error>> = items.par_iter().map(f).collect();
    rows.into_iter()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

fn eval(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let func = p.text("fn", None)?;
    let xs = p.range("x", None)?;
    let cfg = quad();
    let (table, label) = match func.as_str() {
        "gamma" | "lngamma" => {
            let mut t = Table::new(&["x", "value", "est_error"]);
            let log = func == "lngamma";
            t.rows = par_rows(&xs, |&x| {
                let (v, e) = if log {
                    let l = ln_gamma_eval(x, &cfg)?;
                    (l.ln_value, l.ln_error)
                } else {
                    let g = gamma_eval(x, &cfg)?;
                    (g.value, g.est_error)
                };
                Ok(vec![x.into(), v.into(), e.into()])
            })?;
            (t, format!("{func}(x)"))
        }
        "beta" | "lnbeta" => {
            let ys = p.range("y", None)?;
            let log = func == "lnbeta";
            let grid = product(&xs, &ys);
            let mut t = Table::new(&["x", "y", "value", "est_error"]);
            t.rows = par_rows(&grid, |&(x, y)| {
                let (v, e) = if log {
                    let l = ln_beta_eval(x, y, &cfg)?;
                    (l.ln_value, l.ln_error)
                } else {
                    let b = beta_eval(x, y, &cfg)?;
                    (b.value, b.est_error)
                };
                Ok(vec![x.into(), y.into(), v.into(), e.into()])
            })?;
            (t, format!("{func}(x, y)"))
        }
        other => {
            return Err(CliError::config(format!(
                "unknown --fn {other:?}; expected gamma, lngamma, beta or lnbeta"
            )))
        }
    };
    let summary = if table.rows.len() == 1 {
        let v = table.column("value").unwrap()[0];
        vec![format!("{label} = {v}")]
    } else {
        vec![format!("{} values of {label}", table.rows.len())]
    };
    Ok(Artifacts {
        plot: plot(label, "x", &["value"], false, false),
        table,
        summary,
    })
}

fn ray_spec(p: &mut Params<'_>, default: Option<&str>) -> Result<RaySpec, CliError> {
    let k = p.f64("k", default)?;
    Ok(RaySpec::new(k)?)
}

fn ray(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let spec = ray_spec(p, None)?;
    let method = p.text("method", Some("krull"))?;
    let xs = p.range("xs", None)?;
    let cfg = quad();
    let tol = match method.as_str() {
        "krull" => p.tol(KRULL_TOL)?,
        "gm" => p.tol(DEFAULT_REL_TOL)?,
        "oracle" => 0.0,
        other => {
            return Err(CliError::config(format!(
                "unknown --method {other:?}; expected krull, gm or oracle"
            )))
        }
    };
    let mut table = Table::new(&["x", "value", "oracle", "rel_err", "est_error", "terms_used"]);
    table.rows = par_rows(&xs, |&x| {
        let sample = match method.as_str() {
            "krull" => ray_via_krull(spec, &[x], tol)?.samples[0],
            "gm" => ray_via_gm(spec, &[x], tol)?.samples[0],
            _ => {
                let b = beta_eval(x, x + spec.k(), &cfg)?;
                betagamma::beta_ray::RaySample {
                    x,
                    value: b.value,
                    est_error: b.est_error,
                    terms_used: 0,
                }
            }
        };
        let oracle = beta_eval(x, x + spec.k(), &cfg)?.value;
        let rel = (sample.value - oracle).abs() / oracle;
        Ok(vec![
            x.into(),
            sample.value.into(),
            oracle.into(),
            rel.into(),
            sample.est_error.into(),
            sample.terms_used.into(),
        ])
    })?;
    let worst = table
        .column("rel_err")
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Artifacts {
        summary: vec![format!(
            "{} samples of B(x, x+{}) via {method}; max rel_err vs oracle {worst:e}",
            table.rows.len(),
            spec.k()
        )],
        plot: plot(
            format!("B(x, x+{}) via {method}", spec.k()),
            "x",
            &["value", "oracle"],
            false,
            true,
        ),
        table,
    })
}

fn certify(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let target = p.text("target", None)?;
    match target.as_str() {
        "final-corollary" => certify_corollary(p),
        "ray-concavity" => certify_ray_concavity(p),
        other => Err(CliError::config(format!(
            "unknown --target {other:?}; expected final-corollary or ray-concavity"
        ))),
    }
}

fn certify_corollary(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let pts = p.range("grid", None)?;
    let perturb = p.f64("perturb", Some("0"))?;
    let tol = p.tol(DEFAULT_CERTIFICATE_TOL)?;
    let cfg = quad();
    let grid = product(&pts, &pts);
    let report = corollary_certificate(
        |x, y| Ok(beta_eval(x, y, &cfg)?.value + perturb),
        &grid,
        tol,
    )?;
    let mut table = Table::new(&[
        "hypothesis",
        "passed",
        "worst",
        "worst_x",
        "worst_y",
        "checked",
        "errors",
    ]);
    let mut summary = Vec::new();
    for h in report.hypotheses() {
        table.push(vec![
            h.name.into(),
            h.passed.into(),
            h.worst.into(),
            h.worst_point.0.into(),
            h.worst_point.1.into(),
            h.checked.into(),
            h.failures.len().into(),
        ]);
        summary.push(format!(
            "{}: {} (worst {:e})",
            h.name,
            if h.passed { "pass" } else { "FAIL" },
            h.worst
        ));
        for (pt, msg) in h.failures.iter().take(3) {
            summary.push(format!("  at ({}, {}): {msg}", pt.0, pt.1));
        }
    }
    summary.push(format!("{}/3 hypotheses pass", report.passed_count()));
    Ok(Artifacts {
        table,
        summary,
        plot: None,
    })
}

fn certify_ray_concavity(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let xs = p.range("grid", None)?;
    let ks = p.range("ks", Some("0:10:1"))?;
    let tol = p.tol(1e-9)?;
    let pairs = product(&ks, &xs);
    let mut table = Table::new(&["k", "x", "f2", "p_poly", "identity_rel_err", "ok"]);
    table.rows = par_rows(&pairs, |&(k, x)| {
        let spec = RaySpec::new(k)?;
        let f2 = spec.log_ratio_d2(x)?;
        let poly = spec.concavity_poly(x)?;
        let rel = (f2 * spec.concavity_denominator(x)? + poly).abs() / poly;
        let ok = f2 <= 1e-12 && poly > 0.0 && rel < tol;
        Ok(vec![
            k.into(),
            x.into(),
            f2.into(),
            poly.into(),
            rel.into(),
            ok.into(),
        ])
    })?;
    let ok_count = table
        .rows
        .iter()
        .filter(|r| r[5] == Cell::Flag(true))
        .count();
    Ok(Artifacts {
        summary: vec![format!("{ok_count}/{} points pass", table.rows.len())],
        plot: plot("F'' along the ray".into(), "x", &["f2"], false, false),
        table,
    })
}

/// Parses a generator label: `gamma`, `identity`, `power:p`, `exp:c`,
/// `expgamma:c`, each optionally prefixed by a positive factor `a*`.
pub fn parse_generator(label: &str) -> Result<Generator, CliError> {
    let bad = || CliError::config(format!("cannot parse generator {label:?}"));
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    if let Some((a, rest)) = label.split_once('*') {
        return Ok(parse_generator(rest)?.scaled(num(a)?)?);
    }
    let (name, arg) = match label.split_once(':') {
        Some((n, a)) => (n, Some(num(a)?)),
        None => (label, None),
    };
    match (name, arg) {
        ("gamma", None) => Ok(Generator::gamma(quad())),
        ("identity", None) => Ok(Generator::identity()),
        ("power", Some(q)) => Ok(Generator::power(q)),
        ("exp", Some(c)) => Ok(Generator::exponential(c)),
        ("expgamma", Some(c)) => Ok(Generator::exp_gamma(c, quad())),
        _ => Err(bad()),
    }
}

fn betatype(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let g1 = parse_generator(&p.text("g1", None)?)?;
    let g2 = parse_generator(&p.text("g2", None)?)?;
    let pts = p.range("grid", None)?;
    let grid_text = p.text("grid", None)?;
    let fit_xs = p.range("fit-xs", Some(&grid_text))?;
    let tol = p.tol(1e-10)?;
    let pair = GeneratorPair::new(g1, g2)?;
    let grid = product(&pts, &pts);
    let mut table = Table::new(&["x", "y", "b1", "b2", "rel_diff", "cocycle_residual"]);
    table.rows = par_rows(&grid, |&(x, y)| {
        let b1 = beta_type_eval(&pair.g1, x, y)?;
        let b2 = beta_type_eval(&pair.g2, x, y)?;
        let cocycle = betagamma::beta_type::ratio_cocycle_residual(&pair, x, y)?;
        Ok(vec![
            x.into(),
            y.into(),
            b1.into(),
            b2.into(),
            ((b1 - b2).abs() / b1).into(),
            cocycle.into(),
        ])
    })?;
    let eq = equality_test(&pair, &grid, tol)?;
    let fit = fit_exponential(&pair, &fit_xs, tol)?;
    Ok(Artifacts {
        summary: vec![
            format!(
                "B_{} {} B_{} on the grid (max rel diff {:e}, max cocycle residual {:e})",
                pair.g1.label(),
                if eq.equal { "=" } else { "≠" },
                pair.g2.label(),
                eq.max_residual,
                eq.max_cocycle_residual
            ),
            format!(
                "fit log(g2/g1) = c x: c = {}, rms residual {:e}, exponential: {}",
                fit.c, fit.residual, fit.equal
            ),
        ],
        plot: None,
        table,
    })
}

fn scan_direction(p: &mut Params<'_>) -> Result<Direction2, CliError> {
    let h: Vec<f64> = p.list("h", Some("1,1"))?;
    if h.len() != 2 {
        return Err(CliError::config("--h takes two comma-separated components"));
    }
    Ok(Direction2::new(h[0], h[1])?)
}

type Bivariate = Box<dyn Fn(f64, f64) -> betagamma::Result<f64> + Send + Sync>;

fn scan_function(p: &mut Params<'_>, name: &str) -> Result<(Bivariate, Domain2), CliError> {
    let cfg = quad();
    Ok(match name {
        "example" => (
            Box::new(|x, y| Ok(x * x + 5.0 * x * y + y * y)),
            Domain2::plane(),
        ),
        "logbeta" => (
            Box::new(move |x, y| Ok(ln_beta_eval(x, y, &cfg)?.ln_value)),
            Domain2::positive_quadrant(),
        ),
        "lngamma" => (
            Box::new(move |x, y| {
                Ok(ln_gamma_eval(x, &cfg)?.ln_value + ln_gamma_eval(y, &cfg)?.ln_value)
            }),
            Domain2::positive_quadrant(),
        ),
        "poly" => {
            let c: Vec<f64> = p.list("coeffs", None)?;
            if c.len() != 6 {
                return Err(CliError::config("--coeffs takes six values a,b,c,d,e,f"));
            }
            (
                Box::new(move |x, y| {
                    Ok(c[0] * x * x + c[1] * x * y + c[2] * y * y + c[3] * x + c[4] * y + c[5])
                }),
                Domain2::plane(),
            )
        }
        other => {
            return Err(CliError::config(format!(
                "unknown --fn {other:?}; expected example, logbeta, lngamma or poly"
            )))
        }
    })
}

fn scan(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let name = p.text("fn", None)?;
    let (f, domain) = scan_function(p, &name)?;
    let xs = p.range("xs", None)?;
    let xs_text = p.text("xs", None)?;
    let ys = p.range("ys", Some(&xs_text))?;
    let h = scan_direction(p)?;
    let step = p.optional_positive("step")?;
    let tol = p.tol(DEFAULT_CLASSIFY_TOL)?;
    let surface = Surface::new(f, domain);
    let grid = product(&xs, &ys);
    let reports: Vec<_> = grid
        .par_iter()
        .map(|&pt| directional_report(&surface, pt, h, step, tol))
        .collect();
    let mut table = Table::new(&["x", "y", "second_deriv", "step", "classification"]);
    let mut counts = [0usize; 4];
    let mut failures = Vec::new();
    for (&(x, y), r) in grid.iter().zip(reports) {
        match r {
            Ok(r) => {
                counts[r.classification as usize] += 1;
                table.push(vec![
                    x.into(),
                    y.into(),
                    r.second_deriv.into(),
                    r.step.into(),
                    r.classification.as_str().into(),
                ]);
            }
            Err(e) => {
                counts[3] += 1;
                failures.push(format!("  at ({x}, {y}): {e}"));
                table.push(vec![
                    x.into(),
                    y.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    "failed".into(),
                ]);
            }
        }
    }
    let mut summary = vec![format!(
        "{name} along ({}, {}): {} convex, {} concave, {} indeterminate, {} failed",
        h.u, h.v, counts[0], counts[1], counts[2], counts[3]
    )];
    summary.extend(failures.into_iter().take(5));
    Ok(Artifacts {
        summary,
        plot: None,
        table,
    })
}

/// Rows (n, value, abs_err, rel_err, err_ratio) for approximants against a reference.
///
/// `err_ratio` is this error divided by the previous one; it is NaN on the first row.
pub fn emit_convergence_report(series: &[(usize, f64, f64)]) -> Table {
    let mut table = Table::new(&["n", "value", "oracle", "abs_err", "rel_err", "err_ratio"]);
    let mut previous: Option<f64> = None;
    for &(n, value, oracle) in series {
        let abs_err = (value - oracle).abs();
        let ratio = previous.map_or(f64::NAN, |p| abs_err / p);
        table.push(vec![
            n.into(),
            value.into(),
            oracle.into(),
            abs_err.into(),
            (abs_err / oracle.abs()).into(),
            ratio.into(),
        ]);
        previous = Some(abs_err);
    }
    table
}

fn converge(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let solver = p.text("solver", None)?;
    match solver.as_str() {
        "gm" => converge_gm(p),
        "krull" => converge_krull(p),
        other => Err(CliError::config(format!(
            "unknown --solver {other:?}; expected gm or krull"
        ))),
    }
}

fn converge_gm(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let factor = p.text("factor", Some("ray"))?;
    let xs = p.range("xs", None)?;
    let default_schedule = DEFAULT_SCHEDULE.map(|n| n.to_string()).join(",");
    let schedule: Vec<usize> = p.list("schedule", Some(&default_schedule))?;
    let tol = p.tol(DEFAULT_REL_TOL)?;
    let cfg = quad();
    let traces: Vec<Result<(f64, Vec<(usize, f64, f64)>, bool), Error>> = match factor.as_str() {
        "ray" => {
            let spec = ray_spec(p, Some("1"))?;
            xs.par_iter()
                .map(|&x| {
                    let problem = spec.geo_problem()?;
                    let oracle = beta_eval(x, x + spec.k(), &cfg)?.value;
                    let trace = gm_trace(&problem, x, &schedule)?;
                    let converged = gm_converge(&problem, x, tol, &schedule)?.converged;
                    Ok((
                        x,
                        trace.into_iter().map(|(n, v)| (n, v, oracle)).collect(),
                        converged,
                    ))
                })
                .collect()
        }
        "one" => xs
            .par_iter()
            .map(|&x| {
                let problem = GeoProblem::new(|_| 1.0, 1.0)?;
                let trace = gm_trace(&problem, x, &schedule)?;
                let converged = gm_converge(&problem, x, tol, &schedule)?.converged;
                Ok((
                    x,
                    trace.into_iter().map(|(n, v)| (n, v, 1.0)).collect(),
                    converged,
                ))
            })
            .collect(),
        other => {
            return Err(CliError::config(format!(
                "unknown --factor {other:?}; expected ray or one"
            )))
        }
    };
    let mut table = Table::new(&[
        "x",
        "n",
        "value",
        "oracle",
        "abs_err",
        "rel_err",
        "err_ratio",
    ]);
    let mut summary = Vec::new();
    for t in traces {
        let (x, series, converged) = t?;
        let report = emit_convergence_report(&series);
        let errs = report.column("rel_err").unwrap();
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        summary.push(format!(
            "x = {x}: rel_err {:e} at n = {}, strictly decreasing: {decreasing}, consecutive change < {tol:e}: {converged}",
            errs[errs.len() - 1],
            series[series.len() - 1].0
        ));
        for mut row in report.rows {
            row.insert(0, x.into());
            table.push(row);
        }
    }
    Ok(Artifacts {
        summary,
        plot: plot(
            "relative error of the product".into(),
            "n",
            &["rel_err"],
            true,
            true,
        ),
        table,
    })
}

fn converge_krull(p: &mut Params<'_>) -> Result<Artifacts, CliError> {
    let spec = ray_spec(p, Some("1"))?;
    let xs = p.range("xs", None)?;
    let tol = p.tol(KRULL_TOL)?;
    let cfg = quad();
    let mut table = Table::new(&[
        "x",
        "value",
        "oracle",
        "rel_err",
        "terms_used",
        "last_term",
        "converged",
    ]);
    table.rows = par_rows(&xs, |&x| {
        let problem = spec.krull_problem()?;
        let r = krull_eval_shifted(&problem, x, tol, DEFAULT_MAX_TERMS)?;
        let value = r.value.exp();
        let oracle = beta_eval(x, x + spec.k(), &cfg)?.value;
        Ok(vec![
            x.into(),
            value.into(),
            oracle.into(),
            ((value - oracle).abs() / oracle).into(),
            r.terms_used.into(),
            r.last_term.into(),
            r.converged.into(),
        ])
    })?;
    let terms = table.column("terms_used").unwrap();
    let max_terms = terms.iter().copied().fold(0.0, f64::max);
    Ok(Artifacts {
        summary: vec![format!(
            "Krull series for k = {}: at most {max_terms} terms per x at tol {tol:e}",
            spec.k()
        )],
        plot: plot(
            "Krull terms used".into(),
            "x",
            &["terms_used"],
            false,
            false,
        ),
        table,
    })
}
