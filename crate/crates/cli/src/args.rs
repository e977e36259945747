//! Command-line grammar. Every flag lands in the parameter map under its long name.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::{Command, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "betagamma",
    version,
    about = "Beta and Gamma functions from their functional equations"
)]
struct Cli {
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Also write an SVG line chart of the main columns.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Evaluate gamma, lngamma, beta or lnbeta by quadrature on a grid.
    Eval(EvalArgs),
    /// Reconstruct x ↦ B(x, x+k) and compare with quadrature.
    Ray(RayArgs),
    /// Check the characterizing hypotheses on a grid.
    Certify(CertifyArgs),
    /// Compare two beta-type generators.
    Betatype(BetatypeArgs),
    /// Classify directional second derivatives over a grid.
    Scan(ScanArgs),
    /// Report solver convergence against the oracle.
    Converge(ConvergeArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// gamma | lngamma | beta | lnbeta
    #[arg(long = "fn")]
    func: String,
    /// Value or start:stop:step
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
}

#[derive(Debug, Args)]
struct RayArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// krull | gm | oracle
    #[arg(long, allow_hyphen_values = true)]
    method: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xs: String,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// final-corollary | ray-concavity
    #[arg(long, allow_hyphen_values = true)]
    target: String,
    /// Grid for both coordinates (final-corollary) or for x (ray-concavity).
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Offsets k (ray-concavity).
    #[arg(long, allow_hyphen_values = true)]
    ks: Option<String>,
    /// Constant added to the Beta function before certifying.
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
}

#[derive(Debug, Args)]
struct BetatypeArgs {
    /// gamma | identity | power:p | exp:c | expgamma:c, optionally prefixed by `a*`
    #[arg(long, allow_hyphen_values = true)]
    g1: String,
    #[arg(long, allow_hyphen_values = true)]
    g2: String,
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Points for the exponential fit (defaults to the grid).
    #[arg(long = "fit-xs", allow_hyphen_values = true)]
    fit_xs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// example | logbeta | lngamma | poly
    #[arg(long = "fn")]
    func: String,
    /// a,b,c,d,e,f for a x² + b xy + c y² + d x + e y + f
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xs: String,
    #[arg(long, allow_hyphen_values = true)]
    ys: Option<String>,
    /// Direction u,v
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// gm | krull
    #[arg(long, allow_hyphen_values = true)]
    solver: String,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xs: String,
    /// Comma-separated product lengths (gm).
    #[arg(long, allow_hyphen_values = true)]
    schedule: Option<String>,
    /// ray | one (gm)
    #[arg(long, allow_hyphen_values = true)]
    factor: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
}

fn put(map: &mut BTreeMap<String, String>, key: &str, value: Option<String>) {
    if let Some(v) = value {
        map.insert(key.to_string(), v);
    }
}

/// Parses a full argument vector (program name first).
pub fn parse<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let mut p = BTreeMap::new();
    let command = match cli.command {
        Sub::Eval(a) => {
            put(&mut p, "fn", Some(a.func));
            put(&mut p, "x", Some(a.x));
            put(&mut p, "y", a.y);
            Command::Eval
        }
        Sub::Ray(a) => {
            put(&mut p, "k", Some(a.k));
            put(&mut p, "method", a.method);
            put(&mut p, "xs", Some(a.xs));
            put(&mut p, "tol", a.tol);
            Command::Ray
        }
        Sub::Certify(a) => {
            put(&mut p, "target", Some(a.target));
            put(&mut p, "grid", Some(a.grid));
            put(&mut p, "ks", a.ks);
            put(&mut p, "perturb", a.perturb);
            put(&mut p, "tol", a.tol);
            Command::Certify
        }
        Sub::Betatype(a) => {
            put(&mut p, "g1", Some(a.g1));
            put(&mut p, "g2", Some(a.g2));
            put(&mut p, "grid", Some(a.grid));
            put(&mut p, "fit-xs", a.fit_xs);
            put(&mut p, "tol", a.tol);
            Command::Betatype
        }
        Sub::Scan(a) => {
            put(&mut p, "fn", Some(a.func));
            put(&mut p, "coeffs", a.coeffs);
            put(&mut p, "xs", Some(a.xs));
            put(&mut p, "ys", a.ys);
            put(&mut p, "h", a.h);
            put(&mut p, "step", a.step);
            put(&mut p, "tol", a.tol);
            Command::Scan
        }
        Sub::Converge(a) => {
            put(&mut p, "solver", Some(a.solver));
            put(&mut p, "k", a.k);
            put(&mut p, "xs", Some(a.xs));
            put(&mut p, "schedule", a.schedule);
            put(&mut p, "factor", a.factor);
            put(&mut p, "tol", a.tol);
            Command::Converge
        }
    };
    Ok(RunConfig {
        command,
        parameters: p,
        output_path: cli.output,
        plot_path: cli.plot,
    })
}
