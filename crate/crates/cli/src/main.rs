use std::io::Write;
use std::process::ExitCode;

use betagamma_cli::{args, run};

fn main() -> ExitCode {
    let cfg = match args::parse(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = run(&cfg);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if cfg.output_path.is_none() {
        let _ = out.write_all(outcome.csv.as_bytes());
    }
    // With the CSV on stdout the summary goes to stderr so the two never mix.
    for line in &outcome.summary {
        if cfg.output_path.is_some() && outcome.exit_code == 0 {
            let _ = writeln!(out, "{line}");
        } else {
            eprintln!("{line}");
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
