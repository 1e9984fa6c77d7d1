// `!(x > y)` forms deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod run;

use std::process::ExitCode;

use clap::Parser;
use wienerdet::Error;

use config::{Args, RunConfig};

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("wienerdet: invalid configuration: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    // fail on an unwritable path before spending time on the computation
    let sink = match output::open(cfg.out.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("wienerdet: cannot open output: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match run::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let code = match e {
                Error::Domain(_) | Error::Constraint(_) => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            };
            eprintln!("wienerdet: {e}");
            return ExitCode::from(code);
        }
    };
    if let Err(e) = output::write(sink, &cfg, &report) {
        eprintln!("wienerdet: writing output failed: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        for v in &report.violations {
            eprintln!(
                "violation: {} beta={}{:+}i scale={} deviation={:.3e} tol={:.0e}: {}",
                v.check, v.beta_re, v.beta_im, v.scale, v.deviation, v.tol, v.reason
            );
        }
        ExitCode::from(EXIT_VIOLATION)
    }
}
