use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spectral_gaps::cli::{load_config, run, run_example, Overrides, Report};

/// Reproduces the built-in examples or runs a config file, printing a table and optionally
/// writing a JSON report (plus a CSV of plot points next to it).
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Built-in example: 2 (box), 3 (fractal square), 4 (Cantor measure), 5 (sawtooth), 6 (disk).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    example: Option<u32>,
    /// TOML config with a domain, a spectrum and a task list.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for comparisons that are exact in exact arithmetic.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Half-side of the frequency cube for finite sums.
    #[arg(long)]
    truncation: Option<u64>,
    /// Dilation factor (example 3).
    #[arg(long)]
    t: Option<f64>,
    /// Number of sawtooth teeth (example 5).
    #[arg(long)]
    k: Option<u32>,
    /// Disk radius (example 6).
    #[arg(long)]
    r: Option<f64>,
    /// Box sides, comma separated (example 2).
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides {
        t: args.t,
        k: args.k,
        r: args.r,
        a: args.a,
        seed: args.seed,
        tolerance: args.tolerance,
        truncation: args.truncation.map(|l| l as f64),
    };
    let report: spectral_gaps::Result<Report> = match (&args.example, &args.config) {
        (Some(id), _) => run_example(*id, &overrides),
        (None, Some(path)) => load_config(path).and_then(|mut cfg| {
            overrides.apply(&mut cfg);
            run(&cfg, "config")
        }),
        (None, None) => unreachable!("clap requires one of --example or --config"),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.table());
    if let Some(out) = &args.out {
        if let Err(e) = report.write(out) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
