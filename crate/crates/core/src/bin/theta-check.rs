use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use thetakit::checks::{resolve, run, CheckSpec, GoldenMode};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// Run the verification checks and report pass/fail per check.
#[derive(Parser, Debug)]
#[command(name = "theta-check", version)]
struct Args {
    /// Prime p (2, 3 or 5).
    #[arg(long, default_value_t = 2)]
    prime: u32,
    /// Reported p-adic digits N.
    #[arg(long, default_value_t = 12)]
    precision: u32,
    /// Polynomial degree cap D.
    #[arg(long, default_value_t = 24)]
    degree_cap: u32,
    /// θ-level cap K.
    #[arg(long, default_value_t = 4)]
    theta_levels: u32,
    /// q-expansion precision M.
    #[arg(long, default_value_t = 64)]
    q_terms: usize,
    /// Largest λ index.
    #[arg(long, default_value_t = 8)]
    lambda_max: u32,
    /// Random instances per randomized suite.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma separated check names, or `all`.
    #[arg(long, default_value = "all")]
    check: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Compare artifacts against golden files in this directory.
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Rewrite the golden files instead of comparing (needs --golden).
    #[arg(long, requires = "golden")]
    regenerate_golden: bool,
    /// Report zero wall time so output is byte-for-byte reproducible.
    #[arg(long)]
    no_timings: bool,
    /// List the available checks and exit.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if args.list {
        for name in thetakit::checks::CHECK_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let spec = CheckSpec {
        prime: args.prime,
        precision: args.precision,
        degree_cap: args.degree_cap,
        theta_levels: args.theta_levels,
        q_terms: args.q_terms,
        lambda_max: args.lambda_max,
        trials: args.trials,
        seed: args.seed,
    };
    let selection = match spec.validate().and_then(|_| resolve(&args.check, spec.prime)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("theta-check: {e}");
            return ExitCode::from(2);
        }
    };
    let golden = match (args.golden, args.regenerate_golden) {
        (Some(dir), true) => GoldenMode::Regenerate(dir),
        (Some(dir), false) => GoldenMode::Compare(dir),
        (None, _) => GoldenMode::Off,
    };
    let report = run(&selection, &spec, &golden, !args.no_timings);
    match args.format {
        Format::Text => print!("{}", report.to_text(!args.no_timings)),
        Format::Structured => print!("{}", report.to_json()),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
