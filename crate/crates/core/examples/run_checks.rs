//! Run a selection of the verification checks from code and print the
//! report that the theta-check binary would print.

use thetakit::checks::{run_named, CheckSpec};

fn main() -> thetakit::Result<()> {
    let spec = CheckSpec { trials: 50, ..CheckSpec::with_prime(3) };
    let report = run_named("f-congruence,qexp-congruence,hopkins-mistake,cohomology-presets", &spec)?;
    print!("{}", report.to_text(true));
    std::process::exit(if report.passed() { 0 } else { 1 });
}
