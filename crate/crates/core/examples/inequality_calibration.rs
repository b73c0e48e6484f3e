//! Calibrate the inequality checkers on one seed and verify them on another.

use std::path::Path;

use nsf::diagnostics::{Calibration, SampleCounts, DEFAULT_SEED};
use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/small_data.toml");
    let prep = Prepared::load(&path)?;
    let coef = prep.coefficients();
    let cal = Calibration::calibrate(&prep.grid, &coef, prep.settings.p, DEFAULT_SEED, SampleCounts::default())?;
    println!("{:<24} {:>10} {:>10} {:>10}   fresh seed", "checker", "constant", "median", "fresh max");
    for v in cal.verify(&prep.grid, &coef, DEFAULT_SEED + 1)? {
        let median = cal.constants[&v.id].median_ratio;
        println!("{:<24} {:>10.4} {:>10.4} {:>10.4}   {}", v.id, v.constant, median, v.max_ratio, if v.pass { "pass" } else { "FAIL" });
    }
    println!("C(eps) monotone: {}", cal.interpolation_monotone());
    Ok(())
}
