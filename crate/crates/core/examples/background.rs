//! Background temperature and normal-velocity lift for the bundled
//! small-data configuration.

use std::path::Path;

use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/small_data.toml");
    let prep = Prepared::load(&path)?;
    let bg = &prep.setup.background;
    let theta = bg.theta();
    let (lo, hi) = theta.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    println!("c_g = {:.3e}, compatibility projection = {:.3e}", bg.c_g, bg.projection);
    println!("theta_bar in [{lo:.6}, {hi:.6}], theta1 ratio {:?}", bg.theta1_ratio);
    let lift = prep.setup.lift.summary();
    println!("lift source {:.3e}, |u0|_max = {:.3e}", lift.source, prep.setup.lift.u0.max_abs());
    Ok(())
}
