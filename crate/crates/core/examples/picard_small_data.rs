//! Successive approximations for small data: the contraction table.

use std::path::Path;

use nsf::picard::{picard_iterate, FlowState};
use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/small_data.toml");
    let prep = Prepared::load(&path)?;
    let out = picard_iterate(&prep.setup, &FlowState::zeros(&prep.grid), &prep.settings)?;
    println!("{:>4} {:>12} {:>12} {:>10} {:>8} {:>12}", "n", "A_n", "delta_n", "q_n", "sweeps", "residual");
    for r in &out.report.records {
        let q = r.q.map_or("-".to_string(), |q| format!("{q:.3e}"));
        println!(
            "{:>4} {:>12.4e} {:>12.4e} {:>10} {:>8} {:>12.3e}",
            r.step, r.a_n, r.delta, q, r.inner.sweeps, r.residual.balance()
        );
    }
    println!("status: {:?}", out.report.status);
    Ok(())
}
