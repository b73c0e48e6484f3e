//! Large data: the iteration leaves the admissible state box and reports it.

use std::path::Path;

use nsf::picard::{picard_iterate, FlowState};
use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/large_data.toml");
    let prep = Prepared::load(&path)?;
    let out = picard_iterate(&prep.setup, &FlowState::zeros(&prep.grid), &prep.settings)?;
    for r in &out.report.records {
        println!("step {}: A_n = {:.3e}, delta = {:.3e}", r.step, r.a_n, r.delta);
    }
    println!("{:?}", out.report.status);
    Ok(())
}
