//! Two Picard runs from different starts reach the same state.

use std::path::Path;

use nsf::picard::{uniqueness_probe, FlowState};
use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/small_data.toml");
    let prep = Prepared::load(&path)?;
    let zero = FlowState::zeros(&prep.grid);
    for seed in [1729, 1, 2] {
        let start = FlowState::random_smooth(&prep.grid, seed).scaled(0.1);
        let d = uniqueness_probe(&prep.setup, &zero, &start, &prep.settings)?;
        println!("seed {seed:>5}: |w_zero - w_random| = {d:.3e}");
    }
    Ok(())
}
