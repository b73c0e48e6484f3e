//! Residuals of the full system and the norms of a converged solution.

use std::path::Path;

use nsf::diagnostics::residual_main_system;
use nsf::norms::NormReport;
use nsf::picard::{picard_iterate, FlowState};
use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/small_data.toml");
    let prep = Prepared::load(&path)?;
    let out = picard_iterate(&prep.setup, &FlowState::zeros(&prep.grid), &prep.settings)?;
    let fields = prep.setup.reconstruct(&out.state)?;
    let r = residual_main_system(&prep.grid, &fields, &prep.setup.data, &prep.setup.thermo, &prep.setup.params);
    println!("{r:#?}");
    for (name, f) in [("sigma", &out.state.sigma), ("eta", &out.state.eta)] {
        println!("{}", serde_json::to_string(&NormReport::of(&prep.grid, name, f, prep.settings.p)).unwrap());
    }
    Ok(())
}
