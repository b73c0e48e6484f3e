//! The coupled linear step on a manufactured solution, with the effective
//! transport identity evaluated at the computed state.

use std::path::Path;

use nsf::diagnostics::trans_identity;
use nsf::manufactured::{channel_grid, linear_step_problem};
use nsf::picard::{FlowState, InnerSettings, LinearStepSolver};
use nsf::run::Prepared;

fn main() -> nsf::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/small_data.toml");
    let coef = Prepared::load(&path)?.coefficients();
    println!("gamma = {:.4}", coef.gamma());
    for n in [16, 32, 64] {
        let g = channel_grid(n)?;
        let (data, exact) = linear_step_problem(&g, &coef);
        let solver = LinearStepSolver::new(&g, coef, InnerSettings::default())?;
        let (sol, report) = solver.solve(&data, &FlowState::zeros(&g))?;
        let identity = trans_identity(&solver, &data, &sol)?;
        println!(
            "n = {n:>3}: {} sweeps, errors u {:.2e} sigma {:.2e} eta {:.2e}, identity residual {:.2e}",
            report.sweeps,
            sol.u.sub(&exact.u).max_abs(),
            sol.sigma.sub(&exact.sigma).max_abs(),
            sol.eta.sub(&exact.eta).max_abs(),
            identity.l2
        );
    }
    Ok(())
}
