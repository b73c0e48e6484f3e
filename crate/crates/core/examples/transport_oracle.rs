//! Upwind marching against the characteristic solution of the steady
//! transport equation, and the logistic trajectory check.

use nsf::manufactured::{channel_grid, fit_order, logistic_case, transport_case};

fn main() -> nsf::Result<()> {
    let (mut hs, mut errs) = (vec![], vec![]);
    for n in [16, 32, 64] {
        let g = channel_grid(n)?;
        let e = transport_case(&g)?;
        println!("n = {n:>3}: max |march - characteristics| = {e:.4e}");
        hs.push(g.h(0));
        errs.push(e);
    }
    println!("order {:.3}", fit_order(&hs, &errs));
    println!("logistic trajectories: max error {:.2e}", logistic_case(&channel_grid(32)?, 0.1)?);
    Ok(())
}
