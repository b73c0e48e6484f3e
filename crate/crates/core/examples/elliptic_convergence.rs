//! Fitted convergence orders of the Neumann, Robin and slip Lamé solvers.

use nsf::elliptic::LameParams;
use nsf::manufactured::{channel_grid, fit_order, lame_case, neumann_case, robin_case};

fn main() -> nsf::Result<()> {
    let (mut hs, mut neu, mut rob, mut lame) = (vec![], vec![], vec![], vec![]);
    println!("{:>4} {:>12} {:>12} {:>12}", "n", "neumann", "robin", "lame");
    for n in [16, 32, 64] {
        let g = channel_grid(n)?;
        hs.push(g.h(0));
        neu.push(neumann_case(&g)?);
        rob.push(robin_case(&g, 2.5, 50.0, 50.0)?);
        lame.push(lame_case(&g, &LameParams::uniform(&g, 1.0, 0.0, 0.0, 10.0))?);
        println!("{n:>4} {:>12.4e} {:>12.4e} {:>12.4e}", neu.last().unwrap(), rob.last().unwrap(), lame.last().unwrap());
    }
    println!("orders: {:.3} {:.3} {:.3}", fit_order(&hs, &neu), fit_order(&hs, &rob), fit_order(&hs, &lame));
    Ok(())
}
