//! Weighted total variation of sampled smooth functions converges to TV(log f),
//! while a two-valued function keeps a strict gap.

use phasefront::analysis::{wtv_jump_gap, wtv_refinement};
use phasefront::functionals::{tv, wtv};

fn main() -> phasefront::Result<()> {
    let r = wtv_refinement(|x: f64| 1.0 + 4.0 * x * x, 0.0, 1.0, 32, 5)?;
    for (n, w) in r.cells.iter().zip(&r.values) {
        println!("{n:>5} cells: WTV = {w:.12}");
    }
    println!("extrapolated {:.12}, TV(log f) = {:.12}", r.extrapolated, 5f64.ln());

    let (c, d) = (1.0, 3.0);
    let f = [c, d, c];
    let logs = f.map(f64::ln);
    println!("two-valued: TV(log f) = {:.6}, WTV = {:.6}, gap per jump = {:.6}", tv(&logs), wtv(&f)?, wtv_jump_gap(c, d));
    Ok(())
}
