//! Tabulate the damping coefficient d(m) next to c(m) and k(m).

use phasefront::analysis::{DampingCurve, DEFAULT_DAMPING_RESOLUTION};

fn main() {
    let curve = DampingCurve::uniform(5.0, 10, DEFAULT_DAMPING_RESOLUTION);
    println!("{:>6} {:>10} {:>10} {:>10}", "m", "d", "c", "k");
    for i in 0..curve.m.len() {
        println!("{:>6.2} {:>10.6} {:>10.6} {:>10.6}", curve.m[i], curve.d[i], curve.c[i], curve.k[i]);
    }
}
