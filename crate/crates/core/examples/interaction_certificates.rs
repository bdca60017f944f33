//! Check the same-family interaction inequalities on a coarse grid.

use phasefront::analysis::{threshold_asymptotic_gap, threshold_x0, verify_interaction_inequalities, CertificateGrid};

fn main() {
    let grid = CertificateGrid { sweep_samples: 500, reflected_samples: 10_000, ..Default::default() };
    let report = verify_interaction_inequalities(&grid);
    for c in &report.checks {
        println!("{:<28} {:>8} nodes  worst margin {:+.3e}  {}", c.name, c.nodes, c.worst_margin, if c.passed { "ok" } else { "FAILED" });
    }
    for z in [5.0, 10.0, 20.0] {
        println!("x_o({z}) = {:.6}, 2z - q(z) = {:.6}", threshold_x0(z), 2.0 * z - threshold_asymptotic_gap(z));
    }
    println!("all passed: {}", report.passed);
}
