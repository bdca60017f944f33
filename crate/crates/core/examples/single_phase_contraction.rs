//! With a constant mass fraction the generation-order variations contract geometrically.

use phasefront::config::RunConfig;
use phasefront::fronttracker::run;

fn main() -> phasefront::Result<()> {
    let cfg = RunConfig::bundled("single_phase").expect("bundled fixture");
    let model = cfg.model()?;
    let tr = run(&model, &cfg.profile(&model)?, &cfg.setup())?;
    let l_xi0 = tr.outcome.initial.l_xi;
    let xi = tr.params.xi;
    let mut peak = [0.0f64; 8];
    for row in &tr.outcome.trace {
        for (k, p) in peak.iter_mut().enumerate() {
            *p = p.max(row.functionals.tilde_v_of(k + 1));
        }
    }
    println!("{:>3} {:>12} {:>12}", "k", "max V~_k", "bound");
    for (k, p) in peak.iter().enumerate() {
        println!("{:>3} {:>12.4e} {:>12.4e}", k + 1, p, xi.powi(-(k as i32)) * l_xi0);
    }
    Ok(())
}
