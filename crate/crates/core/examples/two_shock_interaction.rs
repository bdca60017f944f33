//! Two 3-shocks of one family merge; the reflected 1-wave is damped by d(m).

use phasefront::config::RunConfig;
use phasefront::fronttracker::run;
use phasefront::functionals::InteractionClass;
use phasefront::output::encode_waves;

fn main() -> phasefront::Result<()> {
    let cfg = RunConfig::bundled("two_shock").expect("bundled fixture");
    let model = cfg.model()?;
    let tr = run(&model, &cfg.profile(&model)?, &cfg.setup())?;
    let d = tr.params.d;
    for e in &tr.outcome.events {
        println!("t = {:.4}, x = {:.4}", e.t, e.x);
        println!("  incoming {}", encode_waves(&e.incoming));
        println!("  outgoing {}", encode_waves(&e.outgoing));
        if let InteractionClass::SameFamily { reflected, .. } = e.class {
            let smaller = e.incoming.iter().map(|w| w.strength.abs()).fold(f64::INFINITY, f64::min);
            println!("  |reflected| = {:.3e} <= d(m) min(|alpha|, |beta|) = {:.3e}", reflected.abs(), d * smaller);
        }
    }
    Ok(())
}
