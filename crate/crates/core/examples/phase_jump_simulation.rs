//! Front tracking for a density bump crossing a phase interface, written as CSV.

use std::path::PathBuf;

use phasefront::config::RunConfig;
use phasefront::fronttracker::run;
use phasefront::output::write_run;

fn main() -> phasefront::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("phase_jump"));
    let cfg = RunConfig::bundled("phase_jump").expect("bundled fixture");
    let model = cfg.model()?;
    let tr = run(&model, &cfg.profile(&model)?, &cfg.setup())?;
    let s = &tr.outcome.stats;
    let last = tr.outcome.trace.last().map(|r| &r.functionals).unwrap_or(&tr.outcome.initial);
    println!("{} events ({} accurate, {} simplified), at most {} fronts", s.events, s.accurate, s.simplified, s.max_fronts);
    println!("F: {:.6} -> {:.6}, Q: {:.6} -> {:.6}", tr.outcome.initial.f, last.f, tr.outcome.initial.q, last.q);
    write_run(&out, &tr, cfg.output.k_max)?;
    println!("wrote {}", out.display());
    Ok(())
}
