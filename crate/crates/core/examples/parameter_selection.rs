//! Check the smallness hypotheses for some data and list the constants chosen for a run.

use phasefront::functionals::{check_hypotheses, select_parameters, DataSummary};
use phasefront::{PressureModel, State};

fn main() -> phasefront::Result<()> {
    let model = PressureModel::affine(1.0, 4.0)?;
    let states = [State::new(1.0, 0.0, 0.3)?, State::new(1.1, -0.05, 0.35)?, State::new(1.05, 0.0, 0.3)?];
    let summary = DataSummary::from_states(&model, &states);
    for m in [0.25, 1.0, 2.0] {
        let h = check_hypotheses(&summary, m);
        println!("m = {m}: feasible {}, variation slack {:+.4}, coefficient slack {:+.4}", h.feasible, h.variation_slack, h.coefficient_slack);
    }
    let p = select_parameters(1.0, summary.wtv_a, 0.1, model.a_max())?;
    println!("{}", serde_json::to_string_pretty(&p).expect("parameters serialize"));
    for (name, holds) in p.constraints() {
        println!("{name}: {holds}");
    }
    Ok(())
}
