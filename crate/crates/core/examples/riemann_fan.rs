//! Solve one Riemann problem across a phase boundary and print the fan.

use phasefront::output::{describe_fan, write_fan};
use phasefront::{PressureModel, RiemannSolver, State};

fn main() -> phasefront::Result<()> {
    let model = PressureModel::affine(1.0, 4.0)?;
    let left = State::new(1.0, 0.2, 0.1)?;
    let right = State::new(0.8, -0.3, 0.9)?;
    let fan = RiemannSolver::default().solve(&model, &left, &right)?;
    print!("{}", describe_fan(&fan));
    let rebuilt = fan.reconstructed_right(&model);
    println!("reconstructed right state error: {:.2e}", (rebuilt.v - right.v).abs().max((rebuilt.u - right.u).abs()));
    write_fan(std::io::stdout().lock(), &fan)?;
    Ok(())
}
