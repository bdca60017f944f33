//! Wave-front tracking.
//!
//! The approximate solution is a finite list of fronts moving at constant
//! speeds. Collisions are processed one at a time in time order. Interactions
//! between 1- and 3-waves use the exact Riemann solver; a 1- or 3-wave hitting
//! a contact uses it only when the product of the two strengths is at least
//! `ρ`, and otherwise transmits the wave unchanged and records the error in a
//! non-physical front travelling at speed `ŝ`. Every event is audited against
//! the interaction estimates and the functionals.

mod front;
mod initial;
mod queue;
mod resolve;
mod run;
mod sim;

pub use front::{Front, FrontSpec};
pub use initial::{approximate_initial_data, InitialData, ProfileFn, RawProfile};
pub use queue::{EventQueue, FrontId, FrontList, Pending, TimeKey};
pub use resolve::{balance_residuals, fan_to_specs, resolve_pair, Resolution, ResolveContext, SolverUsed, TOL_IDENTITY};
pub use run::{run, DEFAULT_ETA, BudgetInfo, InitialInfo, ParameterProvenance, RunSetup, Trajectory};
pub use sim::{Collision, EventRecord, SchemeConfig, SimOutcome, SimStats, Simulation, Snapshot, TraceRow, COLLISION_WINDOW};
