//! Exact Riemann solver and wave-front tracking for the isothermal
//! liquid–vapor system
//!
//! ```text
//! v_t − u_x = 0,   u_t + p(v, λ)_x = 0,   λ_t = 0,   p = a²(λ)/v
//! ```
//!
//! in Lagrangian coordinates, together with the interaction functionals that
//! control the scheme and numeric certificates for the same-family
//! interaction estimates.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod fronttracker;
pub mod functionals;
pub mod model;
pub mod output;
pub mod riemann;
pub mod roots;

pub use error::{Error, Result};
pub use model::{Family, PressureModel, State, WaveStrengths};
pub use riemann::{RiemannFan, RiemannSolver};
