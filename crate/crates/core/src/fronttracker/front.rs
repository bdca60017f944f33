use serde::{Deserialize, Serialize};

use crate::functionals::{FrontKind, WaveSummary};
use crate::model::State;

/// A moving discontinuity of the approximate solution.
///
/// The position is stored as a reference point `(x_ref, t_ref)` and a
/// constant speed, so no front needs updating between its own interactions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub kind: FrontKind,
    /// Signed strength; for non-physical fronts `|u_r − u_ℓ|`.
    pub strength: f64,
    pub order: u32,
    pub left: State,
    pub right: State,
    pub speed: f64,
    pub x_ref: f64,
    pub t_ref: f64,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.x_ref + self.speed * (t - self.t_ref)
    }

    pub fn summary(&self) -> WaveSummary {
        WaveSummary { kind: self.kind, strength: self.strength, order: self.order }
    }

    pub fn is_rarefaction(&self) -> bool {
        self.kind.is_genuinely_nonlinear() && self.strength > 0.0
    }
}

/// An outgoing wave before it is placed: kind, strength, order and side states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontSpec {
    pub kind: FrontKind,
    pub strength: f64,
    pub order: u32,
    pub left: State,
    pub right: State,
}

impl FrontSpec {
    pub fn summary(&self) -> WaveSummary {
        WaveSummary { kind: self.kind, strength: self.strength, order: self.order }
    }
}
