//! Exact Riemann solver.
//!
//! For left and right states the fan consists of a 1-wave, a stationary
//! contact and a 3-wave. Writing `D = ½ log(p_r/p_ℓ)`, the strengths satisfy
//!
//! ```text
//! ε3 − ε1 = D,    2 (a_ℓ h(ε1) + a_r h(ε3)) = u_r − u_ℓ
//! ```
//!
//! Substituting the first relation into the second leaves one scalar
//! equation in `ε1` whose left-hand side has derivative at least
//! `2 (a_ℓ + a_r)`, which gives both uniqueness and an explicit bracket
//! around any initial guess.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{h, h_prime, Family, PressureModel, State, WaveStrengths};
use crate::roots::{newton_bisect, RootOptions};

/// Strengths below this magnitude do not produce a front.
pub const ZERO_STRENGTH: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WaveSpeed {
    /// Rankine–Hugoniot speed.
    Shock(f64),
    /// Characteristic speeds at the tail (left) and head (right) of the fan.
    Rarefaction { tail: f64, head: f64 },
    Contact,
    /// Zero-strength wave.
    Absent,
}

/// Solution of one Riemann problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannFan {
    pub left: State,
    pub mid1: State,
    pub mid2: State,
    pub right: State,
    pub strengths: WaveStrengths,
    pub speeds: [WaveSpeed; 3],
    /// Residuals of the two defining relations, in order.
    pub residuals: [f64; 2],
}

impl RiemannFan {
    /// The right state recomputed from `left` and the strengths.
    pub fn reconstructed_right(&self, model: &PressureModel) -> State {
        model.wave_end_state(Family::Three, self.strengths.eps3, &self.mid2)
    }

    pub fn is_trivial(&self) -> bool {
        let s = self.strengths;
        s.eps1.abs() < ZERO_STRENGTH && s.eps2.abs() < ZERO_STRENGTH && s.eps3.abs() < ZERO_STRENGTH
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RiemannSolver {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RiemannSolver {
    fn default() -> Self {
        RiemannSolver { tol: 1e-12, max_iter: 200 }
    }
}

impl RiemannSolver {
    pub fn with_tol(tol: f64) -> Self {
        RiemannSolver { tol, ..Default::default() }
    }

    pub fn solve(&self, model: &PressureModel, left: &State, right: &State) -> Result<RiemannFan> {
        left.validate()?;
        right.validate()?;
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        let (al, ar) = (model.a(left.lam), model.a(right.lam));
        let dlogp = 0.5 * (model.pressure_of(right) / model.pressure_of(left)).ln();
        let du = right.u - left.u;

        let g = |e1: f64| {
            let e3 = e1 + dlogp;
            (2.0 * (al * h(e1) + ar * h(e3)) - du, 2.0 * (al * h_prime(e1) + ar * h_prime(e3)))
        };
        // linearized guess; the residual slope is at least 2 (a_l + a_r)
        let guess = (0.5 * du - ar * dlogp) / (al + ar);
        let (g0, _) = g(guess);
        let radius = g0.abs() / (2.0 * (al + ar));
        let pad = 1e-12 * (1.0 + guess.abs());
        let root = newton_bisect(
            g,
            guess - radius - pad,
            guess + radius + pad,
            RootOptions { f_tol: self.tol, x_tol: 1e-16, max_iter: self.max_iter },
        )?;
        let eps1 = root.x;
        let eps3 = eps1 + dlogp;
        let eps2 = model.contact_strength(left.lam, right.lam);
        let residuals = [(eps3 - eps1) - dlogp, 2.0 * (al * h(eps1) + ar * h(eps3)) - du];
        if residuals[1].abs() > self.tol.max(64.0 * f64::EPSILON * (1.0 + du.abs() + (al + ar) * eps1.abs().sinh())) {
            return Err(Error::NoConvergence { iterations: root.iterations, residual: residuals[1].abs() });
        }

        let mid1 = model.wave_end_state(Family::One, eps1, left);
        let mid2 = model.curve_phi2(right.lam, &mid1);
        let speeds = [
            fan_wave_speed(model, Family::One, eps1, left, &mid1),
            if eps2.abs() < ZERO_STRENGTH { WaveSpeed::Absent } else { WaveSpeed::Contact },
            fan_wave_speed(model, Family::Three, eps3, &mid2, right),
        ];
        Ok(RiemannFan {
            left: *left,
            mid1,
            mid2,
            right: *right,
            strengths: WaveStrengths { eps1, eps2, eps3 },
            speeds,
            residuals,
        })
    }
}

/// Solve with the default tolerance.
pub fn solve(model: &PressureModel, left: &State, right: &State) -> Result<RiemannFan> {
    RiemannSolver::default().solve(model, left, right)
}

fn fan_wave_speed(model: &PressureModel, family: Family, eps: f64, left: &State, right: &State) -> WaveSpeed {
    if eps.abs() < ZERO_STRENGTH {
        WaveSpeed::Absent
    } else if eps < 0.0 {
        WaveSpeed::Shock(shock_speed(model, family, left, right))
    } else {
        WaveSpeed::Rarefaction {
            tail: model.characteristic_speed(family, left),
            head: model.characteristic_speed(family, right),
        }
    }
}

/// Rankine–Hugoniot speed `∓ a(λ)/√(v_ℓ v_r)` of a 1- or 3-shock.
pub fn shock_speed(model: &PressureModel, family: Family, left: &State, right: &State) -> f64 {
    let s = model.a(left.lam) / (left.v * right.v).sqrt();
    match family {
        Family::One => -s,
        Family::Three => s,
        Family::Two => 0.0,
    }
}

/// Speed data of the `family`-wave joining `left` and `right`, after checking
/// that the two states lie on the corresponding curve.
pub fn wave_speed(model: &PressureModel, family: Family, left: &State, right: &State) -> Result<WaveSpeed> {
    let eps = model.strength_from_states(family, left, right)?;
    Ok(match family {
        Family::Two if eps.abs() < ZERO_STRENGTH => WaveSpeed::Absent,
        Family::Two => WaveSpeed::Contact,
        _ => fan_wave_speed(model, family, eps, left, right),
    })
}

/// Speed assigned to a single front in the tracking scheme: shocks travel at
/// their Rankine–Hugoniot speed, rarefaction fronts at the characteristic
/// speed of their right state, contacts stay put.
pub fn front_speed(model: &PressureModel, family: Family, strength: f64, left: &State, right: &State) -> f64 {
    match family {
        Family::Two => 0.0,
        _ if strength < 0.0 => shock_speed(model, family, left, right),
        _ => model.characteristic_speed(family, right),
    }
}

/// Split a rarefaction of strength `eps` into `⌊eps/η⌋ + 1` equal parts.
/// The parts add up to `eps` exactly in floating point.
pub fn split_rarefaction(eps: f64, eta: f64) -> Vec<f64> {
    assert!(eps > 0.0 && eta > 0.0, "split_rarefaction needs positive strength and cap");
    let n = (eps / eta).floor() as usize + 1;
    let part = eps / n as f64;
    let mut parts = vec![part; n];
    let head: f64 = parts[..n - 1].iter().fold(0.0, |acc, p| acc + p);
    parts[n - 1] = eps - head;
    parts
}

/// Right-hand side of the a-priori bound on `|ε1| + |ε3|` for the pair.
pub fn strength_bound(model: &PressureModel, left: &State, right: &State) -> f64 {
    let (al, ar) = (model.a(left.lam), model.a(right.lam));
    0.5 * (model.pressure_of(right).ln() - model.pressure_of(left).ln()).abs() + (right.u - left.u).abs() / (2.0 * al.min(ar))
}
