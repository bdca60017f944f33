//! Piecewise-constant approximation of the initial data.

use std::fmt;
use std::sync::Arc;

use super::front::FrontSpec;
use super::resolve::fan_to_specs;
use crate::error::{Error, Result};
use crate::functionals::DataSummary;
use crate::model::{PressureModel, State};
use crate::riemann::RiemannSolver;

/// Samples per cell used for the L¹ estimate.
const L1_SUBSAMPLES: usize = 8;
/// Points used to summarise the variation of a sampled profile.
const SUMMARY_POINTS: usize = 20_001;
const MAX_CELLS: usize = 1 << 20;

pub type ProfileFn = Arc<dyn Fn(f64) -> State + Send + Sync>;

/// Initial data before approximation.
#[derive(Clone)]
pub enum RawProfile {
    /// `states[0]` on `(−∞, breaks[0])`, `states[i]` on `(breaks[i−1], breaks[i])`,
    /// `states[n]` on `(breaks[n−1], ∞)`.
    PiecewiseConstant { breaks: Vec<f64>, states: Vec<State> },
    /// `f(x)` on `[lo, hi]`, extended by `f(lo)` and `f(hi)` outside.
    Sampled { lo: f64, hi: f64, f: ProfileFn },
}

impl fmt::Debug for RawProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawProfile::PiecewiseConstant { breaks, states } => {
                f.debug_struct("PiecewiseConstant").field("breaks", breaks).field("states", states).finish()
            }
            RawProfile::Sampled { lo, hi, .. } => f.debug_struct("Sampled").field("lo", lo).field("hi", hi).finish_non_exhaustive(),
        }
    }
}

impl RawProfile {
    pub fn constant(s: State) -> Self {
        RawProfile::PiecewiseConstant { breaks: Vec::new(), states: vec![s] }
    }

    pub fn riemann(left: State, right: State, x0: f64) -> Self {
        RawProfile::PiecewiseConstant { breaks: vec![x0], states: vec![left, right] }
    }

    pub fn value(&self, x: f64) -> State {
        match self {
            RawProfile::PiecewiseConstant { breaks, states } => states[breaks.partition_point(|&b| b <= x)],
            RawProfile::Sampled { lo, hi, f } => f(x.clamp(*lo, *hi)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RawProfile::PiecewiseConstant { breaks, states } => {
                if states.len() != breaks.len() + 1 {
                    return Err(Error::Config(format!("{} breakpoints need {} states, got {}", breaks.len(), breaks.len() + 1, states.len())));
                }
                if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
                    return Err(Error::Config("breakpoints must be finite and strictly increasing".into()));
                }
                states.iter().try_for_each(State::validate)
            }
            RawProfile::Sampled { lo, hi, .. } => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::Config(format!("sampling interval [{lo}, {hi}] is empty")));
                }
                let n = 1024;
                (0..=n).try_for_each(|i| self.value(lo + (hi - lo) * i as f64 / n as f64).validate())
            }
        }
    }

    /// Variation data used by the smallness hypotheses. Sampled profiles are
    /// summarised on a fine uniform grid.
    pub fn summary(&self, model: &PressureModel) -> DataSummary {
        match self {
            RawProfile::PiecewiseConstant { states, .. } => DataSummary::from_states(model, states),
            RawProfile::Sampled { lo, hi, .. } => {
                let n = SUMMARY_POINTS - 1;
                let states: Vec<State> = (0..=n).map(|i| self.value(lo + (hi - lo) * i as f64 / n as f64)).collect();
                DataSummary::from_states(model, &states)
            }
        }
    }
}

/// The approximated data: breakpoints, cell states and the fronts solving
/// each initial jump.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub breaks: Vec<f64>,
    pub states: Vec<State>,
    /// `(position, front)` pairs in increasing position.
    pub fronts: Vec<(f64, FrontSpec)>,
    /// Estimated `∫ |v − v_ν| + |u − u_ν| + |λ − λ_ν| dx`.
    pub l1_error: f64,
    pub cells: usize,
}

impl InitialData {
    pub fn left_state(&self) -> State {
        self.states[0]
    }
}

fn l1_gap(a: &State, b: &State) -> f64 {
    (a.v - b.v).abs() + (a.u - b.u).abs() + (a.lam - b.lam).abs()
}

fn sample_cells(raw: &RawProfile, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<State>, f64) {
    let h = (hi - lo) / n as f64;
    let mut breaks = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 2);
    states.push(raw.value(lo));
    let mut err = 0.0;
    for j in 0..n {
        let x0 = lo + h * j as f64;
        breaks.push(x0);
        let s = raw.value(x0 + 0.5 * h);
        let mut e = 0.0;
        for q in 0..L1_SUBSAMPLES {
            e += l1_gap(&raw.value(x0 + h * (q as f64 + 0.5) / L1_SUBSAMPLES as f64), &s);
        }
        err += h * e / L1_SUBSAMPLES as f64;
        states.push(s);
    }
    breaks.push(hi);
    states.push(raw.value(hi));
    (breaks, states, err)
}

/// Point-sample `raw` on uniform cells (refined until the L¹ estimate is at
/// most `1/ν`), drop zero jumps, and solve every remaining jump. Rarefactions
/// are split into fronts of strength below `eta`.
pub fn approximate_initial_data(model: &PressureModel, raw: &RawProfile, nu: u32, eta: f64) -> Result<InitialData> {
    raw.validate()?;
    if nu == 0 || !(eta > 0.0) {
        return Err(Error::Config(format!("need ν ≥ 1 and η > 0, got ν={nu}, η={eta}")));
    }
    let target = 1.0 / nu as f64;
    let (breaks, states, l1_error, cells) = match raw {
        RawProfile::PiecewiseConstant { breaks, states } => (breaks.clone(), states.clone(), 0.0, states.len()),
        RawProfile::Sampled { lo, hi, .. } => {
            let mut n = 16 * nu as usize;
            loop {
                let (b, s, err) = sample_cells(raw, *lo, *hi, n);
                if err <= target {
                    break (b, s, err, n);
                }
                if n >= MAX_CELLS {
                    return Err(Error::Infeasible(format!("L¹ error {err:e} above 1/ν after {n} cells")));
                }
                n *= 2;
            }
        }
    };

    // merge equal neighbours
    let mut kept_b = Vec::with_capacity(breaks.len());
    let mut kept_s = vec![states[0]];
    for (i, b) in breaks.iter().enumerate() {
        if states[i + 1] != *kept_s.last().unwrap() {
            kept_b.push(*b);
            kept_s.push(states[i + 1]);
        }
    }

    let solver = RiemannSolver::default();
    let mut fronts = Vec::new();
    for (i, &x) in kept_b.iter().enumerate() {
        let fan = solver.solve(model, &kept_s[i], &kept_s[i + 1])?;
        for spec in fan_to_specs(model, &fan, &kept_s[i + 1], [1, 1], [Some(eta), Some(eta)]) {
            fronts.push((x, spec));
        }
    }
    Ok(InitialData { breaks: kept_b, states: kept_s, fronts, l1_error, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::FrontKind;
    use crate::model::Family;

    fn model() -> PressureModel {
        PressureModel::affine(1.0, 4.0).unwrap()
    }

    #[test]
    fn constant_profile_has_no_fronts() {
        let d = approximate_initial_data(&model(), &RawProfile::constant(State { v: 1.0, u: 0.0, lam: 0.5 }), 4, 0.1).unwrap();
        assert!(d.fronts.is_empty());
    }

    #[test]
    fn lambda_jump_is_one_contact() {
        let m = model();
        let l = State { v: 1.0, u: 0.2, lam: 0.1 };
        let r = m.curve_phi2(0.7, &l);
        let d = approximate_initial_data(&m, &RawProfile::riemann(l, r, 0.0), 1, 0.1).unwrap();
        assert_eq!(d.fronts.len(), 1);
        assert_eq!(d.fronts[0].1.kind, FrontKind::Two);
    }

    #[test]
    fn rarefaction_is_split() {
        let m = model();
        let l = State { v: 1.0, u: 0.0, lam: 0.3 };
        let r = m.wave_end_state(Family::Three, 0.25, &l);
        let d = approximate_initial_data(&m, &RawProfile::riemann(l, r, 0.0), 1, 0.1).unwrap();
        assert_eq!(d.fronts.len(), 3);
        for (_, f) in &d.fronts {
            assert_eq!(f.kind, FrontKind::Three);
            assert!((f.strength - 0.25 / 3.0).abs() < 1e-12);
        }
        assert_eq!(d.fronts[2].1.right, r);
    }

    #[test]
    fn sampled_profile_meets_l1_target() {
        let m = model();
        let f: ProfileFn = Arc::new(|x: f64| State { v: 1.0 + 0.2 * (std::f64::consts::PI * x).sin().powi(2), u: 0.1 * x, lam: 0.4 });
        let raw = RawProfile::Sampled { lo: 0.0, hi: 1.0, f };
        for nu in [1, 4, 16] {
            let d = approximate_initial_data(&m, &raw, nu, 0.2 / nu as f64).unwrap();
            assert!(d.l1_error <= 1.0 / nu as f64);
            assert_eq!(d.states[0], raw.value(-5.0));
            let full = raw.summary(&m);
            let approx = DataSummary::from_states(&m, &d.states);
            assert!(approx.tv_u <= full.tv_u + 1e-12);
            assert!(approx.tv_log_p <= full.tv_log_p + 1e-12);
        }
    }
}
