//! Run configuration in TOML and the built-in initial profiles.
//!
//! ```toml
//! [model]
//! k0 = 1.0
//! k1 = 4.0
//!
//! [initial]
//! kind = "riemann"
//! left = [1.0, 0.0, 0.3]   # [v, u, lambda]
//! right = [1.2, 0.1, 0.5]
//!
//! [run]
//! m = 1.0
//! nu = 4
//! t_end = 2.0
//! snapshots = [0.5, 1.0, 2.0]
//!
//! [overrides]
//! xi = 1.3
//!
//! [output]
//! dir = "out"
//! k_max = 8
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{damping_coefficient, k_from_d, DEFAULT_DAMPING_RESOLUTION};
use crate::error::{Error, Result};
use crate::fronttracker::{ProfileFn, RawProfile, RunSetup};
use crate::functionals::{check_hypotheses, tv, wtv, DataSummary, WeightOverrides};
use crate::model::{Family, PressureModel, State};

/// Coefficient law: affine `a²` or a monotone table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Affine { k0: f64, k1: f64 },
    Table { lam: Vec<f64>, a: Vec<f64> },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Affine { k0: 1.0, k1: 4.0 }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<PressureModel> {
        match self {
            ModelSpec::Affine { k0, k1 } => PressureModel::affine(*k0, *k1),
            ModelSpec::Table { lam, a } => PressureModel::table(lam.clone(), a.clone()),
        }
    }
}

fn state(s: [f64; 3]) -> Result<State> {
    State::new(s[0], s[1], s[2])
}

fn default_base() -> [f64; 3] {
    [1.0, 0.0, 0.3]
}
fn default_half_width() -> f64 {
    2.0
}
fn default_fraction() -> f64 {
    0.5
}

/// Initial data. States are written `[v, u, lambda]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    Constant {
        state: [f64; 3],
    },
    Riemann {
        left: [f64; 3],
        right: [f64; 3],
        #[serde(default)]
        x0: f64,
    },
    /// Two waves of one family: `left`, then strength `strengths[i]` at `positions[i]`.
    TwoShock {
        left: [f64; 3],
        family: u8,
        strengths: [f64; 2],
        positions: [f64; 2],
    },
    Piecewise {
        breaks: Vec<f64>,
        states: Vec<[f64; 3]>,
    },
    /// Random piecewise-constant data scaled to use the given fractions of
    /// the variation and coefficient budgets. The seed defaults to the run seed.
    RandomBv {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        pieces: usize,
        #[serde(default = "default_half_width")]
        half_width: f64,
        #[serde(default = "default_base")]
        base: [f64; 3],
        #[serde(default = "default_fraction")]
        variation_fraction: f64,
        #[serde(default = "default_fraction")]
        coefficient_fraction: f64,
    },
    /// Mass-fraction step from `base[2]` to `lam_right` at 0 over a smooth
    /// Gaussian bump in `v`.
    PhaseJump {
        #[serde(default = "default_base")]
        base: [f64; 3],
        lam_right: f64,
        bump_amplitude: f64,
        bump_width: f64,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    /// Constant mass fraction with one period of a smooth oscillation in
    /// `log v` and `u`.
    SinglePhase {
        #[serde(default = "default_base")]
        base: [f64; 3],
        log_v_amplitude: f64,
        u_amplitude: f64,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
}

impl InitialSpec {
    /// Build the profile. `seed` is used by random data without their own seed.
    pub fn build(&self, model: &PressureModel, m: f64, seed: u64) -> Result<RawProfile> {
        let raw = match self {
            InitialSpec::Constant { state: s } => RawProfile::constant(state(*s)?),
            InitialSpec::Riemann { left, right, x0 } => RawProfile::riemann(state(*left)?, state(*right)?, *x0),
            InitialSpec::TwoShock { left, family, strengths, positions } => {
                let fam = Family::from_index(*family)
                    .filter(|f| *f != Family::Two)
                    .ok_or_else(|| Error::Config(format!("two_shock family must be 1 or 3, got {family}")))?;
                let l = state(*left)?;
                let mid = model.wave_end_state(fam, strengths[0], &l);
                let r = model.wave_end_state(fam, strengths[1], &mid);
                RawProfile::PiecewiseConstant { breaks: positions.to_vec(), states: vec![l, mid, r] }
            }
            InitialSpec::Piecewise { breaks, states } => RawProfile::PiecewiseConstant {
                breaks: breaks.clone(),
                states: states.iter().map(|s| state(*s)).collect::<Result<_>>()?,
            },
            InitialSpec::RandomBv { seed: own, pieces, half_width, base, variation_fraction, coefficient_fraction } => {
                random_bv(model, m, own.unwrap_or(seed), *pieces, *half_width, state(*base)?, *variation_fraction, *coefficient_fraction)?
            }
            InitialSpec::PhaseJump { base, lam_right, bump_amplitude, bump_width, half_width } => {
                let b = state(*base)?;
                let (lr, amp, w) = (*lam_right, *bump_amplitude, *bump_width);
                let f: ProfileFn = Arc::new(move |x: f64| State {
                    v: b.v * (1.0 + amp * (-(x / w).powi(2)).exp()),
                    u: b.u,
                    lam: if x < 0.0 { b.lam } else { lr },
                });
                RawProfile::Sampled { lo: -half_width, hi: *half_width, f }
            }
            InitialSpec::SinglePhase { base, log_v_amplitude, u_amplitude, half_width } => {
                let b = state(*base)?;
                let (av, au, w) = (*log_v_amplitude, *u_amplitude, *half_width);
                let f: ProfileFn = Arc::new(move |x: f64| {
                    let th = std::f64::consts::PI * (x / w + 1.0);
                    State { v: b.v * (av * th.sin()).exp(), u: b.u + au * (1.0 - th.cos()), lam: b.lam }
                });
                RawProfile::Sampled { lo: -half_width, hi: *half_width, f }
            }
        };
        raw.validate()?;
        Ok(raw)
    }
}

fn scaled_walk(start: f64, steps: &[f64], s: f64, clamp: Option<(f64, f64)>) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps.len() + 1);
    let mut x = start;
    out.push(x);
    for d in steps {
        x += s * d;
        if let Some((lo, hi)) = clamp {
            x = x.clamp(lo, hi);
        }
        out.push(x);
    }
    out
}

/// Largest `s ∈ [0, 1]` with `g(s) ≤ target`, assuming `g(0) ≤ target`.
fn largest_scale(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    if g(1.0) <= target {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[allow(clippy::too_many_arguments)]
fn random_bv(
    model: &PressureModel,
    m: f64,
    seed: u64,
    pieces: usize,
    half_width: f64,
    base: State,
    variation_fraction: f64,
    coefficient_fraction: f64,
) -> Result<RawProfile> {
    if pieces == 0 || !(half_width > 0.0) || !(0.0..1.0).contains(&variation_fraction) || !(0.0..1.0).contains(&coefficient_fraction) {
        return Err(Error::Config("random_bv needs pieces ≥ 1, half_width > 0 and fractions in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut breaks: Vec<f64> = (0..pieces).map(|_| rng.gen_range(-half_width..half_width)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let n = breaks.len();
    let lam_steps: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
    let logv_steps: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u_steps: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

    let k = k_from_d(damping_coefficient(m, DEFAULT_DAMPING_RESOLUTION));
    let a_of = |lams: &[f64]| -> Vec<f64> { lams.iter().map(|&l| model.a(l)).collect() };
    let a_target = coefficient_fraction * k;
    let s_lam = largest_scale(|s| wtv(&a_of(&scaled_walk(base.lam, &lam_steps, s, Some((0.0, 1.0))))).unwrap_or(f64::INFINITY), a_target);
    let lams = scaled_walk(base.lam, &lam_steps, s_lam, Some((0.0, 1.0)));
    let a = a_of(&lams);
    let a_o = wtv(&a)?;
    let inf_a = a.iter().copied().fold(f64::INFINITY, f64::min);
    let log_a2: Vec<f64> = a.iter().map(|x| 2.0 * x.ln()).collect();

    let budget = 2.0 * (1.0 - 2.0 * a_o) * m;
    let lhs = |s: f64| {
        let logv = scaled_walk(base.v.ln(), &logv_steps, s, None);
        let log_p: Vec<f64> = logv.iter().zip(&log_a2).map(|(lv, la)| la - lv).collect();
        tv(&log_p) + tv(&scaled_walk(base.u, &u_steps, s, None)) / inf_a
    };
    let target = variation_fraction * budget;
    if lhs(0.0) > target {
        return Err(Error::Infeasible(format!("mass-fraction jumps alone use {:e} of the variation budget {target:e}", lhs(0.0))));
    }
    let s = largest_scale(lhs, target);
    let logv = scaled_walk(base.v.ln(), &logv_steps, s, None);
    let u = scaled_walk(base.u, &u_steps, s, None);
    let states: Vec<State> = (0..=n).map(|i| State { v: logv[i].exp(), u: u[i], lam: lams[i] }).collect();
    let verdict = check_hypotheses(&DataSummary::from_states(model, &states), m);
    if !verdict.feasible {
        return Err(Error::Infeasible(format!("generated data miss the hypotheses: {verdict:?}")));
    }
    Ok(RawProfile::PiecewiseConstant { breaks, states })
}

fn default_m() -> f64 {
    1.0
}
fn default_nu() -> u32 {
    1
}
fn default_t_end() -> f64 {
    1.0
}
fn default_max_events() -> usize {
    1_000_000
}
fn default_jitter() -> f64 {
    1e-10
}
fn default_k_max() -> usize {
    8
}
fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    #[serde(default = "default_m")]
    pub m: f64,
    #[serde(default = "default_nu")]
    pub nu: u32,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub use_measured_q: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub force: bool,
    #[serde(default = "default_max_events")]
    pub max_events: usize,
    #[serde(default = "default_jitter")]
    pub speed_jitter: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            m: default_m(),
            nu: default_nu(),
            t_end: default_t_end(),
            seed: 0,
            snapshots: Vec::new(),
            use_measured_q: false,
            force: false,
            max_events: default_max_events(),
            speed_jitter: default_jitter(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, rename = "K_np", skip_serializing_if = "Option::is_none")]
    pub k_np: Option<f64>,
}

impl Overrides {
    fn is_empty(&self) -> bool {
        *self == Overrides::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Number of per-order columns in the functional trace.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: None, k_max: default_k_max() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Overrides::is_empty")]
    pub overrides: Overrides,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.run;
        if !(r.m > 0.0) || r.nu == 0 || !(r.t_end >= 0.0) || !(r.speed_jitter >= 0.0) {
            return Err(Error::Config(format!("need m > 0, nu ≥ 1, t_end ≥ 0 and speed_jitter ≥ 0, got {r:?}")));
        }
        if r.snapshots.iter().any(|t| !(*t >= 0.0 && *t <= r.t_end)) {
            return Err(Error::Config(format!("snapshot times must lie in [0, {}]", r.t_end)));
        }
        self.model.build()?;
        Ok(())
    }

    pub fn model(&self) -> Result<PressureModel> {
        self.model.build()
    }

    pub fn profile(&self, model: &PressureModel) -> Result<RawProfile> {
        self.initial.build(model, self.run.m, self.run.seed)
    }

    pub fn setup(&self) -> RunSetup {
        let r = &self.run;
        RunSetup {
            m: r.m,
            nu: r.nu,
            t_end: r.t_end,
            seed: r.seed,
            snapshot_times: r.snapshots.clone(),
            eta: self.overrides.eta,
            rho: self.overrides.rho,
            weights: WeightOverrides { xi: self.overrides.xi, k: self.overrides.k, k_np: self.overrides.k_np },
            use_measured_q: r.use_measured_q,
            force: r.force,
            max_events: r.max_events,
            speed_jitter: r.speed_jitter,
            ..RunSetup::default()
        }
    }

    /// Bundled configuration by name: `constant`, `riemann`, `two_shock`,
    /// `phase_jump`, `single_phase` or `random_bv`.
    pub fn bundled(name: &str) -> Option<RunConfig> {
        let text = match name {
            "constant" => include_str!("../fixtures/constant.toml"),
            "riemann" => include_str!("../fixtures/riemann.toml"),
            "two_shock" => include_str!("../fixtures/two_shock.toml"),
            "phase_jump" => include_str!("../fixtures/phase_jump.toml"),
            "single_phase" => include_str!("../fixtures/single_phase.toml"),
            "random_bv" => include_str!("../fixtures/random_bv.toml"),
            _ => return None,
        };
        Some(Self::parse(text).expect("bundled config parses"))
    }

    pub const BUNDLED: [&'static str; 6] = ["constant", "riemann", "two_shock", "phase_jump", "single_phase", "random_bv"];
}
