//! End-to-end driver: hypotheses, parameter selection, non-physical budget
//! and the simulation itself.

use serde::{Deserialize, Serialize};

use super::initial::{approximate_initial_data, RawProfile};
use super::sim::{SchemeConfig, SimOutcome, Simulation};
use crate::error::{Error, Result};
use crate::functionals::{
    check_hypotheses, choose_np_budget, compute_snapshot, select_parameters_with, DataSummary, HypothesisVerdict, ParameterSet,
    Provenance, SelectionOptions, WaveSummary, WeightOverrides, tv,
};
use crate::model::{PressureModel, State};

/// Rarefaction cap at `ν = 1`; the default cap is `DEFAULT_ETA / ν`.
pub const DEFAULT_ETA: f64 = 0.05;

/// User-facing knobs of one run. `None` fields are auto-selected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSetup {
    pub m: f64,
    pub nu: u32,
    pub t_end: f64,
    pub seed: u64,
    pub snapshot_times: Vec<f64>,
    pub eta: Option<f64>,
    pub rho: Option<f64>,
    pub weights: WeightOverrides,
    pub use_measured_q: bool,
    /// Run even when the smallness hypotheses fail.
    pub force: bool,
    pub max_events: usize,
    pub speed_jitter: f64,
    /// Reruns allowed while tightening `ρ` for the non-physical budget.
    pub max_budget_rounds: usize,
}

impl Default for RunSetup {
    fn default() -> Self {
        RunSetup {
            m: 1.0,
            nu: 1,
            t_end: 1.0,
            seed: 0,
            snapshot_times: Vec::new(),
            eta: None,
            rho: None,
            weights: WeightOverrides::default(),
            use_measured_q: false,
            force: false,
            max_events: 1_000_000,
            speed_jitter: 1e-10,
            max_budget_rounds: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterProvenance {
    pub xi: Provenance,
    #[serde(rename = "K")]
    pub k: Provenance,
    #[serde(rename = "K_np")]
    pub k_np: Provenance,
    pub eta: Provenance,
    pub rho: Provenance,
    pub s_hat: Provenance,
}

/// Quantities of the approximated initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialInfo {
    pub l0: f64,
    pub q0: f64,
    pub l_xi0: f64,
    pub f0: f64,
    pub l_cd0: f64,
    pub fronts: usize,
    pub cells: usize,
    pub l1_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetInfo {
    pub k_cut: u32,
    pub front_bound: f64,
    pub rounds: usize,
    pub np_low_order: usize,
    pub np_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: ParameterSet,
    pub scheme: SchemeConfig,
    pub provenance: ParameterProvenance,
    pub summary: DataSummary,
    pub hypotheses: HypothesisVerdict,
    pub initial: InitialInfo,
    pub budget: BudgetInfo,
    pub outcome: SimOutcome,
}

fn provenance(v: Option<f64>) -> Provenance {
    if v.is_some() { Provenance::Override } else { Provenance::Auto }
}

/// `ŝ = 2 a(1)/v_min`, where `v_min` bounds `v` from below for the whole run:
/// each 1/3-wave changes `log v` by twice its strength (and their total stays
/// below `m`), each contact by `2 log(a_r/a_ℓ)` (contacts never change).
fn s_hat_for(model: &PressureModel, states: &[State], m: f64) -> f64 {
    let log_a: Vec<f64> = states.iter().map(|s| model.a(s.lam).ln()).collect();
    let v_min = states[0].v * (-2.0 * m - 2.0 * tv(&log_a)).exp();
    2.0 * model.a_max() / v_min
}

/// Approximate the data, check the hypotheses, pick all constants and run,
/// tightening `ρ` until the non-physical fronts fit in the `1/ν` budget.
pub fn run(model: &PressureModel, raw: &RawProfile, setup: &RunSetup) -> Result<Trajectory> {
    if setup.nu == 0 {
        return Err(Error::Config("ν must be at least 1".into()));
    }
    let summary = raw.summary(model);
    let hypotheses = check_hypotheses(&summary, setup.m);
    if !hypotheses.feasible && !setup.force {
        return Err(Error::Infeasible(format!(
            "initial data violate the smallness hypotheses for m = {} (variation slack {:e}, coefficient slack {:e})",
            setup.m, hypotheses.variation_slack, hypotheses.coefficient_slack
        )));
    }
    let eta = setup.eta.unwrap_or(DEFAULT_ETA / setup.nu as f64);
    let data = approximate_initial_data(model, raw, setup.nu, eta)?;
    let waves: Vec<WaveSummary> = data.fronts.iter().map(|(_, f)| f.summary()).collect();

    let probe = ParameterSet {
        m: setup.m,
        a_o: 0.0,
        d: 0.0,
        c: 0.0,
        k_of_m: 0.5,
        xi: 1.0,
        k: 1.0,
        k_np: 1.0,
        c_o: 1.0,
        mu: 0.5,
        contraction_interaction: 0.0,
        contraction_twowave: 0.0,
    };
    let raw_snap = compute_snapshot(waves.iter().copied(), &probe);
    let (l0, q0) = (raw_snap.l, raw_snap.q);
    let opts = SelectionOptions { overrides: setup.weights, use_measured_q: setup.use_measured_q, q0, ..Default::default() };
    let params = select_parameters_with(setup.m, summary.wtv_a, l0, model.a_max(), &opts)?;
    let snap0 = compute_snapshot(waves.iter().copied(), &params);
    let initial = InitialInfo {
        l0,
        q0,
        l_xi0: snap0.l_xi,
        f0: snap0.f,
        l_cd0: snap0.l_cd,
        fronts: waves.len(),
        cells: data.cells,
        l1_error: data.l1_error,
    };

    let s_hat = s_hat_for(model, &data.states, setup.m);
    let mut snapshot_times = setup.snapshot_times.clone();
    if snapshot_times.is_empty() {
        snapshot_times.push(setup.t_end);
    }
    let mut front_bound = ((waves.len() + 1) * (waves.len() + 1)) as f64;
    let target = 1.0 / setup.nu as f64;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let (k_cut, auto_rho) = choose_np_budget(&params, snap0.l_xi, snap0.q, setup.nu, front_bound);
        let rho = setup.rho.unwrap_or(auto_rho);
        let scheme = SchemeConfig {
            eta,
            rho,
            s_hat,
            nu: setup.nu,
            speed_jitter: setup.speed_jitter,
            t_end: setup.t_end,
            seed: setup.seed,
            max_events: setup.max_events,
            snapshot_times: snapshot_times.clone(),
            measured_q_bound: setup.use_measured_q,
        };
        let outcome = Simulation::new(model.clone(), params.clone(), scheme.clone(), &data)?.run()?;
        let np_low = outcome.stats.np_below_order(k_cut);
        let np_total = outcome.trace.last().map_or(0.0, |r| r.functionals.l_np);
        let within = np_low as f64 <= front_bound;
        if within || setup.rho.is_some() || rounds >= setup.max_budget_rounds {
            if setup.rho.is_none() && np_total > target {
                return Err(Error::Audit(format!("non-physical total {np_total:e} exceeds 1/ν = {target:e} after {rounds} rounds")));
            }
            return Ok(Trajectory {
                params,
                scheme,
                provenance: ParameterProvenance {
                    xi: provenance(setup.weights.xi),
                    k: provenance(setup.weights.k),
                    k_np: provenance(setup.weights.k_np),
                    eta: provenance(setup.eta),
                    rho: provenance(setup.rho),
                    s_hat: Provenance::Auto,
                },
                summary,
                hypotheses,
                initial,
                budget: BudgetInfo { k_cut, front_bound, rounds, np_low_order: np_low, np_total },
                outcome,
            });
        }
        front_bound = 2.0 * np_low as f64;
    }
}
