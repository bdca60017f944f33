//! Variation measures, the interaction functionals and their per-order
//! ladders, parameter selection and interaction audits.

use serde::{Deserialize, Serialize};

use crate::analysis::{c_of_m, damping_coefficient, k_from_d, DEFAULT_DAMPING_RESOLUTION};
use crate::error::{Error, Result};
use crate::model::{Family, PressureModel, State};

/// Absolute tolerance on functional differences.
pub const TOL_AUDIT: f64 = 1e-9;

/// Total variation of a finite sequence.
pub fn tv(samples: &[f64]) -> f64 {
    samples.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Weighted total variation `2 Σ |f_j − f_{j−1}| / (f_j + f_{j−1})`.
pub fn wtv(samples: &[f64]) -> Result<f64> {
    if let Some(bad) = samples.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Domain(format!("weighted variation needs positive samples, got {bad}")));
    }
    Ok(samples.windows(2).map(|w| 2.0 * (w[1] - w[0]).abs() / (w[1] + w[0])).sum())
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Kind of a tracked front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontKind {
    One,
    Two,
    Three,
    NonPhysical,
}

impl FrontKind {
    pub fn family(self) -> Option<Family> {
        match self {
            FrontKind::One => Some(Family::One),
            FrontKind::Two => Some(Family::Two),
            FrontKind::Three => Some(Family::Three),
            FrontKind::NonPhysical => None,
        }
    }

    pub fn from_family(f: Family) -> FrontKind {
        match f {
            Family::One => FrontKind::One,
            Family::Two => FrontKind::Two,
            Family::Three => FrontKind::Three,
        }
    }

    pub fn is_genuinely_nonlinear(self) -> bool {
        matches!(self, FrontKind::One | FrontKind::Three)
    }

    pub fn label(self) -> &'static str {
        match self {
            FrontKind::One => "1",
            FrontKind::Two => "2",
            FrontKind::Three => "3",
            FrontKind::NonPhysical => "np",
        }
    }
}

/// The data of a front that the functionals depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSummary {
    pub kind: FrontKind,
    pub strength: f64,
    pub order: u32,
}

/// Variation data of an initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub tv_log_p: f64,
    pub tv_u: f64,
    pub inf_a: f64,
    pub wtv_a: f64,
}

impl DataSummary {
    /// Summary of the piecewise-constant profile taking the listed values.
    pub fn from_states(model: &PressureModel, states: &[State]) -> DataSummary {
        let log_p: Vec<f64> = states.iter().map(|s| model.pressure_of(s).ln()).collect();
        let u: Vec<f64> = states.iter().map(|s| s.u).collect();
        let a: Vec<f64> = states.iter().map(|s| model.a(s.lam)).collect();
        DataSummary {
            tv_log_p: tv(&log_p),
            tv_u: tv(&u),
            inf_a: a.iter().copied().fold(f64::INFINITY, f64::min),
            wtv_a: wtv(&a).expect("a is positive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub feasible: bool,
    /// `2(1 − 2 WTV(a_o)) m − (TV log p_o + TV u_o / inf a_o)`.
    pub variation_slack: f64,
    /// `k(m) − WTV(a_o)`.
    pub coefficient_slack: f64,
    pub d: f64,
    pub k_of_m: f64,
}

/// Smallness conditions on the initial data for the budget `m`.
pub fn check_hypotheses(summary: &DataSummary, m: f64) -> HypothesisVerdict {
    let d = damping_coefficient(m, DEFAULT_DAMPING_RESOLUTION);
    let k = k_from_d(d);
    let lhs = summary.tv_log_p + summary.tv_u / summary.inf_a;
    let variation_slack = 2.0 * (1.0 - 2.0 * summary.wtv_a) * m - lhs;
    let coefficient_slack = k - summary.wtv_a;
    HypothesisVerdict { feasible: variation_slack > 0.0 && coefficient_slack > 0.0, variation_slack, coefficient_slack, d, k_of_m: k }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Auto,
    Override,
    /// Computed from other constants.
    Derived,
}

/// Scheme constants and the derived contraction rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub m: f64,
    pub a_o: f64,
    pub d: f64,
    pub c: f64,
    pub k_of_m: f64,
    pub xi: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_np")]
    pub k_np: f64,
    #[serde(rename = "C_o")]
    pub c_o: f64,
    pub mu: f64,
    pub contraction_interaction: f64,
    pub contraction_twowave: f64,
}

impl ParameterSet {
    /// Every constraint the constants must satisfy, as `(name, holds)`.
    pub fn constraints(&self) -> Vec<(&'static str, bool)> {
        let a = self.a_o;
        let sd = self.d.sqrt();
        let mut out = vec![
            ("0 <= A_o < (1-sqrt d)/(2-sqrt d)", a >= 0.0 && a < (1.0 - sd) / (2.0 - sd)),
            ("xi > (1-A_o)/(1-2A_o)", self.xi > (1.0 - a) / (1.0 - 2.0 * a)),
            ("xi < 1/sqrt d", self.xi * sd < 1.0),
            ("K > xi/(1-A_o)", self.k > self.xi / (1.0 - a)),
            ("0 < K_np < K/C_o", self.k_np > 0.0 && self.k_np * self.c_o < self.k),
            ("0 < mu < 1", self.mu > 0.0 && self.mu < 1.0),
        ];
        if a > 0.0 {
            out.push(("K < (xi-1)/A_o", self.k * a < self.xi - 1.0));
        }
        out
    }

    fn with_rates(mut self) -> Self {
        self.contraction_interaction = (1.0 + self.k * self.a_o) / self.xi;
        self.contraction_twowave = (self.xi + self.k * self.a_o) / (self.k * (2.0 - self.a_o) - self.xi);
        self.mu = self.contraction_interaction.max(self.contraction_twowave).max(self.k_np * self.c_o / self.k);
        self
    }
}

/// User-fixed values for the otherwise auto-selected weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightOverrides {
    pub xi: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[serde(rename = "K_np")]
    pub k_np: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionOptions {
    pub overrides: WeightOverrides,
    /// Bound `L(t)` with the measured `Q(0+)` instead of `L(0+) A_o`.
    pub use_measured_q: bool,
    pub q0: f64,
    pub damping_resolution: usize,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        SelectionOptions { overrides: WeightOverrides::default(), use_measured_q: false, q0: 0.0, damping_resolution: DEFAULT_DAMPING_RESOLUTION }
    }
}

/// `C_o(m) = 2 a(1) sinh(m)/m`.
pub fn np_constant(a_max: f64, m: f64) -> f64 {
    2.0 * a_max * m.sinh() / m
}

pub fn select_parameters(m: f64, a_o: f64, l0: f64, a_max: f64) -> Result<ParameterSet> {
    select_parameters_with(m, a_o, l0, a_max, &SelectionOptions::default())
}

/// Choose `ξ`, `K`, `K_np` at the geometric midpoints of their feasible
/// intervals, with `ξ` capped so that `L(0+)(2ξ − 1) < m`.
pub fn select_parameters_with(m: f64, a_o: f64, l0: f64, a_max: f64, opts: &SelectionOptions) -> Result<ParameterSet> {
    if !(m > 0.0) {
        return Err(Error::Infeasible(format!("budget m must be positive, got {m}")));
    }
    let d = damping_coefficient(m, opts.damping_resolution);
    let k_of_m = k_from_d(d);
    if !(a_o >= 0.0 && a_o < k_of_m) {
        return Err(Error::Infeasible(format!("A_o = {a_o} violates 0 <= A_o < (1-sqrt d)/(2-sqrt d) = {k_of_m}")));
    }
    let c_o = np_constant(a_max, m);
    let xi_lo = (1.0 - a_o) / (1.0 - 2.0 * a_o);
    let xi_hi = 1.0 / d.sqrt();
    let budget_cap = if l0 > 0.0 { 0.5 * (1.0 + m / l0) } else { f64::INFINITY };

    let xi = match opts.overrides.xi {
        Some(x) => x,
        None => {
            let mut hi = xi_hi;
            if !opts.use_measured_q {
                hi = hi.min(budget_cap);
            }
            if !(hi > xi_lo) {
                return Err(Error::Infeasible(format!(
                    "no xi in ((1-A_o)/(1-2A_o), min(1/sqrt d, (1+m/L0)/2)) = ({xi_lo}, {hi}); L(0+) < m/(2xi-1) fails"
                )));
            }
            (xi_lo * hi).sqrt()
        }
    };
    let k_lo = xi / (1.0 - a_o);
    let k = match opts.overrides.k {
        Some(k) => k,
        None if a_o == 0.0 => 2.0 * xi,
        None => {
            let k_hi = (xi - 1.0) / a_o;
            if !(k_hi > k_lo) {
                return Err(Error::Infeasible(format!("empty K interval ({k_lo}, {k_hi})")));
            }
            (k_lo * k_hi).sqrt()
        }
    };
    let base = ParameterSet {
        m,
        a_o,
        d,
        c: c_of_m(m),
        k_of_m,
        xi,
        k,
        k_np: 0.0,
        c_o,
        mu: 0.0,
        contraction_interaction: 0.0,
        contraction_twowave: 0.0,
    }
    .with_rates();
    let k_np = match opts.overrides.k_np {
        Some(x) => x,
        None => base.contraction_interaction.max(base.contraction_twowave) * k / c_o,
    };
    let mut p = ParameterSet { k_np, ..base }.with_rates();

    if opts.use_measured_q && opts.overrides.xi.is_none() && xi * l0 + k * opts.q0 >= m {
        let fallback = SelectionOptions { use_measured_q: false, ..*opts };
        p = select_parameters_with(m, a_o, l0, a_max, &fallback)?;
    }
    if let Some((name, _)) = p.constraints().into_iter().find(|(_, ok)| !ok) {
        return Err(Error::Infeasible(format!("selected constants violate {name}: {p:?}")));
    }
    let bound = if opts.use_measured_q { p.xi * l0 + p.k * opts.q0 } else { (2.0 * p.xi - 1.0) * l0 };
    if !(bound < m) {
        return Err(Error::Infeasible(format!("L(0+) bound {bound} is not below m = {m}")));
    }
    Ok(p)
}

/// Smallest `k` with `μ^{k−1} F0 / min(1, K_np) ≤ 1/(2ν)`, and the matching
/// product threshold `ρ = 1/(2ν C_o N)` for at most `N` low-order
/// non-physical fronts.
pub fn choose_np_budget(params: &ParameterSet, l_xi0: f64, q0: f64, nu: u32, front_bound: f64) -> (u32, f64) {
    let f0 = l_xi0 + params.k * q0;
    let target = 1.0 / (2.0 * nu as f64);
    let scale = params.k_np.min(1.0);
    let mut k_cut = 1u32;
    while params.mu.powi(k_cut as i32 - 1) * f0 / scale > target {
        k_cut += 1;
    }
    let rho = target / (params.c_o * front_bound.max(1.0));
    (k_cut, rho)
}

/// Functionals of one front configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSnapshot {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "L_cd")]
    pub l_cd: f64,
    #[serde(rename = "L_np")]
    pub l_np: f64,
    #[serde(rename = "L_shocks")]
    pub l_shocks: f64,
    #[serde(rename = "L_rarefactions")]
    pub l_rarefactions: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "L_xi")]
    pub l_xi: f64,
    #[serde(rename = "F")]
    pub f: f64,
    /// Entry `k − 1` holds the order-`k` value.
    pub v_k: Vec<f64>,
    pub q_k: Vec<f64>,
    pub f_k: Vec<f64>,
    pub tilde_v: Vec<f64>,
    pub tilde_q: Vec<f64>,
    pub tilde_f: Vec<f64>,
}

impl FunctionalSnapshot {
    pub fn max_live_order(&self) -> usize {
        self.v_k.len()
    }

    fn at(v: &[f64], k: usize) -> f64 {
        if k >= 1 && k <= v.len() { v[k - 1] } else { 0.0 }
    }

    pub fn f_of(&self, k: usize) -> f64 {
        Self::at(&self.f_k, k)
    }

    pub fn tilde_f_of(&self, k: usize) -> f64 {
        Self::at(&self.tilde_f, k)
    }

    pub fn tilde_v_of(&self, k: usize) -> f64 {
        Self::at(&self.tilde_v, k)
    }
}

/// Evaluate the functionals on fronts listed left to right.
pub fn compute_snapshot<I>(waves: I, params: &ParameterSet) -> FunctionalSnapshot
where
    I: IntoIterator<Item = WaveSummary>,
{
    let waves: Vec<WaveSummary> = waves.into_iter().collect();
    let max_order = waves.iter().filter(|w| w.kind != FrontKind::Two).map(|w| w.order as usize).max().unwrap_or(0);
    let mut v_acc = vec![Acc::default(); max_order];
    let mut q_acc = vec![Acc::default(); max_order];
    let (mut rar, mut sh, mut np, mut cd, mut q) = (Acc::default(), Acc::default(), Acc::default(), Acc::default(), Acc::default());

    for w in &waves {
        if w.kind == FrontKind::Two {
            cd.add(w.strength.abs());
        }
    }
    let l_cd = cd.value();
    let mut cd_left = Acc::default();
    for w in &waves {
        let g = w.strength.abs();
        let k = w.order.max(1) as usize - 1;
        match w.kind {
            FrontKind::Two => cd_left.add(g),
            FrontKind::NonPhysical => {
                np.add(g);
                v_acc[k].add(params.k_np * g);
            }
            FrontKind::One | FrontKind::Three => {
                if w.strength > 0.0 {
                    rar.add(g);
                    v_acc[k].add(g);
                } else {
                    sh.add(g);
                    v_acc[k].add(params.xi * g);
                }
                let weight = if w.kind == FrontKind::Three { l_cd - cd_left.value() } else { cd_left.value() };
                q.add(g * weight);
                q_acc[k].add(g * weight);
            }
        }
    }

    let (l_rarefactions, l_shocks, l_np, q) = (rar.value(), sh.value(), np.value(), q.value());
    let l = l_rarefactions + l_shocks + params.k_np * l_np;
    let l_xi = l_rarefactions + params.xi * l_shocks + params.k_np * l_np;
    let v_k: Vec<f64> = v_acc.iter().map(Acc::value).collect();
    let q_k: Vec<f64> = q_acc.iter().map(Acc::value).collect();
    let f_k: Vec<f64> = v_k.iter().zip(&q_k).map(|(v, qq)| v + params.k * qq).collect();
    let suffix = |xs: &[f64]| {
        let mut out = vec![0.0; xs.len()];
        let mut acc = Acc::default();
        for i in (0..xs.len()).rev() {
            acc.add(xs[i]);
            out[i] = acc.value();
        }
        out
    };
    let tilde_v = suffix(&v_k);
    let tilde_q = suffix(&q_k);
    let tilde_f = tilde_v.iter().zip(&tilde_q).map(|(v, qq)| v + params.k * qq).collect();
    FunctionalSnapshot {
        l,
        l_cd,
        l_np,
        l_shocks,
        l_rarefactions,
        q,
        l_xi,
        f: l_xi + params.k * q,
        v_k,
        q_k,
        f_k,
        tilde_v,
        tilde_q,
        tilde_f,
    }
}

/// What happened at an interaction, as far as the audit is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum InteractionClass {
    /// A 1-wave and a 3-wave crossing.
    Crossing,
    /// Two waves of one family; `order` is the larger incoming order.
    SameFamily { order: u32, reflected: f64 },
    /// A 1- or 3-wave of `order` meeting a contact; `product = |δ δ2|`.
    Contact { order: u32, reflected: f64, product: f64, simplified: bool },
    /// A non-physical front overtaking another front.
    NonPhysical,
}

impl InteractionClass {
    pub fn order(&self) -> Option<u32> {
        match *self {
            InteractionClass::SameFamily { order, .. } | InteractionClass::Contact { order, .. } => Some(order),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    pub delta_l_xi: f64,
    pub delta_q: f64,
    pub delta_f: f64,
    pub failures: Vec<String>,
}

impl AuditVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compare the functionals on both sides of one interaction.
pub fn audit_interaction(
    before: &FunctionalSnapshot,
    after: &FunctionalSnapshot,
    class: InteractionClass,
    params: &ParameterSet,
) -> AuditVerdict {
    let tol = TOL_AUDIT;
    let delta_l_xi = after.l_xi - before.l_xi;
    let delta_q = after.q - before.q;
    let delta_f = after.f - before.f;
    let rounding = 64.0 * f64::EPSILON * (before.q + after.q + before.l_xi + after.l_xi);
    let mut failures = Vec::new();
    let mut check = |ok: bool, msg: String| {
        if !ok {
            failures.push(msg);
        }
    };

    check(delta_f <= tol, format!("ΔF = {delta_f:e} > {tol:e}"));
    let kmax = before.max_live_order().max(after.max_live_order());
    let d_f = |k: usize| after.f_of(k) - before.f_of(k);
    let d_tf = |k: usize| after.tilde_f_of(k) - before.tilde_f_of(k);

    match class {
        InteractionClass::Crossing | InteractionClass::NonPhysical => {
            check(delta_l_xi.abs() <= tol && delta_q.abs() <= tol, format!("crossing changed L_ξ by {delta_l_xi:e}, Q by {delta_q:e}"));
            for k in 1..=kmax {
                check(d_f(k).abs() <= tol, format!("crossing changed F_{k} by {:e}", d_f(k)));
            }
        }
        InteractionClass::SameFamily { .. } => {
            check(delta_l_xi <= tol, format!("same-family ΔL_ξ = {delta_l_xi:e} > 0"));
        }
        InteractionClass::Contact { reflected, product, simplified, .. } => {
            check(delta_q < rounding, format!("contact interaction ΔQ = {delta_q:e} is not negative"));
            check(
                params.xi * reflected.abs() < 0.5 * params.k * delta_q.abs() + rounding,
                format!("ξ|ε_j| = {:e} not below (K/2)|ΔQ| = {:e}", params.xi * reflected.abs(), 0.5 * params.k * delta_q.abs()),
            );
            if simplified {
                let bound = product * (params.k_np * params.c_o - params.k);
                check(delta_f <= bound + tol, format!("non-physical generation ΔF = {delta_f:e} above {bound:e}"));
            }
        }
    }

    if let Some(h) = class.order() {
        let h = h as usize;
        for k in 1..=kmax.max(h + 1) {
            if k >= h + 2 {
                check(d_tf(k).abs() <= tol, format!("order-{h} event changed F̃_{k} by {:e}", d_tf(k)));
            } else if k == h + 1 {
                let gain = d_tf(k).max(0.0);
                let pos_lower: f64 = (1..=k.saturating_sub(2)).map(|l| d_f(l).max(0.0)).sum();
                let allowance = params.mu * ((-d_f(k - 1)).max(0.0) - pos_lower);
                check(gain <= allowance + tol, format!("order-{h} event: [ΔF̃_{k}]_+ = {gain:e} exceeds μ-damped loss {allowance:e}"));
            } else {
                check(d_tf(k) <= tol, format!("order-{h} event: ΔF̃_{k} = {:e} not negative", d_tf(k)));
                let pos_lower: f64 = (1..k).map(|l| d_f(l).max(0.0)).sum();
                check(
                    pos_lower <= (-d_tf(k)).max(0.0) + tol,
                    format!("order-{h} event: lower-order gains {pos_lower:e} exceed [ΔF̃_{k}]_-"),
                );
            }
        }
    }

    AuditVerdict { delta_l_xi, delta_q, delta_f, failures }
}
