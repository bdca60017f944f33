//! The event loop: collision detection, resolution and per-event auditing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::front::{Front, FrontSpec};
use super::initial::InitialData;
use super::queue::{EventQueue, FrontId, FrontList};
use super::resolve::{resolve_pair, ResolveContext, SolverUsed};
use crate::error::{Error, Result};
use crate::functionals::{
    audit_interaction, compute_snapshot, FrontKind, FunctionalSnapshot, InteractionClass, ParameterSet, WaveSummary, TOL_AUDIT,
};
use crate::model::{PressureModel, State};
use crate::riemann::{front_speed, RiemannSolver};

/// Two pending collisions closer than this in time trigger a speed perturbation.
pub const COLLISION_WINDOW: f64 = 1e-12;
const MAX_JITTER_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    /// Rarefaction cap `η`.
    pub eta: f64,
    /// Product threshold `ρ` below which contact interactions use the simplified solver.
    pub rho: f64,
    /// Speed `ŝ` of non-physical fronts.
    pub s_hat: f64,
    pub nu: u32,
    /// Relative speed perturbation used to separate simultaneous collisions.
    pub speed_jitter: f64,
    pub t_end: f64,
    pub seed: u64,
    pub max_events: usize,
    pub snapshot_times: Vec<f64>,
    /// Bound `L(t)` by `ξ L(0+) + K Q(0+)` rather than `(2ξ − 1) L(0+)`.
    pub measured_q_bound: bool,
}

/// The earliest pending collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    pub time: f64,
    pub position: f64,
    pub left: FrontId,
    pub right: FrontId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub index: usize,
    pub t: f64,
    pub x: f64,
    pub class: InteractionClass,
    pub incoming: Vec<WaveSummary>,
    pub outgoing: Vec<WaveSummary>,
    pub delta_l_xi: f64,
    pub delta_q: f64,
    pub delta_f: f64,
    pub solver: SolverUsed,
}

impl EventRecord {
    pub fn kind_label(&self) -> &'static str {
        match self.class {
            InteractionClass::Crossing => "crossing",
            InteractionClass::SameFamily { .. } => "same_family",
            InteractionClass::Contact { .. } => "contact",
            InteractionClass::NonPhysical => "non_physical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub event_index: usize,
    pub t: f64,
    pub functionals: FunctionalSnapshot,
}

/// The piecewise-constant profile at one time: `left` on `(−∞, cells[0].0)`,
/// then `cells[i].1` from `cells[i].0` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub left: State,
    pub cells: Vec<(f64, State)>,
}

impl Snapshot {
    pub fn state_at(&self, x: f64) -> State {
        match self.cells.partition_point(|c| c.0 <= x) {
            0 => self.left,
            k => self.cells[k - 1].1,
        }
    }

    /// `∫_lo^hi |v − v'| + |u − u'| + |λ − λ'| dx`.
    pub fn l1_distance(&self, other: &Snapshot, lo: f64, hi: f64) -> f64 {
        let mut xs: Vec<f64> = self.cells.iter().chain(&other.cells).map(|c| c.0).filter(|&x| x > lo && x < hi).collect();
        xs.push(lo);
        xs.push(hi);
        xs.sort_by(f64::total_cmp);
        xs.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let (a, b) = (self.state_at(mid), other.state_at(mid));
                (w[1] - w[0]) * ((a.v - b.v).abs() + (a.u - b.u).abs() + (a.lam - b.lam).abs())
            })
            .sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub events: usize,
    pub accurate: usize,
    pub simplified: usize,
    pub transmitted: usize,
    pub jitters: usize,
    pub max_fronts: usize,
    /// Non-physical fronts created, indexed by `order − 1`.
    pub np_by_order: Vec<usize>,
    pub max_rarefaction: f64,
    pub max_wave: f64,
}

impl SimStats {
    pub fn np_below_order(&self, k: u32) -> usize {
        self.np_by_order.iter().take(k.saturating_sub(1) as usize).sum()
    }
}

/// Result of a finished simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub events: Vec<EventRecord>,
    pub trace: Vec<TraceRow>,
    pub snapshots: Vec<Snapshot>,
    pub stats: SimStats,
    pub final_fronts: Vec<Front>,
    pub initial: FunctionalSnapshot,
    pub l_bound: f64,
}

/// Front-tracking state: ordered fronts, pending collisions and the audit trail.
pub struct Simulation {
    model: PressureModel,
    params: ParameterSet,
    cfg: SchemeConfig,
    solver: RiemannSolver,
    list: FrontList,
    queue: EventQueue,
    rng: ChaCha8Rng,
    time: f64,
    left_state: State,
    contacts: Vec<(f64, f64, f64)>,
    initial: FunctionalSnapshot,
    current: FunctionalSnapshot,
    l_bound: f64,
    events: Vec<EventRecord>,
    trace: Vec<TraceRow>,
    snapshots: Vec<Snapshot>,
    next_snapshot: usize,
    stats: SimStats,
}

impl Simulation {
    pub fn new(model: PressureModel, params: ParameterSet, cfg: SchemeConfig, data: &InitialData) -> Result<Simulation> {
        if !(cfg.eta > 0.0 && cfg.rho >= 0.0 && cfg.s_hat > 0.0 && cfg.t_end >= 0.0 && cfg.nu >= 1) {
            return Err(Error::Config(format!("invalid scheme constants {cfg:?}")));
        }
        let mut sim = Simulation {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            model,
            params,
            solver: RiemannSolver::default(),
            list: FrontList::new(),
            queue: EventQueue::new(),
            time: 0.0,
            left_state: data.left_state(),
            contacts: Vec::new(),
            initial: FunctionalSnapshot::default(),
            current: FunctionalSnapshot::default(),
            l_bound: 0.0,
            events: Vec::new(),
            trace: Vec::new(),
            snapshots: Vec::new(),
            next_snapshot: 0,
            stats: SimStats::default(),
            cfg,
        };
        sim.cfg.snapshot_times.sort_by(f64::total_cmp);
        for (x, spec) in &data.fronts {
            let front = sim.make_front(spec, *x, 0.0)?;
            sim.list.push_back(front);
        }
        sim.contacts = sim.contact_profile();
        sim.initial = sim.compute_current();
        sim.current = sim.initial.clone();
        sim.l_bound = if sim.cfg.measured_q_bound {
            sim.params.xi * sim.initial.l + sim.params.k * sim.initial.q
        } else {
            (2.0 * sim.params.xi - 1.0) * sim.initial.l
        };
        sim.stats.max_fronts = sim.list.len();
        sim.trace.push(TraceRow { event_index: 0, t: 0.0, functionals: sim.initial.clone() });
        let ids: Vec<FrontId> = sim.list.ids().collect();
        for id in ids {
            sim.schedule(id);
        }
        Ok(sim)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn fronts(&self) -> Vec<Front> {
        self.list.iter().cloned().collect()
    }

    pub fn functionals(&self) -> &FunctionalSnapshot {
        &self.current
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn stats(&self) -> &SimStats {
        &self.stats
    }

    fn make_front(&mut self, spec: &FrontSpec, x: f64, t: f64) -> Result<Front> {
        let speed = match spec.kind {
            FrontKind::Two => 0.0,
            FrontKind::NonPhysical => self.cfg.s_hat,
            kind => front_speed(&self.model, kind.family().unwrap(), spec.strength, &spec.left, &spec.right),
        };
        let bad = |msg: String| Err(Error::Audit(format!("{msg} (front {spec:?} at t={t}, x={x})")));
        match spec.kind {
            FrontKind::One if !(speed < 0.0) => return bad(format!("1-front with speed {speed}")),
            FrontKind::Three if !(speed > 0.0) => return bad(format!("3-front with speed {speed}")),
            _ => {}
        }
        if spec.kind.is_genuinely_nonlinear() {
            if !(speed.abs() < self.cfg.s_hat) {
                return bad(format!("speed {speed} not below ŝ = {}", self.cfg.s_hat));
            }
            let g = spec.strength.abs();
            if !(g < self.params.m) {
                return bad(format!("wave strength {g} not below m = {}", self.params.m));
            }
            self.stats.max_wave = self.stats.max_wave.max(g);
            if spec.strength > 0.0 {
                let cap = self.cfg.eta * (0.5 * self.params.a_o).exp();
                if !(spec.strength < cap) {
                    return bad(format!("rarefaction {} not below η e^(A_o/2) = {cap}", spec.strength));
                }
                self.stats.max_rarefaction = self.stats.max_rarefaction.max(spec.strength);
            }
        }
        Ok(Front { kind: spec.kind, strength: spec.strength, order: spec.order, left: spec.left, right: spec.right, speed, x_ref: x, t_ref: t })
    }

    fn compute_current(&self) -> FunctionalSnapshot {
        compute_snapshot(self.list.iter().map(Front::summary), &self.params)
    }

    fn contact_profile(&self) -> Vec<(f64, f64, f64)> {
        self.list.iter().filter(|f| f.kind == FrontKind::Two).map(|f| (f.x_ref, f.left.lam, f.right.lam)).collect()
    }

    fn collision_time(&self, id: FrontId) -> Option<f64> {
        let next = self.list.next(id)?;
        let (a, b) = (self.list.get(id), self.list.get(next));
        if a.speed <= b.speed {
            return None;
        }
        let gap = (b.position(self.time) - a.position(self.time)).max(0.0);
        Some(self.time + gap / (a.speed - b.speed))
    }

    /// (Re)schedule the collision of `id` with its right neighbour. A time
    /// within [`COLLISION_WINDOW`] of another pending collision is separated
    /// by perturbing the speed of a 1- or 3-front of the pair.
    fn schedule(&mut self, id: FrontId) {
        let mut work = vec![id];
        let mut budget = 4 * MAX_JITTER_ATTEMPTS;
        while let Some(id) = work.pop() {
            self.queue.remove(id);
            let Some(mut t) = self.collision_time(id) else { continue };
            let mut attempts = 0;
            let accepted = loop {
                if t > self.cfg.t_end {
                    break None;
                }
                if self.cfg.speed_jitter == 0.0 || attempts >= MAX_JITTER_ATTEMPTS || !self.queue.has_conflict(id, t, COLLISION_WINDOW) {
                    break Some(t);
                }
                let next = self.list.next(id).expect("scheduled pair");
                let candidates: Vec<FrontId> = [id, next].into_iter().filter(|&f| self.list.get(f).kind.is_genuinely_nonlinear()).collect();
                if candidates.is_empty() {
                    break Some(t);
                }
                let f = candidates[self.rng.gen_range(0..candidates.len())];
                let sign = if self.rng.gen::<bool>() { 1.0 } else { -1.0 };
                let now = self.time;
                let front = self.list.get_mut(f);
                front.x_ref = front.position(now);
                front.t_ref = now;
                front.speed *= 1.0 + sign * self.cfg.speed_jitter;
                self.stats.jitters += 1;
                attempts += 1;
                let other = if f == id { self.list.prev(id) } else { Some(next) };
                if let Some(o) = other {
                    if budget > 0 {
                        budget -= 1;
                        work.push(o);
                    }
                }
                match self.collision_time(id) {
                    Some(nt) => t = nt,
                    None => break None,
                }
            };
            if let Some(t) = accepted {
                self.queue.insert(id, t);
            }
        }
    }

    /// The earliest pending collision, if any happens before `t_end`.
    pub fn next_event(&self) -> Option<Collision> {
        let p = self.queue.peek()?;
        let right = self.list.next(p.left)?;
        let time = p.time.0.max(self.time);
        Some(Collision { time, position: self.list.get(p.left).position(time), left: p.left, right })
    }

    fn emit_snapshots_until(&mut self, t: f64) {
        while self.next_snapshot < self.cfg.snapshot_times.len() && self.cfg.snapshot_times[self.next_snapshot] <= t {
            let s = self.cfg.snapshot_times[self.next_snapshot];
            self.snapshots.push(self.snapshot_at(s));
            self.next_snapshot += 1;
        }
    }

    /// Profile at time `s`, valid between the last processed collision and the next one.
    pub fn snapshot_at(&self, s: f64) -> Snapshot {
        Snapshot { t: s, left: self.left_state, cells: self.list.iter().map(|f| (f.position(s), f.right)).collect() }
    }

    /// Process the next collision. Returns `None` when no collision remains before `t_end`.
    pub fn step(&mut self) -> Result<Option<&EventRecord>> {
        let Some(ev) = self.next_event() else { return Ok(None) };
        if self.events.len() >= self.cfg.max_events {
            return Err(Error::Audit(format!("event cap {} reached at t={}", self.cfg.max_events, self.time)));
        }
        self.queue.pop();
        self.emit_snapshots_until(ev.time);
        self.time = ev.time;
        let t = ev.time;
        let a = self.list.get(ev.left).clone();
        let b = self.list.get(ev.right).clone();
        let x = if b.kind == FrontKind::Two {
            b.x_ref
        } else if a.kind == FrontKind::Two {
            a.x_ref
        } else {
            a.position(t)
        };
        let index = self.events.len() + 1;
        let ctx = ResolveContext { model: &self.model, params: &self.params, solver: self.solver, eta: self.cfg.eta, rho: self.cfg.rho };
        let res = resolve_pair(&ctx, &a, &b).map_err(|e| Error::Audit(format!("event {index} at t={t:.17e}, x={x:.17e}: {e}")))?;

        let prev = self.list.prev(ev.left);
        if let Some(p) = prev {
            self.queue.remove(p);
        }
        self.queue.remove(ev.right);
        self.list.remove(ev.left);
        self.list.remove(ev.right);
        let mut fronts = Vec::with_capacity(res.outgoing.len());
        for spec in &res.outgoing {
            fronts.push(self.make_front(spec, x, t)?);
        }
        let ids = self.list.insert_after(prev, fronts);

        match res.solver {
            SolverUsed::Accurate => self.stats.accurate += 1,
            SolverUsed::Simplified => self.stats.simplified += 1,
            SolverUsed::Transmit => self.stats.transmitted += 1,
        }
        if res.solver == SolverUsed::Simplified {
            for spec in res.outgoing.iter().filter(|s| s.kind == FrontKind::NonPhysical) {
                let k = spec.order as usize;
                if self.stats.np_by_order.len() < k {
                    self.stats.np_by_order.resize(k, 0);
                }
                self.stats.np_by_order[k - 1] += 1;
            }
        }
        self.stats.events = index;
        self.stats.max_fronts = self.stats.max_fronts.max(self.list.len());

        let after = self.compute_current();
        let verdict = audit_interaction(&self.current, &after, res.class, &self.params);
        let record = EventRecord {
            index,
            t,
            x,
            class: res.class,
            incoming: vec![a.summary(), b.summary()],
            outgoing: res.outgoing.iter().map(FrontSpec::summary).collect(),
            delta_l_xi: verdict.delta_l_xi,
            delta_q: verdict.delta_q,
            delta_f: verdict.delta_f,
            solver: res.solver,
        };
        if !verdict.passed() {
            return Err(Error::Audit(format!("event {index} at t={t:.17e}, x={x:.17e}: {}; {record:?}", verdict.failures.join("; "))));
        }
        self.check_global(&after).map_err(|e| Error::Audit(format!("after event {index} at t={t:.17e}: {e}")))?;
        self.current = after;

        if let Some(p) = prev {
            self.schedule(p);
        }
        for id in ids {
            self.schedule(id);
        }
        self.trace.push(TraceRow { event_index: index, t, functionals: self.current.clone() });
        self.events.push(record);
        Ok(self.events.last())
    }

    fn check_global(&self, s: &FunctionalSnapshot) -> std::result::Result<(), String> {
        let p = &self.params;
        let f0 = self.initial.f;
        if s.f > f0 + TOL_AUDIT {
            return Err(format!("F = {:e} exceeds F(0+) = {f0:e}", s.f));
        }
        if s.l > self.l_bound + TOL_AUDIT || !(s.l < p.m) {
            return Err(format!("L = {:e} exceeds the budget bound {:e} (m = {})", s.l, self.l_bound, p.m));
        }
        let mut rate = 1.0;
        for (k, tf) in s.tilde_f.iter().enumerate() {
            if *tf > rate * f0 + TOL_AUDIT {
                return Err(format!("F̃_{} = {tf:e} exceeds μ^{} F(0+) = {:e}", k + 1, k, rate * f0));
            }
            rate *= p.mu;
        }
        if self.initial.l_cd == 0.0 {
            if s.q != 0.0 || s.l_np != 0.0 || s.l_cd != 0.0 {
                return Err("constant mass fraction run produced contacts or non-physical fronts".into());
            }
            let mut w = 1.0;
            for (k, tv) in s.tilde_v.iter().enumerate() {
                if *tv > w * self.initial.l_xi + TOL_AUDIT {
                    return Err(format!("Ṽ_{} = {tv:e} exceeds ξ^{} L_ξ(0) = {:e}", k + 1, -(k as i64), w * self.initial.l_xi));
                }
                w /= p.xi;
            }
        }
        Ok(())
    }

    /// Adjacent fronts share their states, and the contacts (hence the
    /// mass-fraction profile) are those of the initial data.
    pub fn check_consistency(&self) -> Result<()> {
        let mut prev = self.left_state;
        for f in self.list.iter() {
            if f.left.max_abs_diff(&prev) > 1e-12 {
                return Err(Error::Audit(format!("state mismatch before front {f:?}: {prev:?}")));
            }
            if f.kind != FrontKind::Two && f.left.lam != f.right.lam {
                return Err(Error::Audit(format!("non-contact front changes λ: {f:?}")));
            }
            prev = f.right;
        }
        if self.contact_profile() != self.contacts {
            return Err(Error::Audit("mass-fraction profile changed".into()));
        }
        Ok(())
    }

    /// Run until no collision remains before `t_end`.
    pub fn run(mut self) -> Result<SimOutcome> {
        while self.step()?.is_some() {}
        self.check_consistency()?;
        let t_end = self.cfg.t_end;
        self.emit_snapshots_until(t_end);
        Ok(SimOutcome {
            final_fronts: self.fronts(),
            events: self.events,
            trace: self.trace,
            snapshots: self.snapshots,
            stats: self.stats,
            initial: self.initial,
            l_bound: self.l_bound,
        })
    }
}
