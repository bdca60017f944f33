//! Independent closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use phasefront::fronttracker::{resolve_pair, Front, FrontSpec, ResolveContext, SolverUsed};
use phasefront::functionals::{select_parameters, FrontKind, ParameterSet};
use phasefront::riemann::RiemannSolver;
use phasefront::{PressureModel, State};

pub const K0: f64 = 1.0;
pub const K1: f64 = 4.0;

pub fn model() -> PressureModel {
    PressureModel::affine(K0, K1).unwrap()
}

/// `a(λ) = sqrt(k0 + λ (k1 − k0))`.
pub fn a(lam: f64) -> f64 {
    (K0 + lam * (K1 - K0)).sqrt()
}

pub fn h(e: f64) -> f64 {
    if e >= 0.0 {
        e
    } else {
        e.sinh()
    }
}

/// Closed-form states along the fan: `[mid1, mid2, right]`.
pub fn reconstruct(left: State, lam_r: f64, e1: f64, e2: f64, e3: f64) -> [State; 3] {
    let _ = e2;
    let (al, ar) = (a(left.lam), a(lam_r));
    let m1 = State { v: left.v * (2.0 * e1).exp(), u: left.u + 2.0 * al * h(e1), lam: left.lam };
    let m2 = State { v: m1.v * ar * ar / (al * al), u: m1.u, lam: lam_r };
    let r = State { v: m2.v * (-2.0 * e3).exp(), u: m2.u + 2.0 * ar * h(e3), lam: lam_r };
    [m1, m2, r]
}

/// The two defining residuals: log-pressure balance and velocity balance.
pub fn residuals(l: &State, r: &State, e1: f64, e3: f64) -> [f64; 2] {
    let (al, ar) = (a(l.lam), a(r.lam));
    let (pl, pr) = (al * al / l.v, ar * ar / r.v);
    [(e3 - e1) - 0.5 * (pr / pl).ln(), 2.0 * (al * h(e1) + ar * h(e3)) - (r.u - l.u)]
}

/// Middle pressure by plain bisection in `log p` on the physical wave
/// curves, then the strengths `(ε1, ε2, ε3)`.
pub fn oracle_strengths(l: &State, r: &State) -> (f64, f64, f64) {
    let (al, ar) = (a(l.lam), a(r.lam));
    // u reached from the left through a 1-wave, minus u reached backwards from the right through a 3-wave
    let gap = |logp: f64| {
        let p = logp.exp();
        let v1 = al * al / p;
        let e1 = 0.5 * (v1 / l.v).ln();
        let v2 = ar * ar / p;
        let e3 = 0.5 * (v2 / r.v).ln();
        (l.u + 2.0 * al * h(e1)) - (r.u - 2.0 * ar * h(e3))
    };
    let (mut lo, mut hi) = (-60.0f64, 60.0f64);
    assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = (0.5 * (lo + hi)).exp();
    let e1 = 0.5 * ((al * al / p) / l.v).ln();
    let e3 = 0.5 * ((ar * ar / p) / r.v).ln();
    let e2 = 2.0 * (ar - al) / (ar + al);
    (e1, e2, e3)
}

pub fn params(m: f64) -> ParameterSet {
    select_parameters(m, 0.0, 0.1, a(1.0)).unwrap()
}

pub fn ctx<'a>(model: &'a PressureModel, params: &'a ParameterSet, eta: f64, rho: f64) -> ResolveContext<'a> {
    ResolveContext { model, params, solver: RiemannSolver::default(), eta, rho }
}

pub fn front(model: &PressureModel, kind: FrontKind, strength: f64, left: State, order: u32) -> Front {
    let right = match kind {
        FrontKind::Two => unreachable!("use contact()"),
        FrontKind::NonPhysical => State { u: left.u + strength, ..left },
        k => model.wave_end_state(k.family().unwrap(), strength, &left),
    };
    Front { kind, strength, order, left, right, speed: 0.0, x_ref: 0.0, t_ref: 0.0 }
}

pub fn contact(model: &PressureModel, lam_r: f64, left: State) -> Front {
    let right = model.curve_phi2(lam_r, &left);
    Front { kind: FrontKind::Two, strength: model.contact_strength(left.lam, lam_r), order: 1, left, right, speed: 0.0, x_ref: 0.0, t_ref: 0.0 }
}

/// Incoming family, its strength, and the expected pattern for `λ_ℓ < λ_r` and `λ_ℓ > λ_r`.
pub const SIGN_TABLE: [(FrontKind, f64, &str, &str); 4] = [
    (FrontKind::One, 0.1, "1R+2+3R", "1R+2+3S"),
    (FrontKind::One, -0.1, "1S+2+3S", "1S+2+3R"),
    (FrontKind::Three, 0.1, "1S+2+3R", "1R+2+3R"),
    (FrontKind::Three, -0.1, "1R+2+3S", "1S+2+3S"),
];

/// Outgoing sign pattern such as `1R+2+3S`.
pub fn signature(out: &[FrontSpec]) -> String {
    let mut parts = Vec::new();
    for kind in [FrontKind::One, FrontKind::Two, FrontKind::Three] {
        let total: f64 = out.iter().filter(|f| f.kind == kind).map(|f| f.strength).sum();
        parts.push(match kind {
            FrontKind::Two => "2".to_string(),
            _ => format!("{}{}", kind.label(), if total > 0.0 { "R" } else { "S" }),
        });
    }
    parts.join("+")
}

/// Outgoing pattern of a 1- or 3-wave of strength `delta` meeting a contact
/// from `lam_l` to `lam_r`.
pub fn contact_outcome(family: FrontKind, delta: f64, lam_l: f64, lam_r: f64) -> String {
    let m = model();
    let p = params(1.0);
    let c = ctx(&m, &p, 10.0, 0.0);
    let base = State { v: 1.0, u: 0.0, lam: lam_l };
    let res = if family == FrontKind::One {
        let cd = contact(&m, lam_r, base);
        let w = front(&m, FrontKind::One, delta, cd.right, 1);
        resolve_pair(&c, &cd, &w).unwrap()
    } else {
        let w = front(&m, FrontKind::Three, delta, base, 1);
        let cd = contact(&m, lam_r, w.right);
        resolve_pair(&c, &w, &cd).unwrap()
    };
    assert_eq!(res.solver, SolverUsed::Accurate);
    assert_eq!(res.outgoing.iter().filter(|f| f.kind == FrontKind::Two).count(), 1);
    signature(&res.outgoing)
}

