//! Resolution of a single collision between two adjacent fronts.

use serde::{Deserialize, Serialize};

use super::front::{Front, FrontSpec};
use crate::error::{Error, Result};
use crate::functionals::{FrontKind, InteractionClass, ParameterSet};
use crate::model::{h, Family, PressureModel, State};
use crate::riemann::{split_rarefaction, RiemannFan, RiemannSolver, ZERO_STRENGTH};

/// Tolerance of the per-interaction interaction identities.
pub const TOL_IDENTITY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverUsed {
    Accurate,
    Simplified,
    Transmit,
}

impl SolverUsed {
    pub fn label(self) -> &'static str {
        match self {
            SolverUsed::Accurate => "accurate",
            SolverUsed::Simplified => "simplified",
            SolverUsed::Transmit => "transmit",
        }
    }
}

/// Everything the resolution step needs besides the two fronts.
#[derive(Debug, Clone, Copy)]
pub struct ResolveContext<'a> {
    pub model: &'a PressureModel,
    pub params: &'a ParameterSet,
    pub solver: RiemannSolver,
    pub eta: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub outgoing: Vec<FrontSpec>,
    pub class: InteractionClass,
    pub solver: SolverUsed,
}

/// Turn a Riemann fan into fronts. `orders` are the orders of the 1- and
/// 3-waves; `split` gives the rarefaction cap for each family, or `None` to
/// keep a rarefaction as one front. The chain of states starts at
/// `fan.left` and is closed exactly at `right`.
pub fn fan_to_specs(model: &PressureModel, fan: &RiemannFan, right: &State, orders: [u32; 2], split: [Option<f64>; 2]) -> Vec<FrontSpec> {
    let s = fan.strengths;
    let mut out = Vec::new();
    let mut cur = fan.left;
    let pieces = |eps: f64, cap: Option<f64>| match cap {
        Some(eta) if eps > 0.0 => split_rarefaction(eps, eta),
        _ => vec![eps],
    };
    if s.eps1.abs() >= ZERO_STRENGTH {
        let parts = pieces(s.eps1, split[0]);
        let n = parts.len();
        for (i, p) in parts.into_iter().enumerate() {
            let end = if i + 1 == n { fan.mid1 } else { model.wave_end_state(Family::One, p, &cur) };
            out.push(FrontSpec { kind: FrontKind::One, strength: p, order: orders[0], left: cur, right: end });
            cur = end;
        }
    }
    if s.eps2.abs() >= ZERO_STRENGTH {
        let end = model.curve_phi2(right.lam, &cur);
        out.push(FrontSpec { kind: FrontKind::Two, strength: s.eps2, order: 1, left: cur, right: end });
        cur = end;
    }
    if s.eps3.abs() >= ZERO_STRENGTH {
        let parts = pieces(s.eps3, split[1]);
        let n = parts.len();
        for (i, p) in parts.into_iter().enumerate() {
            let end = if i + 1 == n { *right } else { model.wave_end_state(Family::Three, p, &cur) };
            out.push(FrontSpec { kind: FrontKind::Three, strength: p, order: orders[1], left: cur, right: end });
            cur = end;
        }
    }
    if let Some(last) = out.last_mut() {
        last.right = *right;
    }
    out
}

fn audit(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Audit(what()))
    }
}

/// Residuals of the two balance identities linking the incoming waves to the
/// outgoing fan: the log-pressure balance and the velocity balance.
pub fn balance_residuals(model: &PressureModel, incoming: &[&Front], fan: &RiemannFan) -> [f64; 2] {
    let (mut dp, mut du) = (0.0, 0.0);
    for w in incoming {
        let a = model.a(w.left.lam);
        match w.kind {
            FrontKind::One => {
                dp -= w.strength;
                du += a * h(w.strength);
            }
            FrontKind::Three => {
                dp += w.strength;
                du += a * h(w.strength);
            }
            _ => {}
        }
    }
    let s = fan.strengths;
    let out_u = model.a(fan.left.lam) * h(s.eps1) + model.a(fan.right.lam) * h(s.eps3);
    [(s.eps3 - s.eps1) - dp, out_u - du]
}

/// Resolve the collision of `a` (left) with `b` (right).
pub fn resolve_pair(ctx: &ResolveContext<'_>, a: &Front, b: &Front) -> Result<Resolution> {
    use FrontKind::*;
    let describe = || format!("{}({:+.3e}, k={}) x {}({:+.3e}, k={})", a.kind.label(), a.strength, a.order, b.kind.label(), b.strength, b.order);
    match (a.kind, b.kind) {
        (NonPhysical, NonPhysical) | (_, NonPhysical) => Err(Error::Audit(format!("a front overtook a non-physical front: {}", describe()))),
        (NonPhysical, _) => transmit_non_physical(ctx, a, b),
        (Three, One) => {
            let fan = accurate(ctx, a, b)?;
            let out = fan_to_specs(ctx.model, &fan, &b.right, [b.order, a.order], [None, None]);
            let s = fan.strengths;
            audit((s.eps1 - b.strength).abs() <= TOL_IDENTITY && (s.eps3 - a.strength).abs() <= TOL_IDENTITY, || {
                format!("crossing changed strengths: {} -> ({:+e}, {:+e})", describe(), s.eps1, s.eps3)
            })?;
            Ok(Resolution { outgoing: out, class: InteractionClass::Crossing, solver: SolverUsed::Accurate })
        }
        (One, One) | (Three, Three) => {
            let fan = accurate(ctx, a, b)?;
            let (lo, hi) = (a.order.min(b.order), a.order.max(b.order));
            let s = fan.strengths;
            let (orders, split, eps_i, eps_j) = if a.kind == One {
                ([lo, hi + 1], [None, Some(ctx.eta)], s.eps1, s.eps3)
            } else {
                ([hi + 1, lo], [Some(ctx.eta), None], s.eps3, s.eps1)
            };
            let min_in = a.strength.abs().min(b.strength.abs());
            audit(eps_j.abs() <= ctx.params.d * min_in + TOL_IDENTITY, || {
                format!("reflected wave {eps_j:+e} exceeds d(m) min(|α|,|β|) = {:e}: {}", ctx.params.d * min_in, describe())
            })?;
            audit(eps_i.abs() <= a.strength.abs() + b.strength.abs() + TOL_IDENTITY, || {
                format!("transmitted wave {eps_i:+e} exceeds |α|+|β|: {}", describe())
            })?;
            let (sh_in, rar_in) = [a.strength, b.strength].iter().fold((0.0, 0.0), |(s, r), &x| if x < 0.0 { (s - x, r) } else { (s, r + x) });
            if a.strength < 0.0 && b.strength < 0.0 {
                audit(eps_i < 0.0 && -eps_i >= a.strength.abs().max(b.strength.abs()) - TOL_IDENTITY, || {
                    format!("two shocks gave {eps_i:+e}, not a larger shock: {}", describe())
                })?;
            } else if a.strength * b.strength < 0.0 {
                let (sh_out, rar_out) = if eps_i < 0.0 { (-eps_i, 0.0) } else { (0.0, eps_i) };
                audit(sh_out <= sh_in + TOL_IDENTITY && rar_out <= rar_in + TOL_IDENTITY, || {
                    format!("shock/rarefaction cancellation increased an amount ({eps_i:+e}): {}", describe())
                })?;
            }
            let out = fan_to_specs(ctx.model, &fan, &b.right, orders, split);
            Ok(Resolution { outgoing: out, class: InteractionClass::SameFamily { order: hi, reflected: eps_j }, solver: SolverUsed::Accurate })
        }
        (Three, Two) | (Two, One) => {
            let (wave, contact) = if a.kind == Two { (b, a) } else { (a, b) };
            let product = (wave.strength * contact.strength).abs();
            let k = wave.order;
            if product >= ctx.rho {
                let fan = accurate(ctx, a, b)?;
                let s = fan.strengths;
                let (orders, split, eps_i, eps_j) = if wave.kind == One {
                    ([k, k + 1], [None, Some(ctx.eta)], s.eps1, s.eps3)
                } else {
                    ([k + 1, k], [Some(ctx.eta), None], s.eps3, s.eps1)
                };
                audit(((eps_i - wave.strength).abs() - eps_j.abs()).abs() <= TOL_IDENTITY, || {
                    format!("|ε_i − δ_i| = {:e} differs from |ε_j| = {:e}: {}", (eps_i - wave.strength).abs(), eps_j.abs(), describe())
                })?;
                audit(eps_j.abs() <= 0.5 * product + TOL_IDENTITY, || format!("|ε_j| = {:e} exceeds ½|δ2 δ| = {:e}: {}", eps_j.abs(), 0.5 * product, describe()))?;
                let out = fan_to_specs(ctx.model, &fan, &b.right, orders, split);
                Ok(Resolution {
                    outgoing: out,
                    class: InteractionClass::Contact { order: k, reflected: eps_j, product, simplified: false },
                    solver: SolverUsed::Accurate,
                })
            } else {
                simplified(ctx, a, b, wave, product)
            }
        }
        _ => Err(Error::Audit(format!("diverging pair scheduled as a collision: {}", describe()))),
    }
}

fn accurate(ctx: &ResolveContext<'_>, a: &Front, b: &Front) -> Result<RiemannFan> {
    let fan = ctx.solver.solve(ctx.model, &a.left, &b.right)?;
    let r = balance_residuals(ctx.model, &[a, b], &fan);
    audit(r[0].abs() <= TOL_IDENTITY && r[1].abs() <= TOL_IDENTITY, || {
        format!("balance identities violated by {:e}, {:e} at {}x{}", r[0], r[1], a.kind.label(), b.kind.label())
    })?;
    Ok(fan)
}

fn simplified(ctx: &ResolveContext<'_>, a: &Front, b: &Front, wave: &Front, product: f64) -> Result<Resolution> {
    let model = ctx.model;
    let (ul, ur) = (a.left, b.right);
    let k = wave.order;
    let contact = model.contact_strength(ul.lam, ur.lam);
    let family = wave.kind.family().expect("physical wave");
    let mut out = Vec::with_capacity(3);
    if wave.kind == FrontKind::One {
        let q = model.wave_end_state(family, wave.strength, &ul);
        let q2 = model.curve_phi2(ur.lam, &q);
        out.push(FrontSpec { kind: FrontKind::One, strength: wave.strength, order: k, left: ul, right: q });
        out.push(FrontSpec { kind: FrontKind::Two, strength: contact, order: 1, left: q, right: q2 });
    } else {
        let q = model.curve_phi2(ur.lam, &ul);
        let q2 = model.wave_end_state(family, wave.strength, &q);
        out.push(FrontSpec { kind: FrontKind::Two, strength: contact, order: 1, left: ul, right: q });
        out.push(FrontSpec { kind: FrontKind::Three, strength: wave.strength, order: k, left: q, right: q2 });
    }
    let end = out.last().unwrap().right;
    push_non_physical(&mut out, end, ur, k + 1)?;
    let np = out.last().filter(|f| f.kind == FrontKind::NonPhysical).map_or(0.0, |f| f.strength);
    audit(np <= ctx.params.c_o * product + TOL_IDENTITY, || format!("non-physical size {np:e} exceeds C_o |δ δ2| = {:e}", ctx.params.c_o * product))?;
    Ok(Resolution { outgoing: out, class: InteractionClass::Contact { order: k, reflected: 0.0, product, simplified: true }, solver: SolverUsed::Simplified })
}

/// Append a non-physical front from `from` to `to`, or close the chain at `to`
/// when the velocity jump is negligible. Non-physical fronts carry no jump in
/// `v` or `λ`.
fn push_non_physical(out: &mut Vec<FrontSpec>, from: State, to: State, order: u32) -> Result<()> {
    audit((from.v / to.v).ln().abs() <= TOL_IDENTITY && from.lam == to.lam, || {
        format!("non-physical front would carry a v or λ jump: {from:?} -> {to:?}")
    })?;
    let size = (to.u - from.u).abs();
    if size >= ZERO_STRENGTH {
        out.push(FrontSpec { kind: FrontKind::NonPhysical, strength: size, order, left: from, right: to });
    } else if let Some(last) = out.last_mut() {
        last.right = to;
    }
    Ok(())
}

fn transmit_non_physical(ctx: &ResolveContext<'_>, np: &Front, w: &Front) -> Result<Resolution> {
    let model = ctx.model;
    let (ul, ur) = (np.left, w.right);
    let mut out = Vec::with_capacity(2);
    let end = match w.kind {
        FrontKind::Two => {
            let q = model.curve_phi2(ur.lam, &ul);
            out.push(FrontSpec { kind: FrontKind::Two, strength: model.contact_strength(ul.lam, ur.lam), order: 1, left: ul, right: q });
            q
        }
        kind => {
            let q = model.wave_end_state(kind.family().expect("physical wave"), w.strength, &ul);
            out.push(FrontSpec { kind, strength: w.strength, order: w.order, left: ul, right: q });
            q
        }
    };
    push_non_physical(&mut out, end, ur, np.order)?;
    let size = out.last().filter(|f| f.kind == FrontKind::NonPhysical).map_or(0.0, |f| f.strength);
    audit((size - np.strength).abs() <= 1e-12 * (1.0 + np.strength), || {
        format!("non-physical size changed from {:e} to {size:e}", np.strength)
    })?;
    Ok(Resolution { outgoing: out, class: InteractionClass::NonPhysical, solver: SolverUsed::Transmit })
}
